#include <icg/bargaining.hpp>
#include <icg/rng.hpp>

#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace icg {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

BargainingOutcome fallback(const BargainProblem& prob)
{
    BargainingOutcome out;
    out.alpha = Eigen::MatrixXd::Zero(prob.n_users(), prob.n_bins());
    out.rates = prob.disagreement;
    out.feasible = false;
    out.nash_product = 0.0;
    return out;
}

} // namespace

void validate_problem(const BargainProblem& prob)
{
    if (prob.n_users() < 1 || prob.n_bins() < 1)
        throw std::invalid_argument("bargaining: need at least one user and one bin");
    if (prob.disagreement.size() != prob.n_users())
        throw std::invalid_argument("bargaining: disagreement vector must have one entry per user");
    if (!prob.rates.allFinite() || (prob.rates.array() < 0.0).any())
        throw std::invalid_argument("bargaining: rates must be finite and nonnegative");
    if (!prob.disagreement.allFinite())
        throw std::invalid_argument("bargaining: disagreement point must be finite");
}

Eigen::VectorXd shared_rates(const BargainProblem& prob, const Eigen::MatrixXd& alpha)
{
    return prob.rates.cwiseProduct(alpha).rowwise().sum();
}

double nash_product(const BargainProblem& prob, const Eigen::VectorXd& rates)
{
    return (rates - prob.disagreement).prod();
}

// ---------------------------------------------------------------------------
// two users

BargainingOutcome nbs_two_player(const BargainProblem& prob)
{
    validate_problem(prob);
    if (prob.n_users() != 2)
        throw std::invalid_argument("two-user bargaining needs exactly 2 users, got " + std::to_string(prob.n_users()));

    const Eigen::RowVectorXd r1 = prob.rates.row(0);
    const Eigen::RowVectorXd r2 = prob.rates.row(1);
    const double d1 = prob.disagreement(0);
    const double d2 = prob.disagreement(1);

    TwoPlayerTrace trace;
    for (Eigen::Index k = 0; k < prob.n_bins(); ++k)
        if (r1(k) > 0.0 || r2(k) > 0.0)
            trace.order.push_back(k);

    auto ratio_of = [&](Eigen::Index k) { return r2(k) > 0.0 ? r1(k) / r2(k) : inf; };
    std::stable_sort(trace.order.begin(), trace.order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return ratio_of(a) > ratio_of(b); });

    const auto M = static_cast<Eigen::Index>(trace.order.size());
    trace.ratio.resize(M);
    trace.surplus_first.resize(M);
    trace.surplus_second.resize(M);
    trace.threshold.resize(M);

    double total2 = 0.0;
    for (auto k : trace.order)
        total2 += r2(k);
    double own1 = 0.0;
    double own2 = total2;
    for (Eigen::Index j = 0; j < M; ++j) {
        const Eigen::Index k = trace.order[static_cast<std::size_t>(j)];
        own1 += r1(k);
        own2 -= r2(k);
        const double a = own1 - d1;
        const double b = own2 - d2;
        trace.ratio(j) = ratio_of(k);
        trace.surplus_first(j) = a;
        trace.surplus_second(j) = b;
        if (b != 0.0)
            trace.threshold(j) = a / b;
        else
            trace.threshold(j) = a > 0.0 ? inf : a < 0.0 ? -inf : std::numeric_limits<double>::quiet_NaN();
    }

    BargainingOutcome out = fallback(prob);
    auto give_up = [&]() {
        out.trace = trace;
        return out;
    };
    if (M == 0)
        return give_up();

    for (Eigen::Index j = 0; j < M && !trace.k_min; ++j)
        if (trace.surplus_first(j) >= 0.0)
            trace.k_min = j;
    for (Eigen::Index j = 0; j < M && !trace.k_max; ++j)
        if (trace.surplus_second(j) < 0.0)
            trace.k_max = j;
    if (!trace.k_min)
        return give_up();
    // without a negative B_k user 2 keeps a surplus up to the last bin
    const Eigen::Index k_max = trace.k_max.value_or(M - 1);
    if (*trace.k_min > k_max)
        return give_up();

    // first position where L(k) < Gamma_k
    auto below_threshold = [&](Eigen::Index j) {
        const double L = trace.ratio(j);
        const double a = trace.surplus_first(j);
        const double b = trace.surplus_second(j);
        if (std::isinf(L))
            return false;
        if (b > 0.0)
            return L < a / b;
        return b == 0.0 && a > 0.0;
    };
    bool scanned = false;
    for (Eigen::Index j = *trace.k_min; j < k_max; ++j)
        if (below_threshold(j)) {
            trace.k_s = j;
            scanned = true;
            break;
        }
    if (!scanned)
        trace.k_s = k_max;

    const Eigen::Index ks = *trace.k_s;
    const Eigen::Index shared = trace.order[static_cast<std::size_t>(ks)];
    const double before = ks > 0 ? trace.surplus_first(ks - 1) : -d1;
    // g = 1 + B/(2 R_2) (1 - Gamma/L), expanded so that it stays finite when B_k = 0
    if (r1(shared) == 0.0)
        trace.g = 0.0;
    else if (r2(shared) == 0.0)
        trace.g = 1.0;
    else
        trace.g = 0.5 + trace.surplus_second(ks) / (2.0 * r2(shared)) - before / (2.0 * r1(shared));

    if (trace.g > 1.0 + 1e-12)
        throw std::logic_error("two-user bargaining: shared fraction " + std::to_string(trace.g) + " exceeds 1");
    const double share = std::clamp(trace.g, 0.0, 1.0);

    // bins worthless to both users are split evenly
    Eigen::MatrixXd alpha = Eigen::MatrixXd::Constant(2, prob.n_bins(), 0.5);
    for (Eigen::Index j = 0; j < M; ++j) {
        const Eigen::Index k = trace.order[static_cast<std::size_t>(j)];
        alpha(0, k) = j < ks ? 1.0 : j == ks ? share : 0.0;
        alpha(1, k) = 1.0 - alpha(0, k);
    }
    const Eigen::VectorXd rates = shared_rates(prob, alpha);
    if (!(rates(0) > d1 && rates(1) > d2))
        return give_up();

    out.alpha = alpha;
    out.rates = rates;
    out.feasible = true;
    out.nash_product = nash_product(prob, rates);
    if (share > 0.0 && share < 1.0)
        out.shared_bin = shared;
    out.trace = std::move(trace);
    return out;
}

// ---------------------------------------------------------------------------
// N users

SurplusMargin max_min_surplus(const BargainProblem& prob)
{
    validate_problem(prob);
    const Eigen::Index N = prob.n_users();
    const Eigen::Index K = prob.n_bins();
    // variables: alpha(n, k) at n * K + k, then s = t + offset >= 0
    const double offset = prob.disagreement.maxCoeff() + 1.0;
    const Eigen::Index nv = N * K + 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N + K, nv);
    Eigen::VectorXd b(N + K);
    for (Eigen::Index n = 0; n < N; ++n) {
        // s - sum_k R(n,k) alpha(n,k) <= offset - d_n
        for (Eigen::Index k = 0; k < K; ++k)
            A(n, n * K + k) = -prob.rates(n, k);
        A(n, nv - 1) = 1.0;
        b(n) = offset - prob.disagreement(n);
    }
    for (Eigen::Index k = 0; k < K; ++k) {
        for (Eigen::Index n = 0; n < N; ++n)
            A(N + k, n * K + k) = 1.0;
        b(N + k) = 1.0;
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(nv);
    c(nv - 1) = 1.0;
    const auto sol = detail::solve_standard_lp(A, b, c);

    SurplusMargin out;
    out.alpha.resize(N, K);
    for (Eigen::Index n = 0; n < N; ++n)
        for (Eigen::Index k = 0; k < K; ++k)
            out.alpha(n, k) = sol.x(n * K + k);
    out.margin = sol.x(nv - 1) - offset;
    return out;
}

namespace {

// Euclidean projection of v onto {x >= 0, sum x = 1}.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v)
{
    std::vector<double> u(v.data(), v.data() + v.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0;
    double tau = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        cumulative += u[i];
        const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
        if (u[i] - candidate > 0.0)
            tau = candidate;
    }
    return (v.array() - tau).cwiseMax(0.0).matrix();
}

struct LogNash
{
    const BargainProblem& prob;

    Eigen::VectorXd surplus(const Eigen::MatrixXd& alpha) const
    {
        return shared_rates(prob, alpha) - prob.disagreement;
    }

    // -inf outside the region where every surplus is positive
    double value(const Eigen::MatrixXd& alpha) const
    {
        const Eigen::VectorXd s = surplus(alpha);
        if ((s.array() <= 0.0).any())
            return -inf;
        return s.array().log().sum();
    }

    Eigen::MatrixXd gradient(const Eigen::MatrixXd& alpha) const
    {
        const Eigen::VectorXd s = surplus(alpha);
        return s.cwiseInverse().asDiagonal() * prob.rates;
    }

    // Frank-Wolfe gap: bounds the distance of the objective to its maximum
    static double gap(const Eigen::MatrixXd& alpha, const Eigen::MatrixXd& grad)
    {
        double g = 0.0;
        for (Eigen::Index k = 0; k < alpha.cols(); ++k)
            g += grad.col(k).maxCoeff() - alpha.col(k).dot(grad.col(k));
        return g;
    }
};

struct AscentResult
{
    Eigen::MatrixXd alpha;
    double value = -inf;
    double gap = inf;
    int iterations = 0;
};

AscentResult projected_ascent(const LogNash& f, Eigen::MatrixXd alpha, const OracleOptions& options)
{
    AscentResult res;
    double value = f.value(alpha);
    Eigen::VectorXd surplus = f.surplus(alpha);
    double step = 0.0;
    int it = 0;
    double gap = inf;
    for (; it < options.max_iterations; ++it) {
        const Eigen::MatrixXd grad = f.gradient(alpha);
        gap = LogNash::gap(alpha, grad);
        if (gap <= options.kkt_tolerance)
            break;
        if (step == 0.0)
            step = 1.0 / grad.cwiseAbs().maxCoeff();

        bool moved = false;
        while (step > 1e-300) {
            Eigen::MatrixXd trial = alpha + step * grad;
            for (Eigen::Index k = 0; k < trial.cols(); ++k)
                trial.col(k) = project_simplex(trial.col(k));
            const Eigen::MatrixXd delta = trial - alpha;
            const double ascent = (grad.array() * delta.array()).sum();
            if (ascent <= 0.0)
                break;
            // objective change from the surplus change, free of cancellation near the optimum
            const Eigen::VectorXd change = f.prob.rates.cwiseProduct(delta).rowwise().sum();
            double gain = 0.0;
            bool inside = true;
            for (Eigen::Index n = 0; n < change.size() && inside; ++n) {
                const double ratio = change(n) / surplus(n);
                inside = ratio > -1.0;
                if (inside)
                    gain += std::log1p(ratio);
            }
            if (inside && gain >= 1e-4 * ascent) {
                alpha = std::move(trial);
                surplus = f.surplus(alpha);
                value += gain;
                moved = true;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if (!moved)
            break;
    }
    res.gap = LogNash::gap(alpha, f.gradient(alpha));
    res.alpha = std::move(alpha);
    res.value = f.value(res.alpha);
    res.iterations = it;
    return res;
}

// Newton iterations on the face of `alpha` (its support pattern is kept fixed),
// with the per-bin sums held at one. Returns nothing if the face is wrong.
std::optional<Eigen::MatrixXd> polish_on_face(const LogNash& f, const Eigen::MatrixXd& alpha)
{
    const Eigen::Index N = alpha.rows();
    const Eigen::Index K = alpha.cols();
    const double support = 1e-7;

    std::vector<std::pair<Eigen::Index, Eigen::Index>> free;   // (user, bin)
    std::vector<Eigen::Index> shared_bins;
    for (Eigen::Index k = 0; k < K; ++k) {
        std::vector<Eigen::Index> users;
        for (Eigen::Index n = 0; n < N; ++n)
            if (alpha(n, k) > support)
                users.push_back(n);
        if (users.size() < 2)
            continue;
        shared_bins.push_back(k);
        for (auto n : users)
            free.emplace_back(n, k);
    }
    if (free.empty())
        return std::nullopt;

    Eigen::MatrixXd x = alpha;
    for (Eigen::Index k : shared_bins)
        for (Eigen::Index n = 0; n < N; ++n)
            if (x(n, k) <= support)
                x(n, k) = 0.0;
    for (Eigen::Index k : shared_bins)
        x.col(k) /= x.col(k).sum();

    const auto V = static_cast<Eigen::Index>(free.size());
    const auto C = static_cast<Eigen::Index>(shared_bins.size());
    const auto& R = f.prob.rates;
    for (int it = 0; it < 30; ++it) {
        const Eigen::VectorXd s = f.surplus(x);
        if ((s.array() <= 0.0).any())
            return std::nullopt;
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(V + C, V + C);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(V + C);
        for (Eigen::Index a = 0; a < V; ++a) {
            const auto [n, k] = free[static_cast<std::size_t>(a)];
            rhs(a) = -R(n, k) / s(n);
            for (Eigen::Index b = 0; b < V; ++b) {
                const auto [m, j] = free[static_cast<std::size_t>(b)];
                if (m == n)
                    kkt(a, b) = -R(n, k) * R(n, j) / (s(n) * s(n));
            }
            const auto c = std::find(shared_bins.begin(), shared_bins.end(), k) - shared_bins.begin();
            kkt(a, V + c) = 1.0;
            kkt(V + c, a) = 1.0;
        }
        const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
        double largest = 0.0;
        for (Eigen::Index a = 0; a < V; ++a) {
            const auto [n, k] = free[static_cast<std::size_t>(a)];
            x(n, k) += sol(a);
            largest = std::max(largest, std::abs(sol(a)));
        }
        if ((x.array() < -1e-12).any() || (x.array() > 1.0 + 1e-12).any())
            return std::nullopt;
        x = x.cwiseMax(0.0).cwiseMin(1.0);
        if (largest <= 1e-15)
            break;
    }
    return x;
}

// Exhaustive grid over alpha in {0, 0.01, ..., 1}^K for two users.
std::optional<Eigen::MatrixXd> grid_best(const LogNash& f, Eigen::Index K, double beat)
{
    const int steps = 100;
    std::vector<int> idx(static_cast<std::size_t>(K), 0);
    Eigen::MatrixXd alpha(2, K);
    std::optional<Eigen::MatrixXd> best;
    double best_value = beat;
    while (true) {
        for (Eigen::Index k = 0; k < K; ++k) {
            alpha(0, k) = idx[static_cast<std::size_t>(k)] / static_cast<double>(steps);
            alpha(1, k) = 1.0 - alpha(0, k);
        }
        const double v = f.value(alpha);
        if (v > best_value) {
            best_value = v;
            best = alpha;
        }
        Eigen::Index pos = 0;
        while (pos < K && ++idx[static_cast<std::size_t>(pos)] > steps)
            idx[static_cast<std::size_t>(pos++)] = 0;
        if (pos == K)
            break;
    }
    return best;
}

} // namespace

BargainingOutcome nbs_oracle(const BargainProblem& prob, const OracleOptions& options)
{
    validate_problem(prob);
    const Eigen::Index N = prob.n_users();
    const Eigen::Index K = prob.n_bins();

    const SurplusMargin start = max_min_surplus(prob);
    if (!(start.margin > 0.0))
        return fallback(prob);

    // hand each bin's unused time to the user that values it most
    Eigen::MatrixXd alpha = start.alpha;
    for (Eigen::Index k = 0; k < K; ++k) {
        const double used = alpha.col(k).sum();
        if (used < 1.0) {
            Eigen::Index best = 0;
            prob.rates.col(k).maxCoeff(&best);
            alpha(best, k) += 1.0 - used;
        }
    }

    const LogNash f{prob};
    AscentResult res = projected_ascent(f, alpha, options);
    if (options.grid_refinement && N == 2 && K <= 3) {
        if (auto better = grid_best(f, K, res.value + 1e-12)) {
            AscentResult again = projected_ascent(f, *better, options);
            again.iterations += res.iterations;
            if (again.value >= res.value)
                res = std::move(again);
        }
    }

    if (res.gap > options.kkt_tolerance) {
        if (auto polished = polish_on_face(f, res.alpha)) {
            const double gap = LogNash::gap(*polished, f.gradient(*polished));
            if (gap < res.gap && f.value(*polished) >= res.value - 1e-9) {
                res.alpha = std::move(*polished);
                res.gap = gap;
            }
        }
    }

    BargainingOutcome out;
    out.alpha = res.alpha;
    out.rates = shared_rates(prob, res.alpha);
    out.feasible = true;
    out.nash_product = nash_product(prob, out.rates);
    out.iterations = res.iterations;
    out.kkt_residual = res.gap;
    if (N == 2) {
        for (Eigen::Index k = 0; k < K; ++k)
            if (res.alpha(0, k) > 1e-9 && res.alpha(0, k) < 1.0 - 1e-9) {
                out.shared_bin = k;
                break;
            }
    }
    return out;
}

// ---------------------------------------------------------------------------
// disagreement point

Eigen::VectorXd disagreement_competitive(const InterferenceScenario& s, DisagreementMode mode, const DynamicsConfig& cfg)
{
    if (mode == DisagreementMode::mask) {
        if (!s.mask)
            throw ScenarioError("scenario: mask-mode disagreement needs field 'mask'");
        return rate_profile(s, *s.mask);
    }
    if (!s.budget)
        throw ScenarioError("scenario: budget-mode disagreement needs field 'budget'");
    DynamicsConfig seq = cfg;
    seq.mode = UpdateMode::sequential;
    seq.response = ResponseKind::rate_adaptive;
    seq.store_trajectory = false;
    const DynamicsReport report = run_dynamics(s, seq);
    if (report.status != DynamicsStatus::converged) {
        std::string what = "competitive point undefined: sequential IWF ended in " + to_string(report.status);
        if (report.status == DynamicsStatus::limit_cycle)
            what += " (period " + std::to_string(report.period) + ")";
        throw DivergenceError(what + " after " + std::to_string(report.iterations) + " iterations");
    }
    return rate_profile(s, report.final_allocation);
}

BargainProblem problem_from_scenario(const InterferenceScenario& s)
{
    return BargainProblem{exclusive_rates(s), disagreement_competitive(s, DisagreementMode::mask)};
}

// ---------------------------------------------------------------------------
// flat channel

double flat_fdm_rate(double share, double power)
{
    if (share <= 0.0)
        return 0.0;
    return 0.5 * share * std::log2(1.0 + power / share);
}

FlatFdmOutcome nbs_flat_fdm(double power, double cross_amplitude_1, double cross_amplitude_2)
{
    if (!(power > 0.0) || !(cross_amplitude_1 >= 0.0) || !(cross_amplitude_2 >= 0.0))
        throw std::invalid_argument("flat FDM bargaining: need positive power and nonnegative cross gains");

    FlatFdmOutcome out;
    const double a[2] = {cross_amplitude_1, cross_amplitude_2};
    for (int n = 0; n < 2; ++n)
        out.disagreement(n) = 0.5 * std::log2(1.0 + power / (1.0 + a[n] * a[n] * power));
    const double d1 = out.disagreement(0);
    const double d2 = out.disagreement(1);

    // smallest share reaching `level`; R is increasing in the share
    auto share_for = [&](double level) {
        if (flat_fdm_rate(1.0, power) <= level)
            return 1.0;
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi)
                break;
            (flat_fdm_rate(mid, power) > level ? hi : lo) = mid;
        }
        return hi;
    };
    const double lo = share_for(d1);
    const double hi = 1.0 - share_for(d2);
    auto log_product = [&](double rho) {
        const double s1 = flat_fdm_rate(rho, power) - d1;
        const double s2 = flat_fdm_rate(1.0 - rho, power) - d2;
        if (s1 <= 0.0 || s2 <= 0.0)
            return -inf;
        return std::log(s1) + std::log(s2);
    };
    if (!(lo < hi) || log_product(0.5 * (lo + hi)) == -inf) {
        out.rho = 0.5;
        out.rates = out.disagreement;
        out.feasible = false;
        return out;
    }

    // golden-section search on the concave log product
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x0 = lo, x3 = hi;
    double x1 = x3 - invphi * (x3 - x0);
    double x2 = x0 + invphi * (x3 - x0);
    double f1 = log_product(x1), f2 = log_product(x2);
    while (x3 - x0 > 1e-10) {
        if (f1 < f2) {
            x0 = x1;
            x1 = x2;
            f1 = f2;
            x2 = x0 + invphi * (x3 - x0);
            f2 = log_product(x2);
        } else {
            x3 = x2;
            x2 = x1;
            f2 = f1;
            x1 = x3 - invphi * (x3 - x0);
            f1 = log_product(x1);
        }
    }
    out.rho = 0.5 * (x0 + x3);
    out.rates << flat_fdm_rate(out.rho, power), flat_fdm_rate(1.0 - out.rho, power);
    out.feasible = true;
    out.nash_product = (out.rates(0) - d1) * (out.rates(1) - d2);
    return out;
}

// ---------------------------------------------------------------------------
// fading statistics

FadingRates expected_exclusive_rates(const ScenarioSampler& sampler, std::uint64_t seed, int n_samples)
{
    if (n_samples < 1)
        throw std::invalid_argument("expected rates: need at least one sample");

    // Welford running mean and sum of squared deviations
    Eigen::MatrixXd mean, m2;
    Eigen::VectorXd dmean, dm2;
    for (int i = 0; i < n_samples; ++i) {
        const InterferenceScenario s = sampler(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
        const Eigen::MatrixXd r = exclusive_rates(s);
        const Eigen::VectorXd d = rate_profile(s, *s.mask);
        if (i == 0) {
            mean = Eigen::MatrixXd::Zero(r.rows(), r.cols());
            m2 = mean;
            dmean = Eigen::VectorXd::Zero(d.size());
            dm2 = dmean;
        }
        const double count = i + 1.0;
        const Eigen::MatrixXd dr = r - mean;
        mean += dr / count;
        m2 += dr.cwiseProduct(r - mean);
        const Eigen::VectorXd dd = d - dmean;
        dmean += dd / count;
        dm2 += dd.cwiseProduct(d - dmean);
    }

    const double n = n_samples;
    auto stderr_of = [n](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if (n < 2)
            return T(T::Zero(m.rows(), m.cols()));
        return T((m / ((n - 1.0) * n)).cwiseSqrt());
    };

    FadingRates out;
    out.problem.rates = mean;
    out.problem.disagreement = dmean;
    out.rates_stderr = stderr_of(m2);
    out.disagreement_stderr = stderr_of(dm2);
    out.samples = n_samples;
    return out;
}

FadingRates expected_exclusive_rates(const RayleighSpec& spec, int n_samples)
{
    validate_rayleigh_spec(spec);
    const ScenarioSampler sampler = [spec](std::uint64_t seed) {
        RayleighSpec draw = spec;
        draw.seed = seed;
        return sample_rayleigh_scenario(draw);
    };
    return expected_exclusive_rates(sampler, spec.seed, n_samples);
}

} // namespace icg
