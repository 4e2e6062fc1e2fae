#include <icg/channel.hpp>
#include <icg/rng.hpp>

#include <cmath>
#include <limits>

namespace icg {

namespace {

void require(bool cond, const std::string& msg)
{
    if (!cond)
        throw ScenarioError("scenario: " + msg);
}

} // namespace

bool operator==(const InterferenceScenario& a, const InterferenceScenario& b)
{
    if (a.n_users != b.n_users || a.n_bins != b.n_bins || a.gain.size() != b.gain.size())
        return false;
    for (std::size_t k = 0; k < a.gain.size(); ++k)
        if (a.gain[k].rows() != b.gain[k].rows() || a.gain[k].cols() != b.gain[k].cols() || a.gain[k] != b.gain[k])
            return false;
    auto same = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
        return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
    };
    if (!same(a.noise, b.noise))
        return false;
    if (a.mask.has_value() != b.mask.has_value() || (a.mask && !same(*a.mask, *b.mask)))
        return false;
    if (a.budget.has_value() != b.budget.has_value() || (a.budget && !same(*a.budget, *b.budget)))
        return false;
    return true;
}

InterferenceScenario validate_scenario(InterferenceScenario s)
{
    require(s.n_users >= 1, "field 'n_users' must be at least 1");
    require(s.n_bins >= 1, "field 'n_bins' must be at least 1");
    require(static_cast<Eigen::Index>(s.gain.size()) == s.n_bins,
            "field 'gain' has " + std::to_string(s.gain.size()) + " bins, expected " + std::to_string(s.n_bins));
    for (const auto& g : s.gain) {
        require(g.rows() == s.n_users && g.cols() == s.n_users, "field 'gain' has inconsistent user dimensions");
        require(g.allFinite() && (g.array() >= 0.0).all(), "field 'gain' must be finite and nonnegative");
    }
    require(s.noise.rows() == s.n_users && s.noise.cols() == s.n_bins, "field 'noise' has wrong dimensions");
    require(s.noise.allFinite() && (s.noise.array() > 0.0).all(), "field 'noise' must be finite and strictly positive");
    require(s.mask.has_value() || s.budget.has_value(), "no power constraint declared (need 'mask' or 'budget')");
    if (s.mask) {
        require(s.mask->rows() == s.n_users && s.mask->cols() == s.n_bins, "field 'mask' has wrong dimensions");
        require(s.mask->allFinite() && (s.mask->array() >= 0.0).all(), "field 'mask' must be finite and nonnegative");
    }
    if (s.budget) {
        require(s.budget->size() == s.n_users, "field 'budget' has wrong length");
        require(s.budget->allFinite() && (s.budget->array() > 0.0).all(), "field 'budget' must be finite and positive");
    }
    return s;
}

void check_admissible(const InterferenceScenario& s, const PowerAllocation& p, double tol)
{
    if (p.rows() != s.n_users || p.cols() != s.n_bins)
        throw AllocationError("allocation: expected " + std::to_string(s.n_users) + "x" + std::to_string(s.n_bins) +
                              " PSD matrix, got " + std::to_string(p.rows()) + "x" + std::to_string(p.cols()));
    if (!p.allFinite() || (p.array() < 0.0).any())
        throw AllocationError("allocation: PSD entries must be finite and nonnegative");
    if (s.mask) {
        const auto& m = *s.mask;
        for (Eigen::Index n = 0; n < s.n_users; ++n)
            for (Eigen::Index k = 0; k < s.n_bins; ++k)
                if (p(n, k) > m(n, k) + tol * std::max(1.0, m(n, k)))
                    throw AllocationError("allocation: user " + std::to_string(n) + " exceeds its mask on bin " +
                                          std::to_string(k));
    }
    if (s.budget) {
        const auto& b = *s.budget;
        for (Eigen::Index n = 0; n < s.n_users; ++n)
            if (p.row(n).sum() > b(n) + tol * std::max(1.0, b(n)))
                throw AllocationError("allocation: user " + std::to_string(n) + " exceeds its power budget");
    }
}

Eigen::MatrixXd bin_rates(const InterferenceScenario& s, const PowerAllocation& p)
{
    check_admissible(s, p);
    Eigen::MatrixXd r(s.n_users, s.n_bins);
    for (Eigen::Index k = 0; k < s.n_bins; ++k) {
        const Eigen::MatrixXd& g = s.gain[k];
        for (Eigen::Index n = 0; n < s.n_users; ++n) {
            const double signal = g(n, n) * p(n, k);
            double interference = 0.0;
            for (Eigen::Index m = 0; m < s.n_users; ++m)
                if (m != n)
                    interference += g(n, m) * p(m, k);
            r(n, k) = std::log2(1.0 + signal / (interference + s.noise(n, k)));
        }
    }
    return r;
}

Eigen::VectorXd rate_profile(const InterferenceScenario& s, const PowerAllocation& p)
{
    return bin_rates(s, p).rowwise().sum();
}

Eigen::MatrixXd exclusive_rates(const InterferenceScenario& s)
{
    if (!s.mask)
        throw ScenarioError("scenario: exclusive rates need field 'mask'");
    Eigen::MatrixXd r(s.n_users, s.n_bins);
    for (Eigen::Index n = 0; n < s.n_users; ++n)
        for (Eigen::Index k = 0; k < s.n_bins; ++k)
            r(n, k) = std::log2(1.0 + s.gain[k](n, n) * (*s.mask)(n, k) / s.noise(n, k));
    return r;
}

Eigen::VectorXd effective_noise(const InterferenceScenario& s, const PowerAllocation& p, Eigen::Index n)
{
    Eigen::VectorXd nu(s.n_bins);
    for (Eigen::Index k = 0; k < s.n_bins; ++k) {
        const Eigen::MatrixXd& g = s.gain[k];
        double total = s.noise(n, k);
        for (Eigen::Index m = 0; m < s.n_users; ++m)
            if (m != n)
                total += g(n, m) * p(m, k);
        nu(k) = g(n, n) > 0.0 ? total / g(n, n) : std::numeric_limits<double>::infinity();
    }
    return nu;
}

void validate_rayleigh_spec(const RayleighSpec& spec)
{
    auto fail = [](const std::string& msg) { throw ScenarioError("rayleigh spec: " + msg); };
    if (spec.n_users < 1 || spec.n_bins < 1)
        fail("need at least one user and one bin");
    if (spec.direct_mean.size() != spec.n_users)
        fail("'direct_mean' must have one entry per user");
    if (spec.cross_mean.rows() != spec.n_users || spec.cross_mean.cols() != spec.n_users)
        fail("'cross_mean' must be n_users x n_users");
    if (!spec.direct_mean.allFinite() || (spec.direct_mean.array() < 0.0).any())
        fail("'direct_mean' must be finite and nonnegative");
    if (!spec.cross_mean.allFinite() || (spec.cross_mean.array() < 0.0).any())
        fail("'cross_mean' must be finite and nonnegative");
    if (!(spec.noise > 0.0) || !std::isfinite(spec.noise))
        fail("'noise' must be positive");
    if (!(spec.mask >= 0.0) || !std::isfinite(spec.mask))
        fail("'mask' must be nonnegative");
}

RayleighSpec uniform_rayleigh_spec(Eigen::Index n_users, Eigen::Index n_bins, double direct, double cross,
                                   double noise, double mask, std::uint64_t seed)
{
    RayleighSpec spec;
    spec.n_users = n_users;
    spec.n_bins = n_bins;
    spec.direct_mean = Eigen::VectorXd::Constant(n_users, direct);
    spec.cross_mean = Eigen::MatrixXd::Constant(n_users, n_users, cross);
    spec.noise = noise;
    spec.mask = mask;
    spec.seed = seed;
    return spec;
}

InterferenceScenario sample_rayleigh_scenario(const RayleighSpec& spec)
{
    validate_rayleigh_spec(spec);
    const CounterRng rng(spec.seed);
    const Eigen::Index N = spec.n_users;

    InterferenceScenario s;
    s.n_users = N;
    s.n_bins = spec.n_bins;
    s.gain.reserve(static_cast<std::size_t>(spec.n_bins));
    for (Eigen::Index k = 0; k < spec.n_bins; ++k) {
        Eigen::MatrixXd g(N, N);
        for (Eigen::Index n = 0; n < N; ++n)
            for (Eigen::Index m = 0; m < N; ++m) {
                const double mean = n == m ? spec.direct_mean(n) : spec.cross_mean(n, m);
                const auto index = static_cast<std::uint64_t>((k * N + n) * N + m);
                g(n, m) = rng.exponential_at(index, mean);
            }
        s.gain.push_back(std::move(g));
    }
    s.noise = Eigen::MatrixXd::Constant(N, spec.n_bins, spec.noise);
    s.mask = Eigen::MatrixXd::Constant(N, spec.n_bins, spec.mask);
    return validate_scenario(std::move(s));
}

namespace builtin {

InterferenceScenario three_user_two_tone(double power, double sigma2)
{
    InterferenceScenario s;
    s.n_users = 3;
    s.n_bins = 2;
    s.gain.assign(2, Eigen::MatrixXd::Ones(3, 3));
    s.noise.resize(3, 2);
    s.noise.col(0).setConstant(sigma2);
    s.noise.col(1).setConstant(power + sigma2);
    s.budget = Eigen::VectorXd::Constant(3, power);
    return validate_scenario(std::move(s));
}

InterferenceScenario triangle(double power, double sigma2)
{
    Eigen::MatrixXd h(3, 3);
    h << 1, 0, 2,
         2, 1, 0,
         0, 2, 1;
    InterferenceScenario s;
    s.n_users = 3;
    s.n_bins = 2;
    s.gain.assign(2, h);
    s.noise.resize(3, 2);
    s.noise.col(0).setConstant(sigma2);
    s.noise.col(1).setConstant(sigma2 + power);
    s.budget = Eigen::VectorXd::Constant(3, power);
    return validate_scenario(std::move(s));
}

InterferenceScenario six_bin_pair()
{
    Eigen::MatrixXd rates(2, 6);
    rates << 14, 18, 5, 10, 9, 3,
             6, 10, 5, 15, 19, 19;
    InterferenceScenario s;
    s.n_users = 2;
    s.n_bins = 6;
    s.gain.assign(6, Eigen::MatrixXd::Ones(2, 2));
    s.noise = Eigen::MatrixXd::Ones(2, 6);
    s.mask = rates.unaryExpr([](double r) { return std::exp2(r) - 1.0; });
    return validate_scenario(std::move(s));
}

} // namespace builtin

} // namespace icg
