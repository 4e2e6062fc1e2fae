#include <icg/dynamics.hpp>
#include <icg/waterfill.hpp>

#include <cmath>
#include <deque>

namespace icg {

std::string to_string(UpdateMode m)
{
    return m == UpdateMode::sequential ? "sequential" : "parallel";
}

std::string to_string(ResponseKind r)
{
    switch (r) {
    case ResponseKind::rate_adaptive: return "rate_adaptive";
    case ResponseKind::weighted: return "weighted";
    case ResponseKind::fixed_margin: return "fixed_margin";
    }
    return "unknown";
}

std::string to_string(DynamicsStatus s)
{
    switch (s) {
    case DynamicsStatus::converged: return "Converged";
    case DynamicsStatus::limit_cycle: return "LimitCycle";
    case DynamicsStatus::iteration_cap: return "IterationCap";
    }
    return "unknown";
}

void validate_config(const DynamicsConfig& cfg, const InterferenceScenario& s)
{
    auto fail = [](const std::string& msg) { throw std::invalid_argument("dynamics config: " + msg); };
    if (!(cfg.tolerance > 0.0))
        fail("tolerance must be positive");
    if (cfg.max_iterations < 1)
        fail("iteration cap must be at least 1");
    if (cfg.cycle_window < 2)
        fail("cycle window must be at least 2");
    if (!(cfg.quantum > 0.0))
        fail("quantum must be positive");
    if (cfg.response == ResponseKind::weighted) {
        if (cfg.weights.rows() != s.n_users || cfg.weights.cols() != s.n_bins)
            fail("weights must be n_users x n_bins");
        if (!cfg.weights.allFinite() || (cfg.weights.array() <= 0.0).any())
            fail("weights must be positive");
    }
    if (cfg.response == ResponseKind::fixed_margin) {
        if (cfg.targets.size() != s.n_users)
            fail("fixed-margin play needs one target rate per user");
        if (!cfg.targets.allFinite() || (cfg.targets.array() < 0.0).any())
            fail("target rates must be nonnegative");
    }
    if (!cfg.order.empty()) {
        std::vector<bool> seen(static_cast<std::size_t>(s.n_users), false);
        if (static_cast<Eigen::Index>(cfg.order.size()) != s.n_users)
            fail("update order must list every user once");
        for (auto n : cfg.order) {
            if (n < 0 || n >= s.n_users || seen[static_cast<std::size_t>(n)])
                fail("update order must list every user once");
            seen[static_cast<std::size_t>(n)] = true;
        }
    }
}

Eigen::VectorXd best_response(const InterferenceScenario& s, const PowerAllocation& p, Eigen::Index n,
                              const DynamicsConfig& cfg)
{
    const Eigen::VectorXd nu = effective_noise(s, p, n);

    if (cfg.response == ResponseKind::fixed_margin) {
        const double target = cfg.targets(n);
        Eigen::VectorXd q = s.mask ? capped_margin_waterfill(nu, s.mask->row(n).transpose(), target)
                                   : margin_waterfill(nu, target);
        if (s.budget && q.sum() > (*s.budget)(n) * (1.0 + 1e-9))
            throw WaterfillError("user " + std::to_string(n) + " needs more than its power budget to reach its target");
        return q;
    }

    if (!s.budget)
        return s.mask->row(n).transpose();

    const double budget = (*s.budget)(n);
    const bool weighted = cfg.response == ResponseKind::weighted;
    if (s.mask) {
        const Eigen::VectorXd c = weighted ? Eigen::VectorXd(cfg.weights.row(n).transpose())
                                           : Eigen::VectorXd::Ones(s.n_bins);
        return capped_waterfill(nu, c, s.mask->row(n).transpose(), budget);
    }
    if (weighted)
        return weighted_waterfill(nu, cfg.weights.row(n).transpose(), budget);
    return waterfill(nu, budget);
}

double user_payoff(const InterferenceScenario& s, const PowerAllocation& p, Eigen::Index n, const DynamicsConfig& cfg)
{
    const Eigen::VectorXd nu = effective_noise(s, p, n);
    double total = 0.0;
    for (Eigen::Index k = 0; k < s.n_bins; ++k) {
        if (p(n, k) <= 0.0)
            continue;
        const double bits = std::log2(1.0 + p(n, k) / nu(k));
        total += cfg.response == ResponseKind::weighted ? cfg.weights(n, k) * bits : bits;
    }
    return total;
}

double verify_nash(const InterferenceScenario& s, const PowerAllocation& p, const DynamicsConfig& cfg)
{
    validate_config(cfg, s);
    check_admissible(s, p);
    double worst = 0.0;
    for (Eigen::Index n = 0; n < s.n_users; ++n) {
        const Eigen::VectorXd q = best_response(s, p, n, cfg);
        PowerAllocation deviated = p;
        deviated.row(n) = q.transpose();
        if (cfg.response == ResponseKind::fixed_margin) {
            const double power_gap = std::abs(p.row(n).sum() - q.sum());
            const double shortfall = std::max(0.0, cfg.targets(n) - user_payoff(s, p, n, cfg));
            worst = std::max({worst, power_gap, shortfall});
        } else {
            worst = std::max(worst, user_payoff(s, deviated, n, cfg) - user_payoff(s, p, n, cfg));
        }
    }
    return worst;
}

namespace {

std::vector<long long> quantize(const PowerAllocation& p, double quantum)
{
    std::vector<long long> q(static_cast<std::size_t>(p.size()));
    for (Eigen::Index i = 0; i < p.size(); ++i)
        q[static_cast<std::size_t>(i)] = std::llround(p.data()[i] / quantum);
    return q;
}

} // namespace

DynamicsReport run_dynamics(const InterferenceScenario& s, const DynamicsConfig& cfg,
                            std::optional<PowerAllocation> initial)
{
    validate_config(cfg, s);
    PowerAllocation current = initial ? *initial : PowerAllocation::Zero(s.n_users, s.n_bins);
    check_admissible(s, current);

    std::vector<Eigen::Index> order = cfg.order;
    if (order.empty())
        for (Eigen::Index n = 0; n < s.n_users; ++n)
            order.push_back(n);

    DynamicsReport report;
    auto record = [&](const PowerAllocation& p) {
        if (cfg.store_trajectory)
            report.trajectory.push_back(p);
        report.rates.push_back(rate_profile(s, p));
    };
    record(current);

    std::deque<std::pair<int, std::vector<long long>>> history;
    history.emplace_back(0, quantize(current, cfg.quantum));

    for (int it = 1; it <= cfg.max_iterations; ++it) {
        PowerAllocation next = current;
        if (cfg.mode == UpdateMode::sequential) {
            for (auto n : order)
                next.row(n) = best_response(s, next, n, cfg).transpose();
        } else {
            // every response reads the previous iterate
            for (Eigen::Index n = 0; n < s.n_users; ++n)
                next.row(n) = best_response(s, current, n, cfg).transpose();
        }
        const double step = (next - current).cwiseAbs().maxCoeff();
        current = std::move(next);
        record(current);
        report.iterations = it;

        if (step <= cfg.tolerance) {
            report.status = DynamicsStatus::converged;
            break;
        }

        auto state = quantize(current, cfg.quantum);
        bool cycled = false;
        for (auto h = history.rbegin(); h != history.rend(); ++h) {
            const auto& [when, seen] = *h;
            if (it - when >= 2 && seen == state) {
                report.status = DynamicsStatus::limit_cycle;
                report.period = it - when;
                cycled = true;
                break;
            }
        }
        if (cycled)
            break;
        history.emplace_back(it, std::move(state));
        if (static_cast<int>(history.size()) > cfg.cycle_window)
            history.pop_front();
    }
    report.final_allocation = current;
    return report;
}

} // namespace icg
