#ifndef ICG_TESTS_SUPPORT_HPP
#define ICG_TESTS_SUPPORT_HPP

#include <icg/bargaining.hpp>
#include <icg/channel.hpp>
#include <icg/rng.hpp>

#include <Eigen/Dense>

#include <cstdint>

namespace icg::testing {

// Sequential reader over a counter stream.
class Draws
{
public:
    explicit Draws(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) { return lo + (hi - lo) * rng_.uniform_at(next_++); }
    int integer(int lo, int hi) { return lo + static_cast<int>(rng_.uniform_at(next_++) * (hi - lo + 1)); }

private:
    CounterRng rng_;
    std::uint64_t next_ = 0;
};

// Bargaining instance. About a third use small integer rates (ties, zero bins);
// a sizeable minority has no bargain.
inline BargainProblem random_problem(std::uint64_t seed, int n_users, int n_bins)
{
    Draws d(seed);
    const bool integral = d.uniform() < 0.3;
    BargainProblem prob;
    prob.rates.resize(n_users, n_bins);
    for (int n = 0; n < n_users; ++n)
        for (int k = 0; k < n_bins; ++k)
            prob.rates(n, k) = integral ? d.integer(0, 4) : d.uniform(0.1, 10.0);
    prob.disagreement.resize(n_users);
    for (int n = 0; n < n_users; ++n)
        prob.disagreement(n) = d.uniform(0.0, 2.0 / n_users) * prob.rates.row(n).sum();
    return prob;
}

// Diagonally dominant scenario with total-power budgets.
inline InterferenceScenario dominant_scenario(std::uint64_t seed, int n_users, int n_bins)
{
    Draws d(seed);
    InterferenceScenario s;
    s.n_users = n_users;
    s.n_bins = n_bins;
    s.gain.assign(static_cast<std::size_t>(n_bins), Eigen::MatrixXd::Zero(n_users, n_users));
    s.noise.resize(n_users, n_bins);
    for (int k = 0; k < n_bins; ++k) {
        auto& g = s.gain[static_cast<std::size_t>(k)];
        for (int n = 0; n < n_users; ++n) {
            g(n, n) = d.uniform(0.2, 2.0);
            double cross = 0.0;
            for (int m = 0; m < n_users; ++m)
                if (m != n)
                    cross += (g(n, m) = d.uniform());
            const double scale = d.uniform(0.1, 0.95) * g(n, n) / cross;
            for (int m = 0; m < n_users; ++m)
                if (m != n)
                    g(n, m) *= scale;
            s.noise(n, k) = d.uniform(0.05, 1.0);
        }
    }
    s.budget = Eigen::VectorXd(n_users);
    for (int n = 0; n < n_users; ++n)
        (*s.budget)(n) = d.uniform(1.0, 10.0);
    return validate_scenario(s);
}

} // namespace icg::testing

#endif // ICG_TESTS_SUPPORT_HPP
