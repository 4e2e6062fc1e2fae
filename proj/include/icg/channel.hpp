#ifndef ICG_CHANNEL_HPP
#define ICG_CHANNEL_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace icg {

/// Raised when a scenario violates a structural invariant.
class ScenarioError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a power allocation is not admissible for a scenario.
class AllocationError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Per-user, per-bin transmit PSD: rows are users, columns are bins.
using PowerAllocation = Eigen::MatrixXd;

/// Frequency-selective Gaussian interference channel with unit-width bins.
///
/// `gain[k](n, m)` is the power gain |h_nm(k)|^2 from transmitter m to
/// receiver n on bin k. Noise, mask and budget are per receiver/user.
struct InterferenceScenario
{
    Eigen::Index n_users = 0;
    Eigen::Index n_bins = 0;
    std::vector<Eigen::MatrixXd> gain;       // n_bins matrices, each n_users x n_users
    Eigen::MatrixXd noise;                   // n_users x n_bins, strictly positive
    std::optional<Eigen::MatrixXd> mask;     // n_users x n_bins PSD caps
    std::optional<Eigen::VectorXd> budget;   // n_users total powers

    double gain_at(Eigen::Index n, Eigen::Index m, Eigen::Index k) const { return gain[k](n, m); }
    double direct_gain(Eigen::Index n, Eigen::Index k) const { return gain[k](n, n); }

    friend bool operator==(const InterferenceScenario&, const InterferenceScenario&);
};

/// Returns `s` unchanged when every invariant holds; throws ScenarioError naming
/// the offending field otherwise.
InterferenceScenario validate_scenario(InterferenceScenario s);

/// Throws AllocationError unless `p` is nonnegative, shaped n_users x n_bins and
/// within the mask / budget of `s` (with relative slack `tol`).
void check_admissible(const InterferenceScenario& s, const PowerAllocation& p, double tol = 1e-9);

/// Per-user per-bin rates log2(1 + SINR) in bits, n_users x n_bins.
Eigen::MatrixXd bin_rates(const InterferenceScenario& s, const PowerAllocation& p);

/// Per-user rates summed over bins, interference treated as noise.
Eigen::VectorXd rate_profile(const InterferenceScenario& s, const PowerAllocation& p);

/// Interference-free rates log2(1 + g_nn(k) mask_n(k) / noise_n(k)) at full mask power.
Eigen::MatrixXd exclusive_rates(const InterferenceScenario& s);

/// Noise plus interference seen by user `n`, divided by its direct gain, per bin.
/// Bins with zero direct gain get +infinity.
Eigen::VectorXd effective_noise(const InterferenceScenario& s, const PowerAllocation& p, Eigen::Index n);

struct RayleighSpec
{
    Eigen::Index n_users = 2;
    Eigen::Index n_bins = 1;
    Eigen::VectorXd direct_mean;   // per user; mean power of |h_nn|^2
    Eigen::MatrixXd cross_mean;    // (n, m) mean power of |h_nm|^2, diagonal ignored
    double noise = 1.0;
    double mask = 1.0;
    std::uint64_t seed = 0;
};

void validate_rayleigh_spec(const RayleighSpec& spec);

/// Symmetric spec: every direct gain has mean `direct`, every cross gain `cross`.
RayleighSpec uniform_rayleigh_spec(Eigen::Index n_users, Eigen::Index n_bins, double direct, double cross,
                                   double noise, double mask, std::uint64_t seed);

/// Independent exponential power gains (Rayleigh amplitudes). Draw
/// `(k * N + n) * N + m` of the counter stream feeds gain (n, m, k).
InterferenceScenario sample_rayleigh_scenario(const RayleighSpec& spec);

namespace builtin {

/// 3 users on 2 tones, all power gains 1, noise sigma2 and power + sigma2, budgets `power`.
InterferenceScenario three_user_two_tone(double power = 1.0, double sigma2 = 1.0);

/// Triangle channel: every tone carries [[1,0,2],[2,1,0],[0,2,1]] with noises sigma2 and sigma2 + power.
InterferenceScenario triangle(double power = 1.0, double sigma2 = 1.0);

/// Two users on six bins whose interference-free rates are the integers
/// (14,18,5,10,9,3) and (6,10,5,15,19,19): unit gains and noise, mask 2^R - 1.
InterferenceScenario six_bin_pair();

} // namespace builtin

} // namespace icg

#endif // ICG_CHANNEL_HPP
