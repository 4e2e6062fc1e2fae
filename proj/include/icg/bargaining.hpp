#ifndef ICG_BARGAINING_HPP
#define ICG_BARGAINING_HPP

#include <icg/channel.hpp>
#include <icg/dynamics.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace icg {

/// Raised when the competitive point cannot be established because the
/// best-response dynamics did not settle.
class DivergenceError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Bargaining over joint FDM/TDM strategies: user n earns `rates(n, k)` for
/// every unit of time it owns bin k, and falls back to `disagreement(n)`.
struct BargainProblem
{
    Eigen::MatrixXd rates;          // n_users x n_bins, nonnegative
    Eigen::VectorXd disagreement;   // n_users

    Eigen::Index n_users() const { return rates.rows(); }
    Eigen::Index n_bins() const { return rates.cols(); }
};

void validate_problem(const BargainProblem& prob);

/// Sorting machinery of the two-user solver, in sorted (decreasing L) order.
/// Positions are 0-based; bins with zero rate for both users are left out of
/// the sort and split evenly.
struct TwoPlayerTrace
{
    std::vector<Eigen::Index> order;    // original bin index at each sorted position
    Eigen::VectorXd ratio;              // L = R_1 / R_2 (+inf when R_2 = 0)
    Eigen::VectorXd surplus_first;      // A_k
    Eigen::VectorXd surplus_second;     // B_k
    Eigen::VectorXd threshold;          // Gamma_k = A_k / B_k
    std::optional<Eigen::Index> k_min;  // first A_k >= 0
    std::optional<Eigen::Index> k_max;  // first B_k < 0
    std::optional<Eigen::Index> k_s;    // shared sorted position
    double g = 0.0;                     // unclamped share of user 1 at k_s
};

struct BargainingOutcome
{
    Eigen::MatrixXd alpha;              // n_users x n_bins time shares; zero when infeasible
    Eigen::VectorXd rates;              // NBS rates, or the disagreement point when infeasible
    bool feasible = false;
    double nash_product = 0.0;          // prod(rates - d), 0 when infeasible
    std::optional<Eigen::Index> shared_bin;   // original index of the shared bin (two users)
    std::optional<TwoPlayerTrace> trace;      // two-user solver only
    int iterations = 0;                 // oracle iterations
    double kkt_residual = 0.0;          // oracle optimality gap
};

/// Closed-form two-user solution: sort by L, scan the moving threshold, share
/// at most one bin. Infeasible problems echo the disagreement point.
BargainingOutcome nbs_two_player(const BargainProblem& prob);

struct OracleOptions
{
    int max_iterations = 200000;
    double kkt_tolerance = 1e-10;
    bool grid_refinement = true;   // dense grid search for two users and K <= 3
};

/// Direct maximization of sum_n log(R_n(alpha) - d_n) over per-bin simplices
/// by projected-gradient ascent, started from the max-min surplus point of an
/// LP. Works for any number of users.
BargainingOutcome nbs_oracle(const BargainProblem& prob, const OracleOptions& options = {});

/// Largest t such that every user can get at least d_n + t, with the
/// allocation attaining it (solved exactly as an LP). t > 0 iff a bargaining
/// solution exists.
struct SurplusMargin
{
    double margin = 0.0;
    Eigen::MatrixXd alpha;
};
SurplusMargin max_min_surplus(const BargainProblem& prob);

/// Rates of a time-share matrix and the Nash product against d.
Eigen::VectorXd shared_rates(const BargainProblem& prob, const Eigen::MatrixXd& alpha);
double nash_product(const BargainProblem& prob, const Eigen::VectorXd& rates);

enum class DisagreementMode { mask, budget };

/// Competitive rates: every user at full mask (mask mode) or the fixed point of
/// sequential rate-adaptive IWF (budget mode; throws DivergenceError otherwise).
Eigen::VectorXd disagreement_competitive(const InterferenceScenario& s, DisagreementMode mode,
                                         const DynamicsConfig& cfg = {});

/// Exclusive rates of a masked scenario with its full-mask competitive point.
BargainProblem problem_from_scenario(const InterferenceScenario& s);

/// Two users splitting a flat band of unit width: user 1 owns a fraction rho,
/// R(rho) = (rho/2) log2(1 + P/rho), disagreement (1/2) log2(1 + P/(1 + a_n^2 P)).
struct FlatFdmOutcome
{
    double rho = 0.5;
    Eigen::Vector2d rates = Eigen::Vector2d::Zero();
    Eigen::Vector2d disagreement = Eigen::Vector2d::Zero();
    bool feasible = false;
    double nash_product = 0.0;
};

double flat_fdm_rate(double share, double power);
FlatFdmOutcome nbs_flat_fdm(double power, double cross_amplitude_1, double cross_amplitude_2);

/// Monte Carlo means (and standard errors) of the exclusive per-bin rates and
/// the full-mask competitive rates over channel draws.
struct FadingRates
{
    BargainProblem problem;          // expected exclusive rates and expected competitive rates
    Eigen::MatrixXd rates_stderr;
    Eigen::VectorXd disagreement_stderr;
    int samples = 0;
};

using ScenarioSampler = std::function<InterferenceScenario(std::uint64_t seed)>;

/// Sample i is drawn with seed derive_seed(seed, {i}), so a longer run extends a shorter one.
FadingRates expected_exclusive_rates(const ScenarioSampler& sampler, std::uint64_t seed, int n_samples);
FadingRates expected_exclusive_rates(const RayleighSpec& spec, int n_samples);

} // namespace icg

#endif // ICG_BARGAINING_HPP
