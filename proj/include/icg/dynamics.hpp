#ifndef ICG_DYNAMICS_HPP
#define ICG_DYNAMICS_HPP

#include <icg/channel.hpp>

#include <optional>
#include <string>
#include <vector>

namespace icg {

enum class UpdateMode { sequential, parallel };
enum class ResponseKind { rate_adaptive, weighted, fixed_margin };

struct DynamicsConfig
{
    UpdateMode mode = UpdateMode::sequential;
    ResponseKind response = ResponseKind::rate_adaptive;
    Eigen::MatrixXd weights;          // n_users x n_bins, used by ResponseKind::weighted
    Eigen::VectorXd targets;          // per-user target rates, used by ResponseKind::fixed_margin
    double tolerance = 1e-9;          // sup-norm on successive allocations
    int max_iterations = 1000;        // sweeps
    int cycle_window = 64;            // remembered quantized states
    double quantum = 1e-9;            // PSD quantization for cycle detection
    std::vector<Eigen::Index> order;  // sequential update order; empty means 0..N-1
    bool store_trajectory = true;
};

void validate_config(const DynamicsConfig& cfg, const InterferenceScenario& s);

enum class DynamicsStatus { converged, limit_cycle, iteration_cap };

std::string to_string(UpdateMode m);
std::string to_string(ResponseKind r);
std::string to_string(DynamicsStatus s);

struct DynamicsReport
{
    PowerAllocation final_allocation;
    DynamicsStatus status = DynamicsStatus::iteration_cap;
    int period = 0;                               // >= 2 for limit cycles
    int iterations = 0;                           // completed sweeps
    std::vector<PowerAllocation> trajectory;      // state after each sweep, starting with the initial one
    std::vector<Eigen::VectorXd> rates;           // per-user rates of each trajectory entry
};

/// New PSD row for user `n` against the other users' current PSDs.
///
/// Budget-governed users water-fill (rate-adaptive or weighted) or run the
/// fixed-margin fill; a mask, when present, caps each bin. Users governed only
/// by a mask transmit the full mask unless the response is fixed-margin.
Eigen::VectorXd best_response(const InterferenceScenario& s, const PowerAllocation& p, Eigen::Index n,
                              const DynamicsConfig& cfg);

/// Iterated best responses. One iteration is a full sweep over users
/// (sequential) or one simultaneous update (parallel).
DynamicsReport run_dynamics(const InterferenceScenario& s, const DynamicsConfig& cfg,
                            std::optional<PowerAllocation> initial = std::nullopt);

/// Largest unilateral payoff gain available to any user (bits; weighted bits for
/// the weighted response). For fixed-margin play this is instead the largest of
/// |power - minimal power| and the rate shortfall, i.e. the generalized-NE residual.
double verify_nash(const InterferenceScenario& s, const PowerAllocation& p, const DynamicsConfig& cfg);

/// Payoff the configured response maximizes, for user `n` at allocation `p`.
double user_payoff(const InterferenceScenario& s, const PowerAllocation& p, Eigen::Index n, const DynamicsConfig& cfg);

} // namespace icg

#endif // ICG_DYNAMICS_HPP
