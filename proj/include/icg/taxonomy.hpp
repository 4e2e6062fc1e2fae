#ifndef ICG_TAXONOMY_HPP
#define ICG_TAXONOMY_HPP

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace icg {

using Payoff = std::array<double, 2>;

// --- two-user AWGN multiple-access game ------------------------------------

/// Two users of power P on a real AWGN multiple-access channel with noise sigma2.
struct MacGame
{
    double power = 1.0;
    double noise = 1.0;

    MacGame(double power, double noise);

    double c_max() const;   // (1/2) log2(1 + P/sigma2)
    double c_min() const;   // (1/2) log2(1 + P/(P + sigma2))
    double c_sum() const;   // (1/2) log2(1 + 2P/sigma2)

    Payoff corner_a() const { return {c_max(), c_min()}; }
    Payoff corner_b() const { return {c_min(), c_max()}; }
};

/// Time-sharing game: user n spends a fraction alpha_n at rate C_max, the rest
/// at C_min; both get nothing when alpha_1 + alpha_2 > 1.
Payoff mac_utility(double alpha1, double alpha2, const MacGame& game);

/// Best response of one user to the other's fraction: 1 - other.
double mac_best_response(double other);

/// Largest gain either user gets from a unilateral deviation, evaluated at the
/// best response.
double mac_deviation_gain(double alpha1, double alpha2, const MacGame& game);

enum class MacStatus { converged, limit_cycle, iteration_cap };

struct MacDynamics
{
    std::vector<std::array<double, 2>> trajectory;   // strategies, starting with the initial pair
    MacStatus status = MacStatus::iteration_cap;
    int period = 0;
    Payoff average_utility{};   // over the cycle, or at the fixed point
};

/// Best-response dynamics; sequential mode lets user 1 move first.
MacDynamics mac_dynamics(const MacGame& game, bool parallel, std::array<double, 2> initial, int max_iterations = 100);

/// Slotted random access: action 0 transmits at C_min, action 1 at C_max.
Payoff random_access_payoff(int action1, int action2, const MacGame& game);

struct MixedEquilibrium
{
    double p_low = 0.0;          // probability of the C_min action
    Payoff value{};
    double indifference = 0.0;   // |E[u(action 0)] - E[u(action 1)]| against p_low
};

MixedEquilibrium random_access_mixed_ne(const MacGame& game);

// --- symmetric two-band game with coupling h ---------------------------------

struct PdPayoffs
{
    double temptation = 0.0;   // T: user I water-fills against a cooperative user II
    double reward = 0.0;       // R: both split the band (FDM)
    double penalty = 0.0;      // P: both spread evenly
    double naive = 0.0;        // N: user I cooperates against a water-filling user II
};

/// Rate of user I when it puts a fraction alpha of its power on band 2 and user
/// II puts beta on band 1: the general two-band payoff behind the four outcomes.
double two_band_rate(double alpha, double beta, double h, double snr);

PdPayoffs pd_payoffs(double h, double snr);

enum class PdRegion { deadlock, prisoners_dilemma, chicken };

std::string to_string(PdRegion r);

struct GameClassification
{
    PdRegion region = PdRegion::deadlock;
    std::string ordering;   // e.g. "T>R>P>N"
    PdPayoffs payoffs;
};

GameClassification pd_classify(double h, double snr);

/// h where R = P (h_lim1) and where N = P (h_lim2), bracketed on a 1e-3 grid
/// and bisected to 1e-10.
std::pair<double, double> pd_limits(double snr);

double db_to_linear(double db);

// --- flat two-user interference channel bounds ---------------------------------

struct FlatBounds
{
    double cap1 = 0.0;      // log2(1 + P1)
    double cap2 = 0.0;      // log2(1 + P2)
    double sum_cap = 0.0;   // log2(min(1 + P1 + a P2, 1 + P2 + b P1))

    bool contains(double r1, double r2) const;
};

FlatBounds flat_bounds(double p1, double p2, double a, double b);

} // namespace icg

#endif // ICG_TAXONOMY_HPP
