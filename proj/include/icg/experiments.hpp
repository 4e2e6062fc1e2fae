#ifndef ICG_EXPERIMENTS_HPP
#define ICG_EXPERIMENTS_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace icg {

/// Two-user Rayleigh sweep comparing full-mask competition with bargaining.
struct PoaConfig
{
    int n_bins = 32;
    double snr_db = 30.0;                 // exclusive per-bin SNR at unit direct gain and noise
    std::vector<double> cross_levels_db;  // cross-gain mean power per level; default -10..0 dB
    int trials = 25;
    std::uint64_t seed = 1;

    PoaConfig();
};

void validate_poa_config(const PoaConfig& cfg);

struct PoaRecord
{
    double level_db = 0.0;
    int trial = 0;
    Eigen::Vector2d competitive = Eigen::Vector2d::Zero();
    Eigen::Vector2d bargaining = Eigen::Vector2d::Zero();
    double delta_min = 1.0;   // min_n bargaining_n / competitive_n; 1 when infeasible
    bool feasible = false;
};

/// One record per (level, trial), levels in configuration order. Trial t of
/// level i draws its channel with seed derive_seed(cfg.seed, {i, t}).
std::vector<PoaRecord> run_poa(const PoaConfig& cfg);

/// Single trial, exposed for tests and for callers running trials concurrently.
PoaRecord run_poa_trial(const PoaConfig& cfg, std::size_t level_index, int trial);

struct PoaSummary
{
    double level_db = 0.0;
    int count = 0;
    double min = 0.0;
    double median = 0.0;
    double mean = 0.0;
    double max = 0.0;
    int infeasible = 0;
};

/// Per-level order statistics of delta_min, sorted by level.
std::vector<PoaSummary> summarize(const std::vector<PoaRecord>& records);

/// Median over every record.
double overall_median(const std::vector<PoaRecord>& records);

} // namespace icg

#endif // ICG_EXPERIMENTS_HPP
