#include <icg/experiments.hpp>

#include <icg/bargaining.hpp>
#include <icg/channel.hpp>
#include <icg/rng.hpp>
#include <icg/taxonomy.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace icg {

PoaConfig::PoaConfig()
{
    for (int db = -10; db <= 0; ++db)
        cross_levels_db.push_back(db);
}

void validate_poa_config(const PoaConfig& cfg)
{
    if (cfg.n_bins < 1)
        throw std::invalid_argument("poa: need at least one bin");
    if (cfg.trials < 1)
        throw std::invalid_argument("poa: need at least one trial per level");
    if (cfg.cross_levels_db.empty())
        throw std::invalid_argument("poa: need at least one cross-gain level");
    if (!std::isfinite(cfg.snr_db))
        throw std::invalid_argument("poa: snr_db must be finite");
    for (double level : cfg.cross_levels_db)
        if (!std::isfinite(level))
            throw std::invalid_argument("poa: cross-gain levels must be finite");
}

PoaRecord run_poa_trial(const PoaConfig& cfg, std::size_t level_index, int trial)
{
    PoaRecord rec;
    rec.level_db = cfg.cross_levels_db.at(level_index);
    rec.trial = trial;

    const auto seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(level_index), static_cast<std::uint64_t>(trial)});
    const RayleighSpec spec =
        uniform_rayleigh_spec(2, cfg.n_bins, 1.0, db_to_linear(rec.level_db), 1.0, db_to_linear(cfg.snr_db), seed);
    const InterferenceScenario s = sample_rayleigh_scenario(spec);
    const BargainProblem prob = problem_from_scenario(s);
    const BargainingOutcome nbs = nbs_two_player(prob);

    rec.competitive = prob.disagreement;
    rec.bargaining = nbs.rates;
    rec.feasible = nbs.feasible;
    rec.delta_min = nbs.feasible ? std::min(nbs.rates(0) / prob.disagreement(0), nbs.rates(1) / prob.disagreement(1))
                                 : 1.0;
    return rec;
}

std::vector<PoaRecord> run_poa(const PoaConfig& cfg)
{
    validate_poa_config(cfg);
    std::vector<PoaRecord> out;
    out.reserve(cfg.cross_levels_db.size() * static_cast<std::size_t>(cfg.trials));
    for (std::size_t i = 0; i < cfg.cross_levels_db.size(); ++i)
        for (int t = 0; t < cfg.trials; ++t)
            out.push_back(run_poa_trial(cfg, i, t));
    return out;
}

namespace {

double median_of_sorted(const std::vector<double>& v)
{
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

std::vector<PoaSummary> summarize(const std::vector<PoaRecord>& records)
{
    if (records.empty())
        throw std::invalid_argument("poa summary: no records");
    std::map<double, std::pair<std::vector<double>, int>> by_level;
    for (const auto& r : records) {
        auto& [values, infeasible] = by_level[r.level_db];
        values.push_back(r.delta_min);
        if (!r.feasible)
            ++infeasible;
    }
    std::vector<PoaSummary> out;
    for (auto& [level, entry] : by_level) {
        auto& [values, infeasible] = entry;
        std::sort(values.begin(), values.end());
        PoaSummary s;
        s.level_db = level;
        s.count = static_cast<int>(values.size());
        s.min = values.front();
        s.max = values.back();
        s.median = median_of_sorted(values);
        double total = 0.0;
        for (double v : values)
            total += v;
        s.mean = total / static_cast<double>(values.size());
        s.infeasible = infeasible;
        out.push_back(s);
    }
    return out;
}

double overall_median(const std::vector<PoaRecord>& records)
{
    if (records.empty())
        throw std::invalid_argument("poa summary: no records");
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records)
        v.push_back(r.delta_min);
    std::sort(v.begin(), v.end());
    return median_of_sorted(v);
}

} // namespace icg
