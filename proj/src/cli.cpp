#include <icg/cli.hpp>

#include <icg/bargaining.hpp>
#include <icg/channel.hpp>
#include <icg/dynamics.hpp>
#include <icg/experiments.hpp>
#include <icg/report_io.hpp>
#include <icg/scenario_io.hpp>
#include <icg/taxonomy.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace icg {

using nlohmann::json;

namespace {

class UsageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct Common
{
    std::string out_path;
    std::string format = "json";
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--out", c.out_path, "Write the artifact to this file instead of stdout");
    cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

void emit(const Common& c, const std::string& text, std::ostream& out)
{
    if (c.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(c.out_path);
    if (!file)
        throw FormatError("cannot write '" + c.out_path + "'");
    file << text;
}

std::string dump(const json& doc)
{
    return doc.dump(2) + "\n";
}

InterferenceScenario builtin_scenario(const std::string& name, double power, double sigma2)
{
    if (name == "example4")
        return builtin::three_user_two_tone(power, sigma2);
    if (name == "example5")
        return builtin::triangle(power, sigma2);
    if (name == "sorttable")
        return builtin::six_bin_pair();
    throw UsageError("unknown builtin '" + name + "' (expected example4, example5 or sorttable)");
}

BargainProblem sorttable_problem()
{
    BargainProblem prob;
    prob.rates.resize(2, 6);
    prob.rates << 14, 18, 5, 10, 9, 3,
                  6, 10, 5, 15, 19, 19;
    prob.disagreement = Eigen::Vector2d(15, 10);
    return prob;
}

std::vector<double> parse_list(const std::string& text, const std::string& flag)
{
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("flag '" + flag + "' expects comma-separated numbers, got '" + item + "'");
        }
    }
    return values;
}

json payoff_json(const Payoff& p)
{
    return json::array({json_number(p[0]), json_number(p[1])});
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Game-theoretic spectrum coordination toolkit", "icg"};
    app.require_subcommand(1, 1);

    // gen
    Common gen_c;
    std::string gen_builtin;
    int gen_users = 2, gen_bins = 32;
    std::uint64_t gen_seed = 1;
    double gen_snr_db = 30.0, gen_cross_db = -3.0, gen_direct = 1.0, gen_noise = 1.0;
    double power = 1.0, sigma2 = 1.0;
    auto* gen = app.add_subcommand("gen", "Write a scenario file (builtin or Rayleigh)");
    add_common(gen, gen_c);
    gen->add_option("--builtin", gen_builtin, "example4, example5 or sorttable");
    gen->add_option("--users", gen_users, "Rayleigh: number of users")->check(CLI::PositiveNumber);
    gen->add_option("--bins", gen_bins, "Rayleigh: number of bins")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "Rayleigh: 64-bit seed");
    gen->add_option("--snr-db", gen_snr_db, "Rayleigh: mask over noise in dB");
    gen->add_option("--cross-db", gen_cross_db, "Rayleigh: cross-gain mean power in dB");
    gen->add_option("--direct", gen_direct, "Rayleigh: direct-gain mean power");
    gen->add_option("--noise", gen_noise, "Rayleigh: noise level");
    gen->add_option("--power", power, "Builtins: per-user power P");
    gen->add_option("--sigma2", sigma2, "Builtins: base noise level");

    // iwf
    Common iwf_c;
    std::string iwf_scenario, iwf_builtin, iwf_mode = "sequential", iwf_response = "ra", iwf_weights, iwf_targets;
    DynamicsConfig iwf_cfg;
    double iwf_power = 1.0, iwf_sigma2 = 1.0;
    auto* iwf = app.add_subcommand("iwf", "Run iterative water-filling and write a dynamics report");
    add_common(iwf, iwf_c);
    iwf->add_option("--scenario", iwf_scenario, "Scenario file");
    iwf->add_option("--builtin", iwf_builtin, "example4 or example5");
    iwf->add_option("--power", iwf_power, "Builtins: per-user power P");
    iwf->add_option("--sigma2", iwf_sigma2, "Builtins: base noise level");
    iwf->add_option("--mode", iwf_mode)->check(CLI::IsMember({"sequential", "parallel"}));
    iwf->add_option("--response", iwf_response)->check(CLI::IsMember({"ra", "weighted", "fm"}));
    iwf->add_option("--tol", iwf_cfg.tolerance, "Convergence tolerance (sup norm)");
    iwf->add_option("--max-iters", iwf_cfg.max_iterations, "Iteration cap");
    iwf->add_option("--window", iwf_cfg.cycle_window, "Cycle-detection window");
    iwf->add_option("--weights", iwf_weights, "JSON file with an n_users x n_bins weight matrix");
    iwf->add_option("--targets", iwf_targets, "Comma-separated target rates (fm)");

    // nbs
    Common nbs_c;
    std::string nbs_rates, nbs_scenario, nbs_builtin, nbs_disagreement = "mask";
    bool nbs_oracle_flag = false;
    auto* nbs = app.add_subcommand("nbs", "Solve the Nash bargaining problem");
    add_common(nbs, nbs_c);
    nbs->add_option("--rates", nbs_rates, "Rates file with 'rates' and 'disagreement'");
    nbs->add_option("--scenario", nbs_scenario, "Masked scenario file");
    nbs->add_option("--builtin", nbs_builtin, "sorttable");
    nbs->add_option("--disagreement", nbs_disagreement, "Competitive point for scenarios")
        ->check(CLI::IsMember({"mask", "budget"}));
    nbs->add_flag("--oracle", nbs_oracle_flag, "Use the convex solver (any number of users)");

    // pd
    Common pd_c;
    std::optional<double> pd_snr_db, pd_snr, pd_h;
    std::string pd_sweep = "h";
    int pd_steps = 99;
    double pd_snr_min_db = 0.0, pd_snr_max_db = 40.0;
    auto* pd = app.add_subcommand("pd", "Prisoner's dilemma payoffs, regions and limits");
    add_common(pd, pd_c);
    pd->add_option("--snr-db", pd_snr_db, "SNR in dB (default 30)");
    pd->add_option("--snr", pd_snr, "Linear SNR");
    pd->add_option("--coupling", pd_h, "Single coupling value");
    pd->add_option("--sweep", pd_sweep)->check(CLI::IsMember({"h", "snr"}));
    pd->add_option("--steps", pd_steps, "Sweep points")->check(CLI::PositiveNumber);
    pd->add_option("--snr-min-db", pd_snr_min_db);
    pd->add_option("--snr-max-db", pd_snr_max_db);

    // mac
    Common mac_c;
    double mac_power = 1.0, mac_noise = 1.0;
    auto* mac = app.add_subcommand("mac", "Multiple-access game: corners, equilibria, dynamics");
    add_common(mac, mac_c);
    mac->add_option("--power", mac_power);
    mac->add_option("--noise", mac_noise);

    // poa
    Common poa_c;
    PoaConfig poa_cfg;
    std::string poa_levels;
    auto* poa = app.add_subcommand("poa", "Monte Carlo competitive vs bargaining experiment");
    add_common(poa, poa_c);
    poa->add_option("--bins", poa_cfg.n_bins)->check(CLI::PositiveNumber);
    poa->add_option("--snr-db", poa_cfg.snr_db);
    poa->add_option("--trials", poa_cfg.trials)->check(CLI::PositiveNumber);
    poa->add_option("--seed", poa_cfg.seed);
    poa->add_option("--levels", poa_levels, "Comma-separated cross-gain levels in dB");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_error;
    }

    try {
        if (gen->parsed()) {
            if (gen_c.format != "json")
                throw UsageError("flag '--format': scenario files are JSON only");
            if (gen_builtin == "sorttable") {
                emit(gen_c, dump(problem_to_json(sorttable_problem())), out);
                return exit_ok;
            }
            InterferenceScenario s;
            if (!gen_builtin.empty()) {
                s = builtin_scenario(gen_builtin, power, sigma2);
            } else {
                const RayleighSpec spec =
                    uniform_rayleigh_spec(gen_users, gen_bins, gen_direct, db_to_linear(gen_cross_db), gen_noise,
                                          gen_noise * db_to_linear(gen_snr_db), gen_seed);
                s = sample_rayleigh_scenario(spec);
            }
            emit(gen_c, dump_scenario(s), out);
            return exit_ok;
        }

        if (iwf->parsed()) {
            if (iwf_scenario.empty() == iwf_builtin.empty())
                throw UsageError("iwf needs exactly one of '--scenario' or '--builtin'");
            if (iwf_builtin == "sorttable")
                throw UsageError("flag '--builtin': sorttable has no power budgets to iterate");
            const InterferenceScenario s =
                iwf_builtin.empty() ? read_scenario(iwf_scenario) : builtin_scenario(iwf_builtin, iwf_power, iwf_sigma2);
            iwf_cfg.mode = iwf_mode == "parallel" ? UpdateMode::parallel : UpdateMode::sequential;
            iwf_cfg.response = iwf_response == "weighted" ? ResponseKind::weighted
                               : iwf_response == "fm"     ? ResponseKind::fixed_margin
                                                          : ResponseKind::rate_adaptive;
            if (iwf_cfg.response == ResponseKind::weighted) {
                if (iwf_weights.empty())
                    throw UsageError("flag '--weights' is required with '--response weighted'");
                iwf_cfg.weights = matrix_from_json(read_json_file(iwf_weights), "weights");
            }
            if (iwf_cfg.response == ResponseKind::fixed_margin) {
                if (iwf_targets.empty())
                    throw UsageError("flag '--targets' is required with '--response fm'");
                const auto t = parse_list(iwf_targets, "--targets");
                iwf_cfg.targets = Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
            }
            const DynamicsReport report = run_dynamics(s, iwf_cfg);
            emit(iwf_c, iwf_c.format == "csv" ? dynamics_to_csv(report) : dump(dynamics_to_json(report)), out);
            return exit_ok;
        }

        if (nbs->parsed()) {
            const int sources = !nbs_rates.empty() + !nbs_scenario.empty() + !nbs_builtin.empty();
            if (sources != 1)
                throw UsageError("nbs needs exactly one of '--rates', '--scenario' or '--builtin'");
            BargainProblem prob;
            if (!nbs_rates.empty()) {
                prob = problem_from_json(read_json_file(nbs_rates));
            } else if (!nbs_builtin.empty()) {
                if (nbs_builtin != "sorttable")
                    throw UsageError("flag '--builtin': only sorttable is a bargaining instance");
                prob = sorttable_problem();
            } else {
                const InterferenceScenario s = read_scenario(nbs_scenario);
                prob.rates = exclusive_rates(s);
                prob.disagreement = disagreement_competitive(
                    s, nbs_disagreement == "budget" ? DisagreementMode::budget : DisagreementMode::mask);
            }
            if (!nbs_oracle_flag && prob.n_users() != 2)
                throw UsageError("the two-user solver got " + std::to_string(prob.n_users()) +
                                 " users; pass '--oracle' for the general solver");
            const BargainingOutcome outcome = nbs_oracle_flag ? nbs_oracle(prob) : nbs_two_player(prob);
            emit(nbs_c,
                 nbs_c.format == "csv" ? bargaining_to_csv(prob, outcome) : dump(bargaining_to_json(prob, outcome)),
                 out);
            if (!outcome.feasible) {
                err << "no bargaining solution: competitive point kept (";
                for (Eigen::Index n = 0; n < outcome.rates.size(); ++n)
                    err << (n ? ", " : "") << format_number(outcome.rates(n));
                err << ")\n";
                return exit_infeasible;
            }
            return exit_ok;
        }

        if (pd->parsed()) {
            if (pd_snr && pd_snr_db)
                throw UsageError("give either '--snr' or '--snr-db', not both");
            const double snr = pd_snr ? *pd_snr : db_to_linear(pd_snr_db.value_or(30.0));
            if (pd_sweep == "snr") {
                std::ostringstream csv;
                json rows = json::array();
                csv << "snr_db,h_lim1,h_lim2\n";
                for (int i = 0; i < pd_steps; ++i) {
                    const double db = pd_steps == 1 ? pd_snr_min_db
                                                    : pd_snr_min_db + (pd_snr_max_db - pd_snr_min_db) * i / (pd_steps - 1);
                    const auto [lim1, lim2] = pd_limits(db_to_linear(db));
                    csv << format_number(db) << ',' << format_number(lim1) << ',' << format_number(lim2) << '\n';
                    rows.push_back({{"snr_db", json_number(db)}, {"h_lim1", json_number(lim1)}, {"h_lim2", json_number(lim2)}});
                }
                emit(pd_c, pd_c.format == "csv" ? csv.str() : dump(json{{"rows", rows}}), out);
                return exit_ok;
            }
            std::vector<double> hs;
            if (pd_h)
                hs.push_back(*pd_h);
            else
                for (int i = 1; i <= pd_steps; ++i)
                    hs.push_back(static_cast<double>(i) / (pd_steps + 1));
            std::ostringstream csv;
            csv << "h,T,R,P,N,region\n";
            json rows = json::array();
            for (double h : hs) {
                const auto c = pd_classify(h, snr);
                const auto& p = c.payoffs;
                csv << format_number(h) << ',' << format_number(p.temptation) << ',' << format_number(p.reward) << ','
                    << format_number(p.penalty) << ',' << format_number(p.naive) << ',' << to_string(c.region) << '\n';
                rows.push_back({{"h", json_number(h)},
                                {"T", json_number(p.temptation)},
                                {"R", json_number(p.reward)},
                                {"P", json_number(p.penalty)},
                                {"N", json_number(p.naive)},
                                {"region", to_string(c.region)},
                                {"ordering", c.ordering}});
            }
            if (pd_c.format == "csv") {
                emit(pd_c, csv.str(), out);
            } else {
                const auto [lim1, lim2] = pd_limits(snr);
                emit(pd_c,
                     dump(json{{"snr", json_number(snr)},
                               {"h_lim1", json_number(lim1)},
                               {"h_lim2", json_number(lim2)},
                               {"rows", rows}}),
                     out);
            }
            return exit_ok;
        }

        if (mac->parsed()) {
            const MacGame game(mac_power, mac_noise);
            const MixedEquilibrium ne = random_access_mixed_ne(game);
            const MacDynamics par = mac_dynamics(game, true, {0.0, 0.0});
            const MacDynamics seq = mac_dynamics(game, false, {0.0, 0.0});
            auto status = [](const MacDynamics& d) {
                return d.status == MacStatus::converged     ? std::string("Converged")
                       : d.status == MacStatus::limit_cycle ? std::string("LimitCycle")
                                                            : std::string("IterationCap");
            };
            std::vector<std::pair<double, double>> checks;
            for (double a : {0.0, 0.25, 0.5, 0.75, 1.0})
                checks.emplace_back(a, mac_deviation_gain(a, 1.0 - a, game));

            if (mac_c.format == "csv") {
                std::ostringstream csv;
                csv << "quantity,value1,value2\n";
                auto row = [&](const std::string& name, double a, double b) {
                    csv << name << ',' << format_number(a) << ',' << format_number(b) << '\n';
                };
                row("c_max_c_min", game.c_max(), game.c_min());
                row("c_sum", game.c_sum(), game.c_sum());
                row("corner_a", game.corner_a()[0], game.corner_a()[1]);
                row("corner_b", game.corner_b()[0], game.corner_b()[1]);
                for (const auto& [a, gain] : checks)
                    row("ne_gain_at_alpha1", a, gain);
                row("mixed_p_low", ne.p_low, ne.p_low);
                row("mixed_value", ne.value[0], ne.value[1]);
                row("mixed_indifference", ne.indifference, ne.indifference);
                row("parallel_average", par.average_utility[0], par.average_utility[1]);
                row("parallel_period", par.period, par.period);
                row("sequential_final", seq.trajectory.back()[0], seq.trajectory.back()[1]);
                emit(mac_c, csv.str(), out);
                return exit_ok;
            }
            json doc;
            doc["c_max"] = json_number(game.c_max());
            doc["c_min"] = json_number(game.c_min());
            doc["c_sum"] = json_number(game.c_sum());
            doc["corner_a"] = payoff_json(game.corner_a());
            doc["corner_b"] = payoff_json(game.corner_b());
            json ne_checks = json::array();
            for (const auto& [a, gain] : checks)
                ne_checks.push_back({{"alpha1", json_number(a)}, {"alpha2", json_number(1.0 - a)}, {"gain", json_number(gain)}});
            doc["ne_checks"] = ne_checks;
            doc["mixed_ne"] = {{"p_low", json_number(ne.p_low)},
                               {"value", payoff_json(ne.value)},
                               {"indifference", json_number(ne.indifference)}};
            doc["parallel"] = {{"status", status(par)},
                               {"period", par.period},
                               {"average_utility", payoff_json(par.average_utility)}};
            doc["sequential"] = {{"status", status(seq)},
                                 {"final", payoff_json({seq.trajectory.back()[0], seq.trajectory.back()[1]})},
                                 {"utility", payoff_json(seq.average_utility)}};
            emit(mac_c, dump(doc), out);
            return exit_ok;
        }

        if (poa->parsed()) {
            if (!poa_levels.empty())
                poa_cfg.cross_levels_db = parse_list(poa_levels, "--levels");
            const auto records = run_poa(poa_cfg);
            emit(poa_c, poa_c.format == "csv" ? poa_to_csv(records) : dump(poa_to_json(records)), out);
            return exit_ok;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_error;
    }
    err << "error: no subcommand given\n";
    return exit_error;
}

} // namespace icg
