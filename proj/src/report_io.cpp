#include <icg/report_io.hpp>
#include <icg/scenario_io.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace icg {

using nlohmann::json;

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

json json_number(double v)
{
    if (!std::isfinite(v))
        return nullptr;
    return std::strtod(format_number(v).c_str(), nullptr);
}

json json_matrix(const Eigen::MatrixXd& m)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(json_number(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

json json_vector(const Eigen::VectorXd& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(json_number(v(i)));
    return out;
}

json dynamics_to_json(const DynamicsReport& report)
{
    json doc;
    doc["status"] = to_string(report.status);
    doc["period"] = report.status == DynamicsStatus::limit_cycle ? json(report.period) : json(nullptr);
    doc["iterations"] = report.iterations;
    doc["final_allocation"] = json_matrix(report.final_allocation);
    doc["final_rates"] = report.rates.empty() ? json::array() : json_vector(report.rates.back());
    json rates = json::array();
    for (const auto& r : report.rates)
        rates.push_back(json_vector(r));
    doc["rates"] = std::move(rates);
    json trajectory = json::array();
    for (const auto& p : report.trajectory)
        trajectory.push_back(json_matrix(p));
    doc["trajectory"] = std::move(trajectory);
    return doc;
}

std::string dynamics_to_csv(const DynamicsReport& report)
{
    std::ostringstream out;
    out << "iteration,user,bin,psd,rate\n";
    auto emit = [&](std::size_t it, const Eigen::MatrixXd& p, const Eigen::VectorXd& rates) {
        for (Eigen::Index n = 0; n < p.rows(); ++n)
            for (Eigen::Index k = 0; k < p.cols(); ++k)
                out << it << ',' << n << ',' << k << ',' << format_number(p(n, k)) << ',' << format_number(rates(n))
                    << '\n';
    };
    if (!report.trajectory.empty()) {
        for (std::size_t it = 0; it < report.trajectory.size(); ++it)
            emit(it, report.trajectory[it], report.rates[it]);
    } else if (!report.rates.empty()) {
        emit(static_cast<std::size_t>(report.iterations), report.final_allocation, report.rates.back());
    }
    return out.str();
}

json bargaining_to_json(const BargainProblem& prob, const BargainingOutcome& out)
{
    json doc;
    doc["feasible"] = out.feasible;
    doc["rates"] = json_vector(out.rates);
    doc["disagreement"] = json_vector(prob.disagreement);
    doc["nash_product"] = json_number(out.nash_product);
    doc["alpha"] = json_matrix(out.alpha);
    doc["shared_bin"] = out.shared_bin ? json(*out.shared_bin) : json(nullptr);
    doc["k_s"] = nullptr;
    if (out.trace) {
        const auto& t = *out.trace;
        // sorted positions are reported 1-based
        auto one_based = [](const std::optional<Eigen::Index>& k) { return k ? json(*k + 1) : json(nullptr); };
        doc["k_s"] = out.feasible ? one_based(t.k_s) : json(nullptr);
        doc["alpha_shared"] = out.feasible && t.k_s ? json_number(out.alpha(0, t.order[static_cast<std::size_t>(*t.k_s)]))
                                                    : json(nullptr);
        json trace;
        trace["order"] = t.order;
        trace["L"] = json_vector(t.ratio);
        trace["A"] = json_vector(t.surplus_first);
        trace["B"] = json_vector(t.surplus_second);
        trace["Gamma"] = json_vector(t.threshold);
        trace["k_min"] = one_based(t.k_min);
        trace["k_max"] = one_based(t.k_max);
        trace["k_s"] = one_based(t.k_s);
        trace["g"] = json_number(t.g);
        doc["trace"] = std::move(trace);
    } else {
        doc["iterations"] = out.iterations;
        doc["kkt_residual"] = json_number(out.kkt_residual);
    }
    return doc;
}

std::string bargaining_to_csv(const BargainProblem& prob, const BargainingOutcome& out)
{
    std::ostringstream csv;
    if (out.trace && prob.n_users() == 2) {
        const auto& t = *out.trace;
        csv << "position,bin,rate1,rate2,L,A,B,Gamma,alpha1,alpha2,boundary_rate1,boundary_rate2\n";
        double cum1 = 0.0;
        double total2 = 0.0;
        for (auto k : t.order)
            total2 += prob.rates(1, k);
        double cum2 = total2;
        for (std::size_t j = 0; j < t.order.size(); ++j) {
            const Eigen::Index k = t.order[j];
            const auto jj = static_cast<Eigen::Index>(j);
            cum1 += prob.rates(0, k);
            cum2 -= prob.rates(1, k);
            csv << j + 1 << ',' << k << ',' << format_number(prob.rates(0, k)) << ','
                << format_number(prob.rates(1, k)) << ',' << format_number(t.ratio(jj)) << ','
                << format_number(t.surplus_first(jj)) << ',' << format_number(t.surplus_second(jj)) << ','
                << format_number(t.threshold(jj)) << ',' << format_number(out.alpha(0, k)) << ','
                << format_number(out.alpha(1, k)) << ',' << format_number(cum1) << ',' << format_number(cum2)
                << '\n';
        }
        return csv.str();
    }
    csv << "user,bin,rate,alpha\n";
    for (Eigen::Index n = 0; n < prob.n_users(); ++n)
        for (Eigen::Index k = 0; k < prob.n_bins(); ++k)
            csv << n << ',' << k << ',' << format_number(prob.rates(n, k)) << ',' << format_number(out.alpha(n, k))
                << '\n';
    return csv.str();
}

std::string poa_to_csv(const std::vector<PoaRecord>& records)
{
    std::ostringstream csv;
    csv << "level_db,trial,r1_comp,r2_comp,r1_nbs,r2_nbs,delta_min,feasible\n";
    for (const auto& r : records)
        csv << format_number(r.level_db) << ',' << r.trial << ',' << format_number(r.competitive(0)) << ','
            << format_number(r.competitive(1)) << ',' << format_number(r.bargaining(0)) << ','
            << format_number(r.bargaining(1)) << ',' << format_number(r.delta_min) << ',' << (r.feasible ? 1 : 0)
            << '\n';
    return csv.str();
}

json poa_summary_to_json(const std::vector<PoaSummary>& summary)
{
    json out = json::array();
    for (const auto& s : summary)
        out.push_back({{"level_db", json_number(s.level_db)},
                       {"count", s.count},
                       {"min", json_number(s.min)},
                       {"median", json_number(s.median)},
                       {"mean", json_number(s.mean)},
                       {"max", json_number(s.max)},
                       {"infeasible", s.infeasible}});
    return out;
}

json poa_to_json(const std::vector<PoaRecord>& records)
{
    json rows = json::array();
    for (const auto& r : records)
        rows.push_back({{"level_db", json_number(r.level_db)},
                        {"trial", r.trial},
                        {"r1_comp", json_number(r.competitive(0))},
                        {"r2_comp", json_number(r.competitive(1))},
                        {"r1_nbs", json_number(r.bargaining(0))},
                        {"r2_nbs", json_number(r.bargaining(1))},
                        {"delta_min", json_number(r.delta_min)},
                        {"feasible", r.feasible}});
    json doc;
    doc["records"] = std::move(rows);
    doc["summary"] = records.empty() ? json::array() : poa_summary_to_json(summarize(records));
    return doc;
}

BargainProblem problem_from_json(const json& doc)
{
    BargainProblem prob;
    prob.rates = matrix_from_json(require_field(doc, "rates"), "rates");
    prob.disagreement = vector_from_json(require_field(doc, "disagreement"), "disagreement");
    try {
        validate_problem(prob);
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
    return prob;
}

json problem_to_json(const BargainProblem& prob)
{
    json doc;
    doc["rates"] = matrix_to_json(prob.rates);
    doc["disagreement"] = std::vector<double>(prob.disagreement.data(), prob.disagreement.data() + prob.disagreement.size());
    return doc;
}

} // namespace icg
