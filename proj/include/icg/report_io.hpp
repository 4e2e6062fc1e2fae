#ifndef ICG_REPORT_IO_HPP
#define ICG_REPORT_IO_HPP

#include <icg/bargaining.hpp>
#include <icg/dynamics.hpp>
#include <icg/experiments.hpp>

#include <string>
#include <vector>

#include <json.hpp>

namespace icg {

// Report documents print every number with 12 significant digits.

std::string format_number(double v);
/// `v` rounded to 12 significant digits; non-finite values map to JSON null.
nlohmann::json json_number(double v);
nlohmann::json json_matrix(const Eigen::MatrixXd& m);
nlohmann::json json_vector(const Eigen::VectorXd& v);

nlohmann::json dynamics_to_json(const DynamicsReport& report);
/// Columns: iteration,user,bin,psd,rate (rate is the user's total rate at that iteration).
std::string dynamics_to_csv(const DynamicsReport& report);

nlohmann::json bargaining_to_json(const BargainProblem& prob, const BargainingOutcome& out);
/// Two users: one row per bin in sorted order with the rate-region boundary
/// vertex reached by cutting after that bin. Otherwise one row per (user, bin).
std::string bargaining_to_csv(const BargainProblem& prob, const BargainingOutcome& out);

/// Columns: level_db,trial,r1_comp,r2_comp,r1_nbs,r2_nbs,delta_min,feasible
std::string poa_to_csv(const std::vector<PoaRecord>& records);
nlohmann::json poa_summary_to_json(const std::vector<PoaSummary>& summary);
nlohmann::json poa_to_json(const std::vector<PoaRecord>& records);

/// Rates file: { "rates": [[...], ...], "disagreement": [...] }
BargainProblem problem_from_json(const nlohmann::json& doc);
nlohmann::json problem_to_json(const BargainProblem& prob);

} // namespace icg

#endif // ICG_REPORT_IO_HPP
