#ifndef ICG_SCENARIO_IO_HPP
#define ICG_SCENARIO_IO_HPP

#include <icg/channel.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace icg {

class FormatError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int scenario_format_version = 1;

// Scenario document layout:
//   { "version": 1, "n_users": N, "n_bins": K,
//     "gain": [n][m][k], "noise": [n][k], "mask": [n][k]?, "budget": [n]? }
nlohmann::json scenario_to_json(const InterferenceScenario& s);
InterferenceScenario scenario_from_json(const nlohmann::json& doc);

void write_scenario(const std::filesystem::path& path, const InterferenceScenario& s);
InterferenceScenario read_scenario(const std::filesystem::path& path);

std::string dump_scenario(const InterferenceScenario& s);
InterferenceScenario parse_scenario(const std::string& text);

// Shared helpers for matrix-valued JSON fields. Errors name `field`.
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& field);
Eigen::VectorXd vector_from_json(const nlohmann::json& j, const std::string& field);
const nlohmann::json& require_field(const nlohmann::json& doc, const std::string& field);

nlohmann::json read_json_file(const std::filesystem::path& path);

} // namespace icg

#endif // ICG_SCENARIO_IO_HPP
