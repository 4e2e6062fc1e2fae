#include <icg/scenario_io.hpp>

#include <fstream>
#include <sstream>

namespace icg {

using nlohmann::json;

const json& require_field(const json& doc, const std::string& field)
{
    if (!doc.is_object())
        throw FormatError("expected a JSON object");
    auto it = doc.find(field);
    if (it == doc.end())
        throw FormatError("missing field '" + field + "'");
    return *it;
}

namespace {

double number(const json& j, const std::string& field)
{
    if (!j.is_number())
        throw FormatError("field '" + field + "' must contain numbers");
    return j.get<double>();
}

Eigen::Index count(const json& doc, const std::string& field)
{
    const json& j = require_field(doc, field);
    if (!j.is_number_integer())
        throw FormatError("field '" + field + "' must be an integer");
    return j.get<Eigen::Index>();
}

} // namespace

json matrix_to_json(const Eigen::MatrixXd& m)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& field)
{
    if (!j.is_array())
        throw FormatError("field '" + field + "' must be a 2-D array");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = rows > 0 && j[0].is_array() ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw FormatError("field '" + field + "' is ragged");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = number(row[static_cast<std::size_t>(c)], field);
    }
    return m;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& field)
{
    if (!j.is_array())
        throw FormatError("field '" + field + "' must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = number(j[i], field);
    return v;
}

json scenario_to_json(const InterferenceScenario& s)
{
    json gain = json::array();
    for (Eigen::Index n = 0; n < s.n_users; ++n) {
        json from = json::array();
        for (Eigen::Index m = 0; m < s.n_users; ++m) {
            json bins = json::array();
            for (Eigen::Index k = 0; k < s.n_bins; ++k)
                bins.push_back(s.gain[k](n, m));
            from.push_back(std::move(bins));
        }
        gain.push_back(std::move(from));
    }
    json doc = {
        {"version", scenario_format_version},
        {"n_users", s.n_users},
        {"n_bins", s.n_bins},
        {"gain", std::move(gain)},
        {"noise", matrix_to_json(s.noise)},
    };
    if (s.mask)
        doc["mask"] = matrix_to_json(*s.mask);
    if (s.budget)
        doc["budget"] = std::vector<double>(s.budget->data(), s.budget->data() + s.budget->size());
    return doc;
}

InterferenceScenario scenario_from_json(const json& doc)
{
    const json& version = require_field(doc, "version");
    if (!version.is_number_integer() || version.get<int>() != scenario_format_version)
        throw FormatError("unsupported scenario version " + version.dump() + " (expected " +
                          std::to_string(scenario_format_version) + ")");

    InterferenceScenario s;
    s.n_users = count(doc, "n_users");
    s.n_bins = count(doc, "n_bins");
    if (s.n_users < 1 || s.n_bins < 1)
        return validate_scenario(std::move(s));

    const json& gain = require_field(doc, "gain");
    if (!gain.is_array() || static_cast<Eigen::Index>(gain.size()) != s.n_users)
        throw FormatError("field 'gain' must have n_users rows");
    s.gain.assign(static_cast<std::size_t>(s.n_bins), Eigen::MatrixXd(s.n_users, s.n_users));
    for (Eigen::Index n = 0; n < s.n_users; ++n) {
        const json& from = gain[static_cast<std::size_t>(n)];
        if (!from.is_array() || static_cast<Eigen::Index>(from.size()) != s.n_users)
            throw FormatError("field 'gain' must be n_users x n_users x n_bins");
        for (Eigen::Index m = 0; m < s.n_users; ++m) {
            const json& bins = from[static_cast<std::size_t>(m)];
            if (!bins.is_array() || static_cast<Eigen::Index>(bins.size()) != s.n_bins)
                throw FormatError("field 'gain' must be n_users x n_users x n_bins");
            for (Eigen::Index k = 0; k < s.n_bins; ++k)
                s.gain[k](n, m) = number(bins[static_cast<std::size_t>(k)], "gain");
        }
    }
    s.noise = matrix_from_json(require_field(doc, "noise"), "noise");
    if (doc.contains("mask"))
        s.mask = matrix_from_json(doc["mask"], "mask");
    if (doc.contains("budget"))
        s.budget = vector_from_json(doc["budget"], "budget");
    return validate_scenario(std::move(s));
}

std::string dump_scenario(const InterferenceScenario& s)
{
    return scenario_to_json(s).dump(2) + "\n";
}

InterferenceScenario parse_scenario(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("malformed scenario document: ") + e.what());
    }
    return scenario_from_json(doc);
}

json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw FormatError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError("malformed JSON in '" + path.string() + "': " + e.what());
    }
}

void write_scenario(const std::filesystem::path& path, const InterferenceScenario& s)
{
    std::ofstream out(path);
    if (!out)
        throw FormatError("cannot write '" + path.string() + "'");
    out << dump_scenario(s);
}

InterferenceScenario read_scenario(const std::filesystem::path& path)
{
    return scenario_from_json(read_json_file(path));
}

} // namespace icg
