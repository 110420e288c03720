#include "exitwise/report_io.hpp"

#include "exitwise/numfmt.hpp"

namespace exitwise {

namespace {

constexpr int kCsvDigits = 12;

std::string num(double v) { return format_number(v, kCsvDigits); }

std::string point_field(const std::optional<Point>& p)
{
    return p ? format_point(*p, kCsvDigits, ';') : std::string();
}

std::string join_flags(const std::vector<std::string>& flags)
{
    std::string out;
    for (std::size_t i = 0; i < flags.size(); ++i) out += (i ? "|" : "") + flags[i];
    return out;
}

nlohmann::json estimate_json(const MCEstimate& e)
{
    return {{"mean", e.mean},
            {"stderr", e.std_error},
            {"n_samples", e.n_samples},
            {"censor_rate", e.censor_rate},
            {"confidence_halfwidth_95", e.confidence_halfwidth_95},
            {"unreliable", e.unreliable}};
}

nlohmann::json sup_json(const SupResult& s)
{
    return {{"value", s.value},
            {"argmax", s.argmax ? nlohmann::json(*s.argmax) : nlohmann::json(nullptr)},
            {"points", s.points},
            {"stderr", s.std_error}};
}

}  // namespace

std::string csv_line(const std::vector<std::string>& fields)
{
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        const auto& f = fields[i];
        if (f.find_first_of(",\"\n") == std::string::npos) {
            out += f;
            continue;
        }
        out += '"';
        for (char c : f) {
            if (c == '"') out += '"';
            out += c;
        }
        out += '"';
    }
    return out;
}

const std::vector<std::string>& report_columns()
{
    static const std::vector<std::string> cols = {"scenario_id", "lhs_mean", "lhs_stderr", "rhs",     "sup1",
                                                  "sup2",        "argmax1",  "argmax2",    "margin",  "verdict",
                                                  "censor_rate", "n",        "dt",         "seed",    "flags"};
    return cols;
}

void write_report_csv(std::ostream& out, const std::vector<TheoremReport>& reports)
{
    out << csv_line(report_columns()) << '\n';
    for (const auto& r : reports) {
        out << csv_line({r.scenario_id, num(r.lhs.mean), num(r.lhs.std_error), num(r.rhs), num(r.sup1.value),
                         num(r.sup2.value), point_field(r.sup1.argmax), point_field(r.sup2.argmax), num(r.margin),
                         std::string(to_string(r.verdict)), num(r.lhs.censor_rate), std::to_string(r.n), num(r.dt),
                         std::to_string(r.seed), join_flags(r.flags)})
            << '\n';
    }
}

void write_summary_csv(std::ostream& out, const std::vector<TheoremReport>& reports)
{
    out << csv_line({"scenario_id", "lhs", "rhs", "margin", "verdict"}) << '\n';
    for (const auto& r : reports)
        out << csv_line({r.scenario_id, num(r.lhs.mean), num(r.rhs), num(r.margin), std::string(to_string(r.verdict))})
            << '\n';
}

nlohmann::json to_json(const TheoremReport& r)
{
    nlohmann::json j = {{"scenario_id", r.scenario_id},
                        {"lhs", estimate_json(r.lhs)},
                        {"rhs", r.rhs},
                        {"sup1", sup_json(r.sup1)},
                        {"sup2", sup_json(r.sup2)},
                        {"method", std::string(to_string(r.method))},
                        {"m", r.m},
                        {"margin", r.margin},
                        {"verdict", std::string(to_string(r.verdict))},
                        {"n", r.n},
                        {"dt", r.dt},
                        {"seed", r.seed},
                        {"flags", r.flags},
                        {"inputs_echo", r.inputs_echo}};
    if (r.lhs_coarse) j["lhs_coarse"] = estimate_json(*r.lhs_coarse);
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

const std::vector<std::string>& identity_columns()
{
    static const std::vector<std::string> cols = {"scenario_id", "identity", "lhs",     "rhs",
                                                  "stderr",      "z",        "n",       "dt",
                                                  "seed",        "max_path_residual",   "clamped",
                                                  "max_clamp_distance",      "flags"};
    return cols;
}

void write_identity_csv(std::ostream& out, const std::vector<IdentityReport>& reports)
{
    out << csv_line(identity_columns()) << '\n';
    for (const auto& r : reports) {
        if (!r.error.empty()) {
            out << csv_line({r.scenario_id, "error", "", "", "", "", std::to_string(r.n), num(r.dt),
                             std::to_string(r.seed), "", "", "", join_flags(r.flags)})
                << '\n';
            continue;
        }
        for (const auto& c : r.checks) {
            out << csv_line({r.scenario_id, c.name, num(c.lhs), num(c.rhs), num(c.std_error), num(c.z),
                             std::to_string(r.n), num(r.dt), std::to_string(r.seed), num(r.max_path_residual),
                             std::to_string(r.clamped), num(r.max_clamp_distance), join_flags(r.flags)})
                << '\n';
        }
    }
}

nlohmann::json to_json(const IdentityReport& r)
{
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"identity", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"stderr", c.std_error}, {"z", c.z}});
    nlohmann::json j = {{"scenario_id", r.scenario_id},
                        {"checks", checks},
                        {"n", r.n},
                        {"dt", r.dt},
                        {"seed", r.seed},
                        {"max_path_residual", r.max_path_residual},
                        {"clamped", r.clamped},
                        {"max_clamp_distance", r.max_clamp_distance},
                        {"censor_rate", r.censor_rate},
                        {"flags", r.flags}};
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

}  // namespace exitwise
