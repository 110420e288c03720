// report_io.hpp - CSV and JSON serialization of reports.
//
// CSV: UTF-8, header row, '.' decimal separator, 12 significant digits.
// Points are written as coordinates joined by ';'; flags joined by '|'.
#pragma once

#include "exitwise/bound.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace exitwise {

/// Bound report columns, in order.
const std::vector<std::string>& report_columns();

void write_report_csv(std::ostream& out, const std::vector<TheoremReport>& reports);

/// scenario_id, lhs, rhs, margin, verdict.
void write_summary_csv(std::ostream& out, const std::vector<TheoremReport>& reports);

nlohmann::json to_json(const TheoremReport& r);

const std::vector<std::string>& identity_columns();

void write_identity_csv(std::ostream& out, const std::vector<IdentityReport>& reports);

nlohmann::json to_json(const IdentityReport& r);

/// Joins fields with ',' quoting any that contain ',', '"' or a newline.
std::string csv_line(const std::vector<std::string>& fields);

}  // namespace exitwise
