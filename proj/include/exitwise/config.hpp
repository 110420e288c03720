// config.hpp - suite files: one table per scenario.
//
//   # comment
//   [defaults]              keys applied to every table below
//   dt = 1e-4
//
//   [scenario example]
//   model = bm              bm | drifted_bm | constant_matrix
//   sigma = 1
//   r1 = interval 0 1       interval LO HI | box LO,.. HI,.. | ball C,.. R
//   r2 = interval 0.2 1.2
//   a = 0.5                 points separated by ';', coordinates by ','
//
//   [sweep eps]             one scenario per shift value; r2 (or r1 when r2
//   r1 = interval 0 1       is absent) translated along shift_axis
//   shift = 0.05:0.05:0.45  start:step:stop or a ';' list
//
// Errors are ConfigError with "source:line: key 'name': reason".
#pragma once

#include "exitwise/scenario.hpp"

#include <filesystem>
#include <string_view>
#include <vector>

namespace exitwise {

std::vector<ScenarioSpec> parse_config(std::string_view text, std::string_view source = "<config>");

std::vector<ScenarioSpec> load_config(const std::filesystem::path& path);

/// Parses one region spec ("interval 0 1", ...).
Region parse_region(std::string_view text);

}  // namespace exitwise
