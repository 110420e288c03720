// numfmt.hpp - locale-independent number formatting for reports and echoes.
#pragma once

#include <span>
#include <string>

namespace exitwise {

/// printf "%.<digits>g" with '.' as decimal separator regardless of locale.
std::string format_number(double v, int digits = 12);

/// Exact round-trip representation (17 significant digits).
inline std::string format_exact(double v) { return format_number(v, 17); }

/// Coordinates joined by `sep`.
std::string format_point(std::span<const double> p, int digits = 12, char sep = ',');

}  // namespace exitwise
