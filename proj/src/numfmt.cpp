#include "exitwise/numfmt.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace exitwise {

std::string format_number(double v, int digits)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    // to_chars is locale-independent, unlike snprintf.
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, digits);
    if (res.ec != std::errc{}) return "nan";
    return std::string(buf, res.ptr);
}

std::string format_point(std::span<const double> p, int digits, char sep)
{
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += sep;
        out += format_number(p[i], digits);
    }
    return out;
}

}  // namespace exitwise
