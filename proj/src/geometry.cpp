#include "exitwise/geometry.hpp"

#include "exitwise/errors.hpp"
#include "exitwise/numfmt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace exitwise {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(std::span<const double> v, const char* what)
{
    for (double c : v) {
        if (!std::isfinite(c)) throw ConfigError(std::string(what) + ": non-finite coordinate");
    }
}

double norm(std::span<const double> v)
{
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

// Box view of an interval or box: lo/hi per axis.
struct AxisBounds {
    Point lo;
    Point hi;
};

std::optional<AxisBounds> axis_bounds(const Region& r)
{
    if (const auto* i = std::get_if<Interval>(&r.shape())) return AxisBounds{{i->lo}, {i->hi}};
    if (const auto* b = std::get_if<Box>(&r.shape())) return AxisBounds{b->lo, b->hi};
    return std::nullopt;
}

// van der Corput radical inverse, used for Halton directions in n >= 4.
double radical_inverse(std::size_t index, std::size_t base)
{
    double inv = 1.0 / static_cast<double>(base);
    double f = inv;
    double r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

constexpr std::size_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

std::vector<Point> sphere_samples(const Ball& ball, std::size_t k)
{
    const std::size_t n = ball.center.size();
    std::vector<Point> out;
    out.reserve(k);
    auto emit = [&](Point dir) {
        double len = norm(dir);
        for (std::size_t i = 0; i < n; ++i) dir[i] = ball.center[i] + ball.radius * dir[i] / len;
        out.push_back(std::move(dir));
    };
    if (n == 2) {
        for (std::size_t j = 0; j < k; ++j) {
            double theta = 2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(k);
            emit({std::cos(theta), std::sin(theta)});
        }
    } else if (n == 3) {
        // Fibonacci lattice.
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (std::size_t j = 0; j < k; ++j) {
            double z = 1.0 - (2.0 * static_cast<double>(j) + 1.0) / static_cast<double>(k);
            double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            double phi = golden * static_cast<double>(j);
            emit({rho * std::cos(phi), rho * std::sin(phi), z});
        }
    } else {
        // Radial projection of Halton points in [-1,1]^n.
        for (std::size_t j = 1; out.size() < k; ++j) {
            Point dir(n);
            for (std::size_t i = 0; i < n; ++i)
                dir[i] = 2.0 * radical_inverse(j, kPrimes[i % std::size(kPrimes)]) - 1.0;
            if (norm(dir) < 1e-3) continue;
            emit(std::move(dir));
        }
    }
    return out;
}

std::vector<Point> box_face_samples(const AxisBounds& box, std::size_t k)
{
    const std::size_t n = box.lo.size();
    const std::size_t faces = 2 * n;
    const double per_face = std::max(1.0, static_cast<double>(k) / static_cast<double>(faces));
    const auto g = static_cast<std::size_t>(
        std::ceil(std::pow(per_face, 1.0 / static_cast<double>(n - 1)) - 1e-9));
    std::vector<Point> out;
    for (std::size_t axis = 0; axis < n; ++axis) {
        for (int side = 0; side < 2; ++side) {
            // Enumerate the cell-centred g^(n-1) grid on this face.
            std::vector<std::size_t> idx(n - 1, 0);
            while (true) {
                Point p(n);
                std::size_t t = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == axis) {
                        p[i] = side == 0 ? box.lo[i] : box.hi[i];
                    } else {
                        double frac = (static_cast<double>(idx[t]) + 0.5) / static_cast<double>(g);
                        p[i] = box.lo[i] + frac * (box.hi[i] - box.lo[i]);
                        ++t;
                    }
                }
                out.push_back(std::move(p));
                std::size_t c = 0;
                while (c < idx.size() && ++idx[c] == g) idx[c++] = 0;
                if (c == idx.size()) break;
            }
        }
    }
    return out;
}

}  // namespace

Region Region::interval(double lo, double hi)
{
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("interval: non-finite endpoint");
    if (!(lo < hi)) throw ConfigError("interval: require lo < hi");
    return Region(Interval{lo, hi});
}

Region Region::box(Point lo, Point hi)
{
    if (lo.empty() || lo.size() != hi.size()) throw ConfigError("box: lo/hi dimension mismatch");
    require_finite(lo, "box");
    require_finite(hi, "box");
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(lo[i] < hi[i])) throw ConfigError("box: require lo < hi componentwise");
    }
    return Region(Box{std::move(lo), std::move(hi)});
}

Region Region::ball(Point center, double radius)
{
    if (center.empty()) throw ConfigError("ball: empty center");
    require_finite(center, "ball");
    if (!std::isfinite(radius) || !(radius > 0.0)) throw ConfigError("ball: require radius > 0");
    return Region(Ball{std::move(center), radius});
}

std::size_t Region::dim() const noexcept
{
    return std::visit(overloaded{[](const Interval&) -> std::size_t { return 1; },
                                 [](const Box& b) { return b.lo.size(); },
                                 [](const Ball& b) { return b.center.size(); }},
                      shape_);
}

double Region::diameter() const noexcept
{
    return std::visit(overloaded{[](const Interval& i) { return i.hi - i.lo; },
                                 [](const Box& b) {
                                     double s = 0.0;
                                     for (std::size_t k = 0; k < b.lo.size(); ++k)
                                         s += (b.hi[k] - b.lo[k]) * (b.hi[k] - b.lo[k]);
                                     return std::sqrt(s);
                                 },
                                 [](const Ball& b) { return 2.0 * b.radius; }},
                      shape_);
}

Point Region::bbox_lo() const
{
    return std::visit(overloaded{[](const Interval& i) { return Point{i.lo}; },
                                 [](const Box& b) { return b.lo; },
                                 [](const Ball& b) {
                                     Point p = b.center;
                                     for (double& c : p) c -= b.radius;
                                     return p;
                                 }},
                      shape_);
}

Point Region::bbox_hi() const
{
    return std::visit(overloaded{[](const Interval& i) { return Point{i.hi}; },
                                 [](const Box& b) { return b.hi; },
                                 [](const Ball& b) {
                                     Point p = b.center;
                                     for (double& c : p) c += b.radius;
                                     return p;
                                 }},
                      shape_);
}

std::string Region::describe() const
{
    return std::visit(
        overloaded{[](const Interval& i) {
                       return "interval " + format_exact(i.lo) + " " + format_exact(i.hi);
                   },
                   [](const Box& b) {
                       return "box " + format_point(b.lo, 17) + " " + format_point(b.hi, 17);
                   },
                   [](const Ball& b) {
                       return "ball " + format_point(b.center, 17) + " " + format_exact(b.radius);
                   }},
        shape_);
}

bool operator==(const Region& a, const Region& b)
{
    return std::visit(overloaded{[](const Interval& x, const Interval& y) {
                                     return x.lo == y.lo && x.hi == y.hi;
                                 },
                                 [](const Box& x, const Box& y) { return x.lo == y.lo && x.hi == y.hi; },
                                 [](const Ball& x, const Ball& y) {
                                     return x.center == y.center && x.radius == y.radius;
                                 },
                                 [](const auto&, const auto&) { return false; }},
                      a.shape(), b.shape());
}

double boundary_distance(const Region& region, std::span<const double> x)
{
    return std::visit(overloaded{[&](const Interval& i) { return std::min(x[0] - i.lo, i.hi - x[0]); },
                                 [&](const Box& b) {
                                     // Inside: nearest face. Outside: minus the largest violation.
                                     double d = std::min(x[0] - b.lo[0], b.hi[0] - x[0]);
                                     for (std::size_t k = 1; k < b.lo.size(); ++k)
                                         d = std::min({d, x[k] - b.lo[k], b.hi[k] - x[k]});
                                     return d;
                                 },
                                 [&](const Ball& b) {
                                     double s = 0.0;
                                     for (std::size_t k = 0; k < b.center.size(); ++k)
                                         s += (x[k] - b.center[k]) * (x[k] - b.center[k]);
                                     return b.radius - std::sqrt(s);
                                 }},
                      region.shape());
}

bool contains(const Region& region, std::span<const double> x)
{
    return std::visit(overloaded{[&](const Interval& i) { return i.lo < x[0] && x[0] < i.hi; },
                                 [&](const Box& b) {
                                     for (std::size_t k = 0; k < b.lo.size(); ++k)
                                         if (!(b.lo[k] < x[k] && x[k] < b.hi[k])) return false;
                                     return true;
                                 },
                                 [&](const Ball&) { return boundary_distance(region, x) > 0.0; }},
                      region.shape());
}

Point project_to_boundary(const Region& region, std::span<const double> x)
{
    return std::visit(
        overloaded{[&](const Interval& i) { return Point{(x[0] - i.lo <= i.hi - x[0]) ? i.lo : i.hi}; },
                   [&](const Box& b) {
                       Point p(x.begin(), x.end());
                       const std::size_t n = b.lo.size();
                       bool outside = false;
                       for (std::size_t k = 0; k < n; ++k) {
                           if (p[k] <= b.lo[k] || p[k] >= b.hi[k]) outside = true;
                           p[k] = std::clamp(p[k], b.lo[k], b.hi[k]);
                       }
                       if (outside) return p;
                       std::size_t best_axis = 0;
                       bool best_lo = true;
                       double best = p[0] - b.lo[0];
                       for (std::size_t k = 0; k < n; ++k) {
                           if (p[k] - b.lo[k] < best) best = p[k] - b.lo[k], best_axis = k, best_lo = true;
                           if (b.hi[k] - p[k] < best) best = b.hi[k] - p[k], best_axis = k, best_lo = false;
                       }
                       p[best_axis] = best_lo ? b.lo[best_axis] : b.hi[best_axis];
                       return p;
                   },
                   [&](const Ball& b) {
                       const std::size_t n = b.center.size();
                       Point p(n);
                       for (std::size_t k = 0; k < n; ++k) p[k] = x[k] - b.center[k];
                       double len = norm(p);
                       if (len == 0.0) {
                           p.assign(n, 0.0);
                           p[0] = 1.0;
                           len = 1.0;
                       }
                       for (std::size_t k = 0; k < n; ++k) p[k] = b.center[k] + b.radius * p[k] / len;
                       return p;
                   }},
        region.shape());
}

Region translated(const Region& region, std::size_t axis, double delta)
{
    if (axis >= region.dim()) throw ConfigError("translate: axis out of range");
    return std::visit(overloaded{[&](const Interval& i) { return Region::interval(i.lo + delta, i.hi + delta); },
                                 [&](const Box& b) {
                                     Point lo = b.lo, hi = b.hi;
                                     lo[axis] += delta;
                                     hi[axis] += delta;
                                     return Region::box(std::move(lo), std::move(hi));
                                 },
                                 [&](const Ball& b) {
                                     Point c = b.center;
                                     c[axis] += delta;
                                     return Region::ball(std::move(c), b.radius);
                                 }},
                      region.shape());
}

bool closure_within(const Region& inner, const Region& outer)
{
    if (inner.dim() != outer.dim()) return false;
    const std::size_t n = inner.dim();
    auto ib = axis_bounds(inner);
    auto ob = axis_bounds(outer);
    if (ib && ob) {
        for (std::size_t k = 0; k < n; ++k)
            if (ib->lo[k] < ob->lo[k] || ib->hi[k] > ob->hi[k]) return false;
        return true;
    }
    if (ib) {
        // Box in ball: every corner in the closed ball.
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
            Point corner(n);
            for (std::size_t k = 0; k < n; ++k) corner[k] = (mask >> k & 1) ? ib->hi[k] : ib->lo[k];
            if (boundary_distance(outer, corner) < 0.0) return false;
        }
        return true;
    }
    const auto& ball = std::get<Ball>(inner.shape());
    if (ob) {
        for (std::size_t k = 0; k < n; ++k)
            if (ball.center[k] - ball.radius < ob->lo[k] || ball.center[k] + ball.radius > ob->hi[k])
                return false;
        return true;
    }
    const auto& big = std::get<Ball>(outer.shape());
    Point diff(n);
    for (std::size_t k = 0; k < n; ++k) diff[k] = ball.center[k] - big.center[k];
    return norm(diff) + ball.radius <= big.radius;
}

std::vector<Point> boundary_intersection_points(const Region& inner, const Region& outer, std::size_t m)
{
    if (m == 0 || inner.dim() != outer.dim()) return {};
    std::vector<Point> candidates;
    if (outer.dim() == 1) {
        // Γ of a 1D region is its two endpoints; the set is exact.
        Point lo = outer.bbox_lo();
        Point hi = outer.bbox_hi();
        candidates = {lo, hi};
    } else {
        const std::size_t k = std::max<std::size_t>(64 * m, 4096);
        if (const auto* ball = std::get_if<Ball>(&outer.shape())) {
            candidates = sphere_samples(*ball, k);
        } else {
            candidates = box_face_samples(*axis_bounds(outer), k);
        }
    }
    std::vector<Point> inside;
    for (auto& p : candidates) {
        if (boundary_distance(inner, p) > 0.0) inside.push_back(std::move(p));
    }
    if (inside.size() <= m) return inside;
    std::vector<Point> thinned;
    thinned.reserve(m);
    for (std::size_t i = 0; i < m; ++i) thinned.push_back(inside[i * inside.size() / m]);
    return thinned;
}

}  // namespace exitwise
