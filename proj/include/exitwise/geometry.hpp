// geometry.hpp - bounded open regions (interval, box, ball) and the spatial
// queries used by exit detection and sup evaluation.
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace exitwise {

using Point = std::vector<double>;

struct Interval {
    double lo;
    double hi;
};

struct Box {
    Point lo;
    Point hi;
};

struct Ball {
    Point center;
    double radius;
};

/// A bounded, open, nonempty region D with boundary Γ = ∂D.
///
/// Construction validates the shape (finite coordinates, lo < hi, radius > 0);
/// a Region is immutable afterwards and may be shared between threads.
class Region {
public:
    using Shape = std::variant<Interval, Box, Ball>;

    static Region interval(double lo, double hi);
    static Region box(Point lo, Point hi);
    static Region ball(Point center, double radius);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t dim() const noexcept;
    bool is_interval() const noexcept { return std::holds_alternative<Interval>(shape_); }
    bool is_box() const noexcept { return std::holds_alternative<Box>(shape_); }
    bool is_ball() const noexcept { return std::holds_alternative<Ball>(shape_); }

    /// Euclidean diameter.
    double diameter() const noexcept;

    /// Lower/upper corner of the axis-aligned bounding box.
    Point bbox_lo() const;
    Point bbox_hi() const;

    /// Human-readable form, e.g. "interval 0 1" (same syntax the config parser reads).
    std::string describe() const;

private:
    explicit Region(Shape s) : shape_(std::move(s)) {}
    Shape shape_;
};

bool operator==(const Region& a, const Region& b);

bool contains(const Region& region, std::span<const double> x);

/// Signed distance: positive inside, negative outside, zero on Γ. Exact
/// Euclidean for interval and ball; for a box, the L∞ signed distance.
double boundary_distance(const Region& region, std::span<const double> x);

/// Nearest point of Γ to x (for a box outside point: the clamp; inside: the
/// nearest face).
Point project_to_boundary(const Region& region, std::span<const double> x);

/// The region moved by `delta` along coordinate `axis`.
Region translated(const Region& region, std::size_t axis, double delta);

/// closure(inner) ⊆ closure(outer).
bool closure_within(const Region& inner, const Region& outer);

/// Up to m points of ∂(outer) lying strictly inside inner. Exact for 1D;
/// deterministic stratified sampling of the boundary otherwise.
std::vector<Point> boundary_intersection_points(const Region& inner, const Region& outer,
                                                std::size_t m);

}  // namespace exitwise
