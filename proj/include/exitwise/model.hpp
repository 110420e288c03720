// model.hpp - the diffusion dy = f(y) dt + β(y) dw and its initial law.
#pragma once

#include "exitwise/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace exitwise {

/// Writes f(x) into `out` (length n).
using DriftFn = std::function<void(std::span<const double> x, std::span<double> out)>;
/// Writes β(x) into `out`, row-major n×d.
using DiffusionFn = std::function<void(std::span<const double> x, std::span<double> out)>;

/// n-dimensional diffusion driven by a d-dimensional Wiener process.
///
/// `ellipticity_floor` is the caller's claimed c with β(x)β(x)ᵀ ≥ cI.
/// Constant-coefficient models are checked on construction; for general
/// coefficient functions call check_ellipticity at probe points. Immutable
/// once built.
class DiffusionModel {
public:
    DiffusionModel(std::size_t n, std::size_t d, DriftFn drift, DiffusionFn diffusion,
                   double ellipticity_floor);

    /// Constant drift `f` (length n) and constant β (row-major n×d).
    /// The ellipticity floor defaults to the smallest eigenvalue of ββᵀ.
    static DiffusionModel constant(std::vector<double> drift, std::vector<double> beta, std::size_t d,
                                    std::optional<double> ellipticity_floor = std::nullopt);

    /// Standard Brownian motion scaled by sigma in n dimensions (f = 0, β = σI).
    static DiffusionModel brownian(std::size_t n, double sigma);

    /// Brownian motion with constant drift mu (n = mu.size()), β = σI.
    static DiffusionModel drifted_brownian(std::vector<double> mu, double sigma);

    std::size_t n() const noexcept { return n_; }
    std::size_t d() const noexcept { return d_; }
    double ellipticity_floor() const noexcept { return floor_; }

    /// True when drift and diffusion do not depend on x.
    bool is_constant() const noexcept { return constant_; }

    void drift(std::span<const double> x, std::span<double> out) const { drift_(x, out); }
    void diffusion(std::span<const double> x, std::span<double> out) const { diffusion_(x, out); }

    /// b(x) = β(x)β(x)ᵀ, row-major n×n.
    std::vector<double> covariance(std::span<const double> x) const;

    std::vector<double> drift_at(std::span<const double> x) const;

    /// Smallest eigenvalue of β(x)β(x)ᵀ.
    double min_covariance_eigenvalue(std::span<const double> x) const;

    /// Throws ConfigError if ββᵀ − cI is not positive semidefinite at any of
    /// the points (relative tolerance 1e-12).
    void check_ellipticity(std::span<const Point> points) const;

    /// Uniformly random probe points in the bounding box of the given regions,
    /// reproducible from `seed`.
    static std::vector<Point> probe_points(std::span<const Region> regions, std::size_t count,
                                           std::uint64_t seed);

private:
    std::size_t n_;
    std::size_t d_;
    DriftFn drift_;
    DiffusionFn diffusion_;
    double floor_;
    bool constant_ = false;
};

/// Law of the starting point a: a fixed point or a finite weighted list.
class InitialCondition {
public:
    explicit InitialCondition(Point a);
    InitialCondition(std::vector<Point> support, std::vector<double> weights);

    const std::vector<Point>& support() const noexcept { return support_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    bool is_fixed() const noexcept { return support_.size() == 1; }
    std::size_t dim() const noexcept { return support_.front().size(); }

    /// Support index selected by a uniform u in [0,1).
    std::size_t select(double u) const noexcept;

    /// Throws ConfigError unless every support point lies in the closure of
    /// each region (tolerance `tol` on the signed boundary distance).
    void require_in_closure(const Region& r1, const Region& r2, double tol = 1e-9) const;

private:
    std::vector<Point> support_;
    std::vector<double> weights_;
    std::vector<double> cumulative_;
};

}  // namespace exitwise
