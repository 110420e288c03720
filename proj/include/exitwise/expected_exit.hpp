// expected_exit.hpp - mean first-passage times v(x) = E τˣ(Γ), the solution
// of L v = −1 with v = 0 on Γ, by closed form, finite differences and Monte
// Carlo; and the sup terms of the L₁ bound.
#pragma once

#include "exitwise/exit_sim.hpp"
#include "exitwise/geometry.hpp"
#include "exitwise/model.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace exitwise {

/// (x − lo)(hi − x)/σ² for Brownian motion σ·w on (lo, hi). Throws
/// DomainError outside [lo, hi].
double closed_form_interval_bm(double x, double lo, double hi, double sigma);

/// Per-node drift f(x_j) and b(x_j) = β(x_j)² of a 1D model.
struct OperatorCoefficients {
    std::vector<double> drift;
    std::vector<double> b;
};

OperatorCoefficients operator_coefficients(const DiffusionModel& model, const std::vector<double>& grid);

/// Smallest node count whose spacing satisfies h·|f|/b ≤ 1 at every node of
/// the current grid (a sufficient estimate when coefficients vary slowly).
std::size_t peclet_node_count(const OperatorCoefficients& coef, double length);

/// Discretized v on a uniform grid of a 1D region. Values at both end nodes
/// are exactly zero and all values are nonnegative.
class ExpectedExitField {
public:
    ExpectedExitField(double lo, double hi, std::vector<double> grid, std::vector<double> values);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    const std::vector<double>& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Linear interpolation; throws DomainError outside [lo, hi].
    double at(double x) const;
    /// v extended by 0 outside the region. Reports how far outside x was.
    double clamped(double x, double* outside_by = nullptr) const;

private:
    double lo_;
    double hi_;
    std::vector<double> grid_;
    std::vector<double> values_;
};

/// Central differences for ½ b v'' + f v' = −1, v(lo) = v(hi) = 0, on m
/// nodes including both endpoints. Throws ConfigError when m < 3, the model
/// is not 1D, or the mesh-Péclet guard h·|f|/b ≤ 1 fails (the message names
/// a sufficient node count); SolverError if the system is singular.
ExpectedExitField solve_dirichlet_fd_1d(const DiffusionModel& model, const Region& region, std::size_t m);

/// Monte-Carlo mean of the single-region exit time from x.
MCEstimate estimate_expected_exit_mc(const DiffusionModel& model, std::span<const double> x, const Region& region,
                                     const SimConfig& cfg, std::size_t n);

enum class SupMethod { fd, mc };

std::string_view to_string(SupMethod m);

struct SupOptions {
    SupMethod method = SupMethod::fd;
    /// FD node count.
    std::size_t fd_nodes = 2001;
    /// MC paths per boundary point.
    std::size_t mc_samples = 10000;
};

struct SupResult {
    double value = 0.0;
    std::optional<Point> argmax;
    /// Boundary points actually evaluated (≤ the requested m).
    std::size_t points = 0;
    /// Monte-Carlo standard error at the argmax (0 for FD).
    double std_error = 0.0;
};

/// sup of v_inner over ∂(outer) ∩ inner, approximated by the max over
/// boundary_intersection_points(inner, outer, m). (0, none) when that set is
/// empty.
SupResult sup_expected_exit(const DiffusionModel& model, const Region& inner, const Region& outer,
                            const SimConfig& cfg, std::size_t m, const SupOptions& opts = {});

}  // namespace exitwise
