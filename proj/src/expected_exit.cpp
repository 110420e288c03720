#include "exitwise/expected_exit.hpp"

#include "exitwise/errors.hpp"
#include "exitwise/numfmt.hpp"

#include <algorithm>
#include <cmath>

namespace exitwise {

double closed_form_interval_bm(double x, double lo, double hi, double sigma)
{
    if (!(sigma > 0.0)) throw DomainError("closed_form_interval_bm: sigma must be > 0");
    if (!(lo <= x && x <= hi)) throw DomainError("closed_form_interval_bm: x outside [lo, hi]");
    return (x - lo) * (hi - x) / (sigma * sigma);
}

OperatorCoefficients operator_coefficients(const DiffusionModel& model, const std::vector<double>& grid)
{
    if (model.n() != 1) throw ConfigError("fd: model must be one-dimensional");
    OperatorCoefficients c;
    c.drift.reserve(grid.size());
    c.b.reserve(grid.size());
    for (double x : grid) {
        const double xs[1] = {x};
        c.drift.push_back(model.drift_at(xs)[0]);
        c.b.push_back(model.covariance(xs)[0]);
        if (!(c.b.back() > 0.0)) throw ConfigError("fd: b(x) = beta(x)^2 must be positive at every node");
    }
    return c;
}

std::size_t peclet_node_count(const OperatorCoefficients& coef, double length)
{
    double worst = 0.0;
    for (std::size_t j = 0; j < coef.b.size(); ++j) worst = std::max(worst, std::abs(coef.drift[j]) / coef.b[j]);
    return std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil(length * worst)) + 1);
}

ExpectedExitField::ExpectedExitField(double lo, double hi, std::vector<double> grid, std::vector<double> values)
    : lo_(lo), hi_(hi), grid_(std::move(grid)), values_(std::move(values))
{
    if (grid_.size() < 2 || grid_.size() != values_.size())
        throw ConfigError("field: grid and values must have the same length >= 2");
}

double ExpectedExitField::at(double x) const
{
    if (!(lo_ <= x && x <= hi_)) throw DomainError("field: x = " + format_number(x) + " outside the region");
    const std::size_t cells = grid_.size() - 1;
    const double h = (hi_ - lo_) / static_cast<double>(cells);
    auto j = static_cast<std::size_t>(std::clamp((x - lo_) / h, 0.0, static_cast<double>(cells)));
    j = std::min(j, cells - 1);
    double t = std::clamp((x - grid_[j]) / (grid_[j + 1] - grid_[j]), 0.0, 1.0);
    return (1.0 - t) * values_[j] + t * values_[j + 1];
}

double ExpectedExitField::clamped(double x, double* outside_by) const
{
    double out = 0.0;
    if (x < lo_) out = lo_ - x;
    if (x > hi_) out = x - hi_;
    if (outside_by) *outside_by = out;
    return out > 0.0 ? 0.0 : at(x);
}

ExpectedExitField solve_dirichlet_fd_1d(const DiffusionModel& model, const Region& region, std::size_t m)
{
    if (model.n() != 1 || region.dim() != 1) throw ConfigError("fd: model and region must be one-dimensional");
    if (m < 3) throw ConfigError("fd: need at least 3 nodes");
    const double lo = region.bbox_lo()[0];
    const double hi = region.bbox_hi()[0];
    const double h = (hi - lo) / static_cast<double>(m - 1);

    std::vector<double> grid(m);
    for (std::size_t j = 0; j < m; ++j) grid[j] = lo + static_cast<double>(j) * h;
    grid.back() = hi;

    const auto coef = operator_coefficients(model, grid);
    for (std::size_t j = 0; j < m; ++j) {
        if (h * std::abs(coef.drift[j]) > coef.b[j]) {
            throw ConfigError("fd: mesh-Peclet guard failed (h*|f|/b > 1 at x = " + format_number(grid[j]) +
                              "); use at least " + std::to_string(peclet_node_count(coef, hi - lo)) + " nodes");
        }
    }

    // Tridiagonal system on the interior nodes 1..m-2, Thomas elimination.
    const std::size_t k = m - 2;
    std::vector<double> c_prime(k), d_prime(k);
    const double inv_h2 = 1.0 / (h * h);
    const double inv_2h = 1.0 / (2.0 * h);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + 1;
        const double lower = 0.5 * coef.b[j] * inv_h2 - coef.drift[j] * inv_2h;
        const double diag = -coef.b[j] * inv_h2;
        const double upper = 0.5 * coef.b[j] * inv_h2 + coef.drift[j] * inv_2h;
        double denom = diag;
        double rhs = -1.0;
        if (i > 0) {
            denom -= lower * c_prime[i - 1];
            rhs -= lower * d_prime[i - 1];
        }
        if (std::abs(denom) <= 1e-14 * std::abs(diag))
            throw SolverError("fd: singular tridiagonal system at node " + std::to_string(j));
        c_prime[i] = upper / denom;
        d_prime[i] = rhs / denom;
    }
    std::vector<double> v(m, 0.0);
    for (std::size_t i = k; i-- > 0;) {
        v[i + 1] = d_prime[i] - (i + 1 < k ? c_prime[i] * v[i + 2] : 0.0);
    }
    for (double& x : v) {
        if (x < 0.0) {
            if (x < -1e-12) throw SolverError("fd: negative expected exit time");
            x = 0.0;
        }
    }
    return ExpectedExitField(lo, hi, std::move(grid), std::move(v));
}

namespace {

struct FirstClock {
    Moments tau;
    std::size_t censored = 0;
    void add(const CoupledExitSample& s)
    {
        tau.add(s.tau1);
        if (s.censored1) ++censored;
    }
    void merge(const FirstClock& o)
    {
        tau.merge(o.tau);
        censored += o.censored;
    }
};

}  // namespace

MCEstimate estimate_expected_exit_mc(const DiffusionModel& model, std::span<const double> x, const Region& region,
                                     const SimConfig& cfg, std::size_t n)
{
    if (n < 2) throw ConfigError("estimate_expected_exit_mc: n must be >= 2");
    InitialCondition start(Point(x.begin(), x.end()));
    auto acc = reduce_coupled_samples(model, start, region, region, cfg, n, FirstClock{});
    return make_estimate(acc.tau, acc.censored);
}

std::string_view to_string(SupMethod m)
{
    return m == SupMethod::fd ? "fd" : "mc";
}

SupResult sup_expected_exit(const DiffusionModel& model, const Region& inner, const Region& outer,
                            const SimConfig& cfg, std::size_t m, const SupOptions& opts)
{
    if (m == 0) throw ConfigError("sup_expected_exit: m must be >= 1");
    const auto points = boundary_intersection_points(inner, outer, m);
    SupResult best;
    best.points = points.size();
    if (points.empty()) return best;

    std::optional<ExpectedExitField> field;
    if (opts.method == SupMethod::fd) {
        if (inner.dim() != 1) throw ConfigError("sup_expected_exit: fd method needs a 1D region; use mc");
        field = solve_dirichlet_fd_1d(model, inner, opts.fd_nodes);
    }
    bool first = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double value = 0.0;
        double se = 0.0;
        if (field) {
            value = field->at(points[i][0]);
        } else {
            // The seed depends only on the point's index, so the two sup terms
            // of a swapped region pair reuse the same streams.
            SimConfig point_cfg = cfg;
            point_cfg.seed = cfg.seed + i + 1;
            auto est = estimate_expected_exit_mc(model, points[i], inner, point_cfg, opts.mc_samples);
            value = est.mean;
            se = est.std_error;
        }
        if (first || value > best.value) {
            best.value = value;
            best.argmax = points[i];
            best.std_error = se;
            first = false;
        }
    }
    return best;
}

}  // namespace exitwise
