// Independent reference computations used by the tests. None of these call
// into the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace oracle {

/// Mean exit time of σw + μt from (0, L) started at x: solution of
/// σ²/2 v'' + μ v' = −1, v(0) = v(L) = 0.
inline double drifted_interval_mfpt(double x, double L, double mu, double sigma)
{
    const double k = 2.0 * mu / (sigma * sigma);
    return -x / mu + (L / mu) * std::expm1(-k * x) / std::expm1(-k * L);
}

/// Same problem by RK4 shooting on the first-order system (v, v'), with the
/// initial slope fixed by linearity: v = v_p + s·v_h.
inline double shooting_mfpt(double x, double L, double mu, double sigma, std::size_t steps = 20000)
{
    const double a = 0.5 * sigma * sigma;
    auto integrate = [&](double v0, double dv0, double inhom, double upto) {
        double v = v0, w = dv0, t = 0.0;
        const std::size_t k = static_cast<std::size_t>(std::ceil(steps * upto / L));
        const double h = upto / std::max<std::size_t>(k, 1);
        auto rhs = [&](double, double w_) { return (-inhom - mu * w_) / a; };
        for (std::size_t i = 0; i < std::max<std::size_t>(k, 1); ++i) {
            double k1v = w, k1w = rhs(t, w);
            double k2v = w + 0.5 * h * k1w, k2w = rhs(t, w + 0.5 * h * k1w);
            double k3v = w + 0.5 * h * k2w, k3w = rhs(t, w + 0.5 * h * k2w);
            double k4v = w + h * k3w, k4w = rhs(t, w + h * k3w);
            v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
            w += h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
            t += h;
        }
        return v;
    };
    // Particular solution with v(0)=0, v'(0)=0; homogeneous with v(0)=0, v'(0)=1.
    const double vp_L = integrate(0.0, 0.0, 1.0, L);
    const double vh_L = integrate(0.0, 1.0, 0.0, L);
    const double s = -vp_L / vh_L;
    if (x <= 0.0) return 0.0;
    return integrate(0.0, s, 1.0, x);
}

/// Signed distance of x to the boundary of the box [lo, hi], by brute force
/// over a dense sampling of every face.
inline double box_distance_bruteforce(const std::vector<double>& lo, const std::vector<double>& hi,
                                      const std::vector<double>& x, std::size_t per_axis = 401)
{
    const std::size_t n = lo.size();
    bool inside = true;
    for (std::size_t k = 0; k < n; ++k) inside = inside && lo[k] < x[k] && x[k] < hi[k];
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> idx(n, 0);
    // Enumerate face points: one coordinate pinned to lo or hi, the others on a grid.
    for (std::size_t face = 0; face < 2 * n; ++face) {
        const std::size_t fk = face / 2;
        const double pinned = face % 2 ? hi[fk] : lo[fk];
        std::size_t total = 1;
        for (std::size_t k = 0; k + 1 < n; ++k) total *= per_axis;
        for (std::size_t c = 0; c < total; ++c) {
            std::size_t rem = c;
            double d2 = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                double p;
                if (k == fk) {
                    p = pinned;
                } else {
                    std::size_t i = rem % per_axis;
                    rem /= per_axis;
                    p = lo[k] + (hi[k] - lo[k]) * static_cast<double>(i) / (per_axis - 1);
                }
                d2 += (x[k] - p) * (x[k] - p);
            }
            best = std::min(best, std::sqrt(d2));
        }
    }
    return inside ? best : -best;
}

/// P(Brownian motion σw from x0 > barrier reaches the barrier within dt), by
/// the reflection principle: 2Φ(−(x0−barrier)/(σ√dt)).
inline double reflection_hit_probability(double x0, double barrier, double sigma, double dt)
{
    return std::erfc((x0 - barrier) / (sigma * std::sqrt(dt)) / std::sqrt(2.0));
}

}  // namespace oracle
