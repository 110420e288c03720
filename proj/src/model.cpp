#include "exitwise/model.hpp"

#include "exitwise/errors.hpp"
#include "exitwise/numfmt.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace exitwise {

DiffusionModel::DiffusionModel(std::size_t n, std::size_t d, DriftFn drift, DiffusionFn diffusion,
                               double ellipticity_floor)
    : n_(n), d_(d), drift_(std::move(drift)), diffusion_(std::move(diffusion)), floor_(ellipticity_floor)
{
    if (n == 0 || d == 0) throw ConfigError("model: dimensions n and d must be positive");
    if (!drift_ || !diffusion_) throw ConfigError("model: drift and diffusion must be callable");
    if (!(ellipticity_floor > 0.0) || !std::isfinite(ellipticity_floor))
        throw ConfigError("model: ellipticity floor must be a finite c > 0");
}

DiffusionModel DiffusionModel::constant(std::vector<double> drift, std::vector<double> beta, std::size_t d,
                                        std::optional<double> ellipticity_floor)
{
    const std::size_t n = drift.size();
    if (n == 0 || d == 0 || beta.size() != n * d)
        throw ConfigError("model: beta must have n*d entries (n = drift length)");
    for (double v : drift)
        if (!std::isfinite(v)) throw ConfigError("model: non-finite drift");
    for (double v : beta)
        if (!std::isfinite(v)) throw ConfigError("model: non-finite beta");

    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> b(
        beta.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    Eigen::MatrixXd cov = b * b.transpose();
    const Eigen::VectorXd eig =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov, Eigen::EigenvaluesOnly).eigenvalues();
    const double lambda_min = eig.minCoeff();
    if (!(lambda_min > 1e-12 * eig.maxCoeff()))
        throw ConfigError("model: beta*beta^T is singular (diffusion is degenerate)");
    double c = ellipticity_floor.value_or(lambda_min);

    DiffusionModel m(
        n, d, [drift](std::span<const double>, std::span<double> out) { std::copy(drift.begin(), drift.end(), out.begin()); },
        [beta](std::span<const double>, std::span<double> out) { std::copy(beta.begin(), beta.end(), out.begin()); },
        c);
    m.constant_ = true;
    Point origin(n, 0.0);
    m.check_ellipticity(std::span<const Point>(&origin, 1));
    return m;
}

DiffusionModel DiffusionModel::brownian(std::size_t n, double sigma)
{
    return drifted_brownian(std::vector<double>(n, 0.0), sigma);
}

DiffusionModel DiffusionModel::drifted_brownian(std::vector<double> mu, double sigma)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("model: sigma must be > 0");
    const std::size_t n = mu.size();
    std::vector<double> beta(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) beta[i * n + i] = sigma;
    return constant(std::move(mu), std::move(beta), n);
}

std::vector<double> DiffusionModel::covariance(std::span<const double> x) const
{
    std::vector<double> beta(n_ * d_);
    diffusion_(x, beta);
    std::vector<double> cov(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t k = 0; k < d_; ++k) cov[i * n_ + j] += beta[i * d_ + k] * beta[j * d_ + k];
    return cov;
}

std::vector<double> DiffusionModel::drift_at(std::span<const double> x) const
{
    std::vector<double> f(n_);
    drift_(x, f);
    return f;
}

double DiffusionModel::min_covariance_eigenvalue(std::span<const double> x) const
{
    auto cov = covariance(x);
    Eigen::Map<const Eigen::MatrixXd> b(cov.data(), static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(b, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

void DiffusionModel::check_ellipticity(std::span<const Point> points) const
{
    for (const auto& x : points) {
        if (x.size() != n_) throw ConfigError("model: probe point has wrong dimension");
        double lambda = min_covariance_eigenvalue(x);
        if (!std::isfinite(lambda) || lambda < floor_ * (1.0 - 1e-12))
            throw ConfigError("model: ellipticity violated at x = (" + format_point(x) +
                              "): min eig(beta beta^T) = " + format_number(lambda) +
                              " < c = " + format_number(floor_));
    }
}

std::vector<Point> DiffusionModel::probe_points(std::span<const Region> regions, std::size_t count,
                                                std::uint64_t seed)
{
    if (regions.empty()) return {};
    Point lo = regions.front().bbox_lo();
    Point hi = regions.front().bbox_hi();
    for (const auto& r : regions.subspan(1)) {
        Point l = r.bbox_lo(), h = r.bbox_hi();
        for (std::size_t k = 0; k < lo.size() && k < l.size(); ++k) {
            lo[k] = std::min(lo[k], l[k]);
            hi[k] = std::max(hi[k], h[k]);
        }
    }
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Point> pts(count, Point(lo.size()));
    for (auto& p : pts)
        for (std::size_t k = 0; k < p.size(); ++k) p[k] = lo[k] + unif(gen) * (hi[k] - lo[k]);
    return pts;
}

InitialCondition::InitialCondition(Point a) : InitialCondition(std::vector<Point>{std::move(a)}, {1.0}) {}

InitialCondition::InitialCondition(std::vector<Point> support, std::vector<double> weights)
    : support_(std::move(support)), weights_(std::move(weights))
{
    if (support_.empty()) throw ConfigError("initial condition: empty support");
    if (weights_.size() != support_.size())
        throw ConfigError("initial condition: one weight per support point required");
    const std::size_t n = support_.front().size();
    if (n == 0) throw ConfigError("initial condition: empty point");
    for (const auto& p : support_) {
        if (p.size() != n) throw ConfigError("initial condition: support points differ in dimension");
        for (double c : p)
            if (!std::isfinite(c)) throw ConfigError("initial condition: non-finite coordinate");
    }
    double total = 0.0;
    for (double w : weights_) {
        if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("initial condition: weights must be > 0");
        total += w;
    }
    cumulative_.resize(weights_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        acc += weights_[i] / total;
        cumulative_[i] = acc;
    }
    cumulative_.back() = 1.0;
}

std::size_t InitialCondition::select(double u) const noexcept
{
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), support_.size() - 1);
}

void InitialCondition::require_in_closure(const Region& r1, const Region& r2, double tol) const
{
    for (const auto& p : support_) {
        if (p.size() != r1.dim() || p.size() != r2.dim())
            throw ConfigError("initial condition: dimension does not match the regions");
        for (const Region* r : {&r1, &r2}) {
            if (boundary_distance(*r, p) < -tol)
                throw ConfigError("initial condition: a = (" + format_point(p) + ") is outside the closure of " +
                                  r->describe());
        }
    }
}

}  // namespace exitwise
