#include "exitwise/exit_sim.hpp"

#include "exitwise/errors.hpp"
#include "exitwise/numfmt.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <thread>

namespace exitwise {

namespace {

// exp(-50) ~ 2e-22 is below the resolution of a 53-bit uniform.
constexpr double kMaxBridgeExponent = 50.0;

double bridge_probability_fast(double d0, double d1, double two_over_var_dt)
{
    double prod = d0 * d1;
    if (prod <= 0.0) return 1.0;
    double e = prod * two_over_var_dt;
    return e > kMaxBridgeExponent ? 0.0 : std::exp(-e);
}

}  // namespace

double Moments::std_error() const
{
    if (count < 2) return 0.0;
    const double n = static_cast<double>(count);
    double var = (sum_sq - sum * sum / n) / (n - 1.0);
    return var > 0.0 ? std::sqrt(var / n) : 0.0;
}

MCEstimate make_estimate(const Moments& m, std::size_t censored)
{
    MCEstimate e;
    e.mean = m.mean();
    e.std_error = m.std_error();
    e.n_samples = m.count;
    e.censor_rate = m.count ? static_cast<double>(censored) / static_cast<double>(m.count) : 0.0;
    e.confidence_halfwidth_95 = 1.96 * e.std_error;
    e.unreliable = e.censor_rate > kCensorWarnRate;
    return e;
}

double default_t_max(const DiffusionModel& model, const Region& r1, const Region& r2)
{
    const double n = static_cast<double>(model.n());
    const double c = model.ellipticity_floor();
    double crude = 0.0;
    for (const Region* r : {&r1, &r2}) {
        double diam = r->diameter();
        crude = std::max(crude, diam * diam * n / (2.0 * c));
    }
    return 200.0 * crude;
}

double resolve_t_max(const SimConfig& cfg, const DiffusionModel& model, const Region& r1, const Region& r2)
{
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("sim: dt must be > 0");
    double t_max = cfg.t_max.value_or(default_t_max(model, r1, r2));
    if (!(t_max > cfg.dt) || !std::isfinite(t_max)) throw ConfigError("sim: require dt < t_max");
    if (cfg.substep_threshold < 0.0) throw ConfigError("sim: substep_threshold must be >= 0");
    return t_max;
}

double bridge_crossing_probability(double x0, double x1, double barrier, double sigma_eff, double dt)
{
    return bridge_probability_fast(x0 - barrier, x1 - barrier, 2.0 / (sigma_eff * sigma_eff * dt));
}

CoupledExitSimulator::CoupledExitSimulator(const DiffusionModel& model, const Region& r1, const Region& r2,
                                           const SimConfig& cfg)
    : model_(model),
      r1_(r1),
      r2_(r2),
      cfg_(cfg),
      t_max_(resolve_t_max(cfg, model, r1, r2)),
      n_(model.n()),
      d_(model.d()),
      x_(n_),
      x_next_(n_),
      z_(d_),
      drift_(n_),
      beta_(n_ * d_),
      cov_(n_ * n_)
{
    if (r1.dim() != n_ || r2.dim() != n_) throw ConfigError("sim: region dimension differs from model dimension");
    if (model_.is_constant()) refresh_coefficients(x_);
}

void CoupledExitSimulator::refresh_coefficients(std::span<const double> x)
{
    model_.drift(x, drift_);
    model_.diffusion(x, beta_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < d_; ++k) s += beta_[i * d_ + k] * beta_[j * d_ + k];
            cov_[i * n_ + j] = s;
        }
    }
}

double CoupledExitSimulator::crossing_probability(const Clock& clock, double h) const
{
    const Region& region = *clock.region;
    if (!contains(region, x_next_)) return 1.0;
    if (!cfg_.bridge_correction) return 0.0;

    // Both endpoints inside: probability that the bridge left in between.
    if (const auto* iv = std::get_if<Interval>(&region.shape())) {
        const double k = 2.0 / (cov_[0] * h);
        double p_lo = bridge_probability_fast(x_[0] - iv->lo, x_next_[0] - iv->lo, k);
        double p_hi = bridge_probability_fast(iv->hi - x_[0], iv->hi - x_next_[0], k);
        return 1.0 - (1.0 - p_lo) * (1.0 - p_hi);
    }
    if (const auto* box = std::get_if<Box>(&region.shape())) {
        double survive = 1.0;
        for (std::size_t a = 0; a < n_; ++a) {
            const double k = 2.0 / (cov_[a * n_ + a] * h);
            survive *= 1.0 - bridge_probability_fast(x_[a] - box->lo[a], x_next_[a] - box->lo[a], k);
            survive *= 1.0 - bridge_probability_fast(box->hi[a] - x_[a], box->hi[a] - x_next_[a], k);
        }
        return 1.0 - survive;
    }
    // Ball: half-space against the tangent plane at the boundary point
    // nearest to the step start. The plane lies outside the ball, so
    // crossing it implies an exit.
    const auto& ball = std::get<Ball>(region.shape());
    double len = 0.0;
    for (std::size_t a = 0; a < n_; ++a) len += (x_[a] - ball.center[a]) * (x_[a] - ball.center[a]);
    len = std::sqrt(len);
    if (len == 0.0) return 0.0;
    double d1 = ball.radius;
    double var = 0.0;
    for (std::size_t a = 0; a < n_; ++a) {
        double na = (x_[a] - ball.center[a]) / len;
        d1 -= na * (x_next_[a] - ball.center[a]);
        for (std::size_t b = 0; b < n_; ++b) var += na * cov_[a * n_ + b] * (x_[b] - ball.center[b]) / len;
    }
    return bridge_probability_fast(ball.radius - len, d1, 2.0 / (var * h));
}

void CoupledExitSimulator::fire(Clock& clock, double h, double t_end) const
{
    const Region& region = *clock.region;
    clock.active = false;
    clock.tau = t_end;
    Point& exit = *clock.exit;
    if (!contains(region, x_next_) || region.is_ball()) {
        exit = project_to_boundary(region, x_next_);
        return;
    }
    // Bridge exit: the face whose crossing was most likely.
    const Point lo = region.bbox_lo();
    const Point hi = region.bbox_hi();
    double best = -1.0;
    std::size_t axis = 0;
    bool at_lo = true;
    for (std::size_t a = 0; a < n_; ++a) {
        const double k = 2.0 / (cov_[a * n_ + a] * h);
        double p_lo = bridge_probability_fast(x_[a] - lo[a], x_next_[a] - lo[a], k);
        double p_hi = bridge_probability_fast(hi[a] - x_[a], hi[a] - x_next_[a], k);
        if (p_lo > best) best = p_lo, axis = a, at_lo = true;
        if (p_hi > best) best = p_hi, axis = a, at_lo = false;
    }
    exit = x_next_;
    exit[axis] = at_lo ? lo[axis] : hi[axis];
}

void CoupledExitSimulator::simulate(std::span<const double> a, Stream& stream, CoupledExitSample& out)
{
    if (a.size() != n_) throw ConfigError("sim: starting point has wrong dimension");
    out.exit_point1.resize(n_);
    out.exit_point2.resize(n_);
    Clock clocks[2] = {{&r1_, true, 0.0, false, &out.exit_point1}, {&r2_, true, 0.0, false, &out.exit_point2}};
    for (auto& c : clocks) {
        double dist = boundary_distance(*c.region, a);
        if (dist < -kStartTolerance)
            throw ConfigError("sim: starting point (" + format_point(a) + ") is outside the closure of " +
                              c.region->describe());
        if (dist <= 0.0) {
            c.active = false;
            *c.exit = project_to_boundary(*c.region, a);
        }
    }
    std::copy(a.begin(), a.end(), x_.begin());

    const double dt = cfg_.dt;
    const bool constant = model_.is_constant();
    const auto max_steps = static_cast<std::uint64_t>(std::ceil(t_max_ / dt));
    auto any_active = [&] { return clocks[0].active || clocks[1].active; };
    for (std::uint64_t step = 0; any_active() && step < max_steps; ++step) {
        if (!constant) refresh_coefficients(x_);
        int pieces = 1;
        if (cfg_.substep_threshold > 0.0) {
            double scale = 0.0;
            for (std::size_t i = 0; i < n_; ++i) scale = std::max(scale, cov_[i * n_ + i]);
            double near = std::numeric_limits<double>::infinity();
            for (const auto& c : clocks)
                if (c.active) near = std::min(near, boundary_distance(*c.region, x_));
            if (near < cfg_.substep_threshold * std::sqrt(scale * dt)) pieces = kSubsteps;
        }
        const double h = dt / pieces;
        const double sqrt_h = std::sqrt(h);
        for (int piece = 0; piece < pieces && any_active(); ++piece) {
            if (piece > 0 && !constant) refresh_coefficients(x_);
            for (auto& z : z_) z = stream.normal();
            for (std::size_t i = 0; i < n_; ++i) {
                double dx = drift_[i] * h;
                for (std::size_t k = 0; k < d_; ++k) dx += beta_[i * d_ + k] * z_[k] * sqrt_h;
                x_next_[i] = x_[i] + dx;
            }
            const double t_end =
                pieces == 1 ? static_cast<double>(step + 1) * dt
                            : (static_cast<double>(step) + static_cast<double>(piece + 1) / pieces) * dt;
            double p[2] = {0.0, 0.0};
            bool need_uniform = false;
            for (int i = 0; i < 2; ++i) {
                if (!clocks[i].active) continue;
                p[i] = crossing_probability(clocks[i], h);
                need_uniform = need_uniform || (p[i] > 0.0 && p[i] < 1.0);
            }
            // One uniform shared by both clocks, drawn after the normals and
            // only when some crossing is genuinely uncertain.
            const double u = need_uniform ? stream.uniform() : 0.5;
            for (int i = 0; i < 2; ++i)
                if (clocks[i].active && (p[i] >= 1.0 || (p[i] > 0.0 && u < p[i]))) fire(clocks[i], h, t_end);
            std::swap(x_, x_next_);
        }
    }
    for (auto& c : clocks) {
        if (c.active) {
            c.tau = t_max_;
            c.censored = true;
            *c.exit = x_;
        }
    }
    out.tau1 = clocks[0].tau;
    out.tau2 = clocks[1].tau;
    out.censored1 = clocks[0].censored;
    out.censored2 = clocks[1].censored;
    out.e1 = out.tau1 > out.tau2;
    out.e2 = out.tau2 > out.tau1;
}

CoupledExitSample simulate_coupled_exit(const DiffusionModel& model, std::span<const double> a, const Region& r1,
                                        const Region& r2, const SimConfig& cfg, Stream& stream)
{
    CoupledExitSimulator sim(model, r1, r2, cfg);
    CoupledExitSample s;
    sim.simulate(a, stream, s);
    return s;
}

namespace detail {

void run_shards(std::size_t n, std::size_t workers,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& fn)
{
    const std::size_t shards = (n + kShardSize - 1) / kShardSize;
    if (shards == 0) return;
    std::vector<std::exception_ptr> errors(shards);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t s = next++; s < shards; s = next++) {
            try {
                fn(s, s * kShardSize, std::min(n, (s + 1) * kShardSize));
            } catch (...) {
                errors[s] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(workers, 1, shards);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

namespace {

struct SampleCollector {
    std::vector<CoupledExitSample> samples;
    void add(const CoupledExitSample& s) { samples.push_back(s); }
    void merge(const SampleCollector& o) { samples.insert(samples.end(), o.samples.begin(), o.samples.end()); }
};

struct GapAccumulator {
    Moments gap;
    std::size_t censored = 0;
    void add(const CoupledExitSample& s)
    {
        gap.add(std::abs(s.tau1 - s.tau2));
        if (s.censored1 || s.censored2) ++censored;
    }
    void merge(const GapAccumulator& o)
    {
        gap.merge(o.gap);
        censored += o.censored;
    }
};

}  // namespace

std::vector<CoupledExitSample> simulate_samples(const DiffusionModel& model, const InitialCondition& a_dist,
                                                const Region& r1, const Region& r2, const SimConfig& cfg,
                                                std::size_t n)
{
    return reduce_coupled_samples(model, a_dist, r1, r2, cfg, n, SampleCollector{}).samples;
}

MCEstimate estimate_mean_abs_gap(const DiffusionModel& model, const InitialCondition& a_dist, const Region& r1,
                                 const Region& r2, const SimConfig& cfg, std::size_t n)
{
    if (n < 2) throw ConfigError("estimate_mean_abs_gap: n must be >= 2");
    auto acc = reduce_coupled_samples(model, a_dist, r1, r2, cfg, n, GapAccumulator{});
    return make_estimate(acc.gap, acc.censored);
}

}  // namespace exitwise
