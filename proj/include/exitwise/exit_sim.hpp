// exit_sim.hpp - coupled simulation of the exit times τ(Γ₁), τ(Γ₂) on one
// Euler–Maruyama path, and the sharded Monte-Carlo reduction built on it.
#pragma once

#include "exitwise/geometry.hpp"
#include "exitwise/model.hpp"
#include "exitwise/rng.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace exitwise {

struct SimConfig {
    double dt = 1e-4;
    /// Censoring horizon; unset means default_t_max().
    std::optional<double> t_max;
    bool bridge_correction = true;
    std::uint64_t seed = 1;
    /// Near-boundary sub-stepping: when the distance to the nearest active
    /// boundary is below substep_threshold·√dt·(diffusion scale) the step is
    /// split into kSubsteps pieces. 0 disables.
    double substep_threshold = 0.0;
    /// Worker threads for the sharded reduction. Never changes results.
    std::size_t workers = 1;
};

inline constexpr int kSubsteps = 4;
/// Samples per shard; each shard owns one Stream.
inline constexpr std::size_t kShardSize = 1000;
/// Censor rate above which an estimate is flagged unreliable.
inline constexpr double kCensorWarnRate = 1e-3;
/// Tolerance on the closure precondition for the starting point.
inline constexpr double kStartTolerance = 1e-9;

/// 200 × max over both regions of diameter²·n/(2c).
double default_t_max(const DiffusionModel& model, const Region& r1, const Region& r2);

/// Validates cfg (dt > 0, dt < t_max) and resolves the default horizon.
double resolve_t_max(const SimConfig& cfg, const DiffusionModel& model, const Region& r1, const Region& r2);

struct CoupledExitSample {
    double tau1 = 0.0;
    double tau2 = 0.0;
    Point exit_point1;
    Point exit_point2;
    bool censored1 = false;
    bool censored2 = false;
    /// e1 = [tau1 > tau2], e2 = [tau2 > tau1].
    bool e1 = false;
    bool e2 = false;
};

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    double censor_rate = 0.0;
    double confidence_halfwidth_95 = 0.0;
    /// censor_rate > kCensorWarnRate.
    bool unreliable = false;
};

/// Count / sum / sum of squares, merged exactly in shard order.
struct Moments {
    std::size_t count = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double v)
    {
        ++count;
        sum += v;
        sum_sq += v * v;
    }
    void merge(const Moments& o)
    {
        count += o.count;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
    double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
    /// Standard error of the mean.
    double std_error() const;
};

MCEstimate make_estimate(const Moments& m, std::size_t censored);

/// p = exp(−2·d0·d1 / (σ²·dt)) with d0, d1 the signed distances of x0, x1
/// to the barrier; 1 when the endpoints straddle or touch it.
double bridge_crossing_probability(double x0, double x1, double barrier, double sigma_eff, double dt);

/// Advances one path of the diffusion and both exit clocks until each has
/// fired or the horizon is reached. The path keeps moving after the first
/// clock fires.
///
/// Per (sub)step the stream yields d normals, then at most one uniform,
/// shared by both active clocks. The uniform is drawn iff some active clock
/// has a bridge-crossing probability strictly between 0 and 1. Sharing it
/// keeps clocks of identical regions identical and clocks of nested regions
/// ordered.
class CoupledExitSimulator {
public:
    CoupledExitSimulator(const DiffusionModel& model, const Region& r1, const Region& r2, const SimConfig& cfg);

    /// Simulates from `a`; throws ConfigError if a ∉ closure(r1) ∩ closure(r2).
    void simulate(std::span<const double> a, Stream& stream, CoupledExitSample& out);

    double t_max() const noexcept { return t_max_; }

private:
    struct Clock {
        const Region* region;
        bool active;
        double tau;
        bool censored;
        Point* exit;
    };

    void refresh_coefficients(std::span<const double> x);
    double crossing_probability(const Clock& clock, double h) const;
    void fire(Clock& clock, double h, double t_end) const;

    const DiffusionModel& model_;
    const Region& r1_;
    const Region& r2_;
    SimConfig cfg_;
    double t_max_;
    std::size_t n_;
    std::size_t d_;
    Point x_, x_next_;
    std::vector<double> z_, drift_, beta_, cov_;
};

CoupledExitSample simulate_coupled_exit(const DiffusionModel& model, std::span<const double> a, const Region& r1,
                                        const Region& r2, const SimConfig& cfg, Stream& stream);

namespace detail {
/// Runs fn(shard_id, first_sample, end_sample) for each shard of [0, n) on up
/// to `workers` threads.
void run_shards(std::size_t n, std::size_t workers,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);
}

/// Sharded Monte-Carlo over coupled samples. `Acc` supports
/// add(const CoupledExitSample&) and merge(const Acc&); shard accumulators are
/// merged in shard order, so the result is independent of cfg.workers.
template <class Acc>
Acc reduce_coupled_samples(const DiffusionModel& model, const InitialCondition& a_dist, const Region& r1,
                           const Region& r2, const SimConfig& cfg, std::size_t n, const Acc& init)
{
    a_dist.require_in_closure(r1, r2, kStartTolerance);
    const std::size_t shards = (n + kShardSize - 1) / kShardSize;
    std::vector<Acc> partial(shards, init);
    detail::run_shards(n, cfg.workers, [&](std::size_t shard, std::size_t first, std::size_t last) {
        CoupledExitSimulator sim(model, r1, r2, cfg);
        Stream stream(cfg.seed, shard);
        CoupledExitSample sample;
        for (std::size_t i = first; i < last; ++i) {
            std::size_t pick = a_dist.is_fixed() ? 0 : a_dist.select(stream.uniform());
            sim.simulate(a_dist.support()[pick], stream, sample);
            partial[shard].add(sample);
        }
    });
    Acc total = init;
    for (const auto& p : partial) total.merge(p);
    return total;
}

/// All n samples in index order (test and diagnostics helper).
std::vector<CoupledExitSample> simulate_samples(const DiffusionModel& model, const InitialCondition& a_dist,
                                                const Region& r1, const Region& r2, const SimConfig& cfg,
                                                std::size_t n);

/// E|τ(Γ₁) − τ(Γ₂)| over n coupled samples. Censored clocks enter with
/// tau = t_max and count toward censor_rate.
MCEstimate estimate_mean_abs_gap(const DiffusionModel& model, const InitialCondition& a_dist, const Region& r1,
                                 const Region& r2, const SimConfig& cfg, std::size_t n);

}  // namespace exitwise
