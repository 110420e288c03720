#include "exitwise/errors.hpp"
#include "exitwise/exit_sim.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace exitwise;

namespace {

SimConfig coarse(double dt = 1e-3, std::uint64_t seed = 5)
{
    SimConfig c;
    c.dt = dt;
    c.seed = seed;
    return c;
}

Moments tau_moments(const std::vector<CoupledExitSample>& s, bool first)
{
    Moments m;
    for (const auto& x : s) m.add(first ? x.tau1 : x.tau2);
    return m;
}

}  // namespace

TEST_SUITE("exit_sim")
{
    TEST_CASE("bridge crossing probability examples")
    {
        CHECK(bridge_crossing_probability(0.0, 0.0, 0.0, 1.0, 0.01) == 1.0);
        CHECK(bridge_crossing_probability(0.1, 0.2, 0.0, 1.0, 0.01) == doctest::Approx(std::exp(-4.0)).epsilon(1e-14));
        CHECK(bridge_crossing_probability(0.1, -0.1, 0.0, 1.0, 0.01) == 1.0);
        // Mirror image about the barrier.
        CHECK(bridge_crossing_probability(-0.1, -0.2, 0.0, 1.0, 0.01) == doctest::Approx(std::exp(-4.0)).epsilon(1e-14));
        CHECK(bridge_crossing_probability(0.1, 0.2, 0.0, 1.0, 1e-6) == 0.0);
    }

    TEST_CASE("bridge law integrates to the reflection-principle hitting probability")
    {
        // P(hit by dt) = P(x1 <= barrier) + ∫_{x1 > barrier} φ(x1) p(x0, x1) dx1.
        const double x0 = 0.1, sigma = 1.0, dt = 0.01, s = sigma * std::sqrt(dt);
        const int steps = 200000;
        const double upper = x0 + 12 * s, h = upper / steps;
        double integral = 0.0;
        for (int i = 0; i <= steps; ++i) {
            double x1 = i * h;
            double w = (i == 0 || i == steps) ? 1 : (i % 2 ? 4 : 2);
            double phi = std::exp(-0.5 * (x1 - x0) * (x1 - x0) / (s * s)) / (s * std::sqrt(2 * M_PI));
            integral += w * phi * bridge_crossing_probability(x0, x1, 0.0, sigma, dt);
        }
        integral *= h / 3;
        const double below = 0.5 * std::erfc(x0 / s / std::sqrt(2.0));
        CHECK(below + integral == doctest::Approx(oracle::reflection_hit_probability(x0, 0.0, sigma, dt)).epsilon(1e-9));
    }

    TEST_CASE("bridge law against simulated pinned bridges")
    {
        // 10⁶ bridges from 0.1 to 0.2 over dt = 0.01 on a K-point grid. Discrete
        // monitoring misses crossings; the continuity correction shifts the
        // barrier by 0.5826·σ·√(dt/K).
        const double x0 = 0.1, x1 = 0.2, dt = 0.01;
        const int K = 200;
        const std::size_t bridges = 1000000;
        std::mt19937_64 g(2024);
        std::normal_distribution<double> z;
        const double hs = std::sqrt(dt / K);
        std::vector<double> w(K + 1);
        std::size_t hits = 0;
        for (std::size_t b = 0; b < bridges; ++b) {
            w[0] = 0.0;
            for (int k = 1; k <= K; ++k) w[k] = w[k - 1] + hs * z(g);
            const double end = w[K];
            for (int k = 1; k < K; ++k) {
                double y = x0 + w[k] - (static_cast<double>(k) / K) * (end - (x1 - x0));
                if (y <= 0.0) {
                    ++hits;
                    break;
                }
            }
        }
        const double p_hat = static_cast<double>(hits) / bridges;
        const double se = std::sqrt(p_hat * (1 - p_hat) / bridges);
        const double shift = 0.5826 * hs;
        const double p_discrete = bridge_crossing_probability(x0 + shift, x1 + shift, 0.0, 1.0, dt);
        MESSAGE("pinned bridges: " << p_hat << " +- " << se << ", corrected law " << p_discrete
                                   << ", continuous law " << std::exp(-4.0));
        CHECK(std::abs(p_hat - p_discrete) <= 4 * se + 0.02 * p_discrete);
        CHECK(p_hat < std::exp(-4.0));
    }

    TEST_CASE("boundary start gives zero exit time")
    {
        auto bm = DiffusionModel::brownian(1, 1.0);
        Stream s(1, 0);
        auto r = simulate_coupled_exit(bm, Point{0.0}, Region::interval(0, 1), Region::interval(-1, 1), coarse(), s);
        CHECK(r.tau1 == 0.0);
        CHECK(r.exit_point1 == Point{0.0});
        CHECK(r.tau2 > 0.0);
        CHECK(r.e2);
        CHECK_FALSE(r.e1);
        CHECK(std::abs(std::abs(r.exit_point2[0]) - 1.0) < 1e-12);

        auto both = simulate_coupled_exit(bm, Point{0.0}, Region::interval(0, 1), Region::interval(0, 2), coarse(), s);
        CHECK(both.tau1 == 0.0);
        CHECK(both.tau2 == 0.0);
    }

    TEST_CASE("start outside the closure is rejected")
    {
        auto bm = DiffusionModel::brownian(1, 1.0);
        Stream s(1, 0);
        CHECK_THROWS_AS(simulate_coupled_exit(bm, Point{1.5}, Region::interval(0, 1), Region::interval(0, 2), coarse(), s),
                        ConfigError);
    }

    TEST_CASE("identical regions give identical clocks")
    {
        auto bm = DiffusionModel::brownian(1, 1.0);
        auto r = Region::interval(0, 1);
        auto samples = simulate_samples(bm, InitialCondition(Point{0.5}), r, r, coarse(), 2000);
        for (const auto& s : samples) {
            REQUIRE(s.tau1 == s.tau2);
            REQUIRE_FALSE(s.e1);
            REQUIRE_FALSE(s.e2);
        }
        auto gap = estimate_mean_abs_gap(bm, InitialCondition(Point{0.5}), r, r, coarse(), 2000);
        CHECK(gap.mean == 0.0);
        CHECK(gap.std_error == 0.0);
    }

    TEST_CASE("exit points lie on the boundary")
    {
        auto bm = DiffusionModel::brownian(2, 1.0);
        auto disk = Region::ball({0, 0}, 1);
        auto square = Region::box({-0.5, -0.5}, {0.8, 0.8});
        auto samples = simulate_samples(bm, InitialCondition(Point{0.1, 0.1}), disk, square, coarse(), 500);
        for (const auto& s : samples) {
            CHECK(std::abs(boundary_distance(disk, s.exit_point1)) <= 1e-9);
            CHECK(std::abs(boundary_distance(square, s.exit_point2)) <= 1e-9);
        }
    }

    TEST_CASE("results do not depend on the worker count")
    {
        auto bm = DiffusionModel::drifted_brownian({0.7}, 1.3);
        auto r1 = Region::interval(0, 1), r2 = Region::interval(0.3, 1.4);
        InitialCondition a({{0.4}, {0.6}}, {1, 3});
        auto cfg = coarse();
        auto one = simulate_samples(bm, a, r1, r2, cfg, 3500);
        cfg.workers = 3;
        auto three = simulate_samples(bm, a, r1, r2, cfg, 3500);
        REQUIRE(one.size() == three.size());
        for (std::size_t i = 0; i < one.size(); ++i) {
            REQUIRE(one[i].tau1 == three[i].tau1);
            REQUIRE(one[i].tau2 == three[i].tau2);
            REQUIRE(one[i].exit_point1 == three[i].exit_point1);
            REQUIRE(one[i].exit_point2 == three[i].exit_point2);
        }
        auto e1 = estimate_mean_abs_gap(bm, a, r1, r2, coarse(), 3500);
        cfg.workers = 4;
        auto e4 = estimate_mean_abs_gap(bm, a, r1, r2, cfg, 3500);
        CHECK(e1.mean == e4.mean);
        CHECK(e1.std_error == e4.std_error);
    }

    TEST_CASE("nested regions keep their exit order on every path")
    {
        auto check_order = [](const DiffusionModel& model, const Region& inner, const Region& outer, Point a) {
            for (bool bridge : {true, false}) {
                auto cfg = coarse(2e-3);
                cfg.bridge_correction = bridge;
                auto samples = simulate_samples(model, InitialCondition(a), inner, outer, cfg, 2000);
                for (const auto& s : samples) REQUIRE(s.tau1 <= s.tau2);
            }
        };
        auto bm1 = DiffusionModel::drifted_brownian({-0.5}, 0.8);
        check_order(bm1, Region::interval(0.2, 0.7), Region::interval(0, 1), {0.5});
        check_order(bm1, Region::interval(0, 0.5), Region::interval(0, 1), {0.3});
        auto bm2 = DiffusionModel::brownian(2, 1.0);
        check_order(bm2, Region::ball({0.1, 0}, 0.5), Region::ball({0.1, 0}, 1), {0.2, 0.1});
        check_order(bm2, Region::box({0, 0}, {0.5, 0.5}), Region::box({-0.2, -0.1}, {1, 0.7}), {0.25, 0.25});
    }

    TEST_CASE("bridge correction shortens the discrete exit time")
    {
        auto bm = DiffusionModel::brownian(1, 1.0);
        auto r = Region::interval(0, 1);
        auto cfg = coarse(1e-3);
        auto with = simulate_samples(bm, InitialCondition(Point{0.5}), r, r, cfg, 20000);
        cfg.bridge_correction = false;
        auto without = simulate_samples(bm, InitialCondition(Point{0.5}), r, r, cfg, 20000);
        auto mw = tau_moments(with, true), mo = tau_moments(without, true);
        MESSAGE("bridge " << mw.mean() << " plain " << mo.mean());
        CHECK(mo.mean() - mw.mean() > 4 * std::hypot(mw.std_error(), mo.std_error()));
        CHECK(std::abs(mw.mean() - 0.25) <= 4 * mw.std_error() + 2e-3);
    }

    TEST_CASE("halving the step changes the means by O(sqrt dt)")
    {
        auto bm = DiffusionModel::brownian(1, 1.0);
        auto r1 = Region::interval(0, 1), r2 = Region::interval(0.2, 1.2);
        const double dt = 4e-4;
        auto a = simulate_samples(bm, InitialCondition(Point{0.5}), r1, r2, coarse(dt, 17), 10000);
        auto b = simulate_samples(bm, InitialCondition(Point{0.5}), r1, r2, coarse(dt / 2, 17), 10000);
        for (bool first : {true, false}) {
            auto ma = tau_moments(a, first), mb = tau_moments(b, first);
            CHECK(std::abs(ma.mean() - mb.mean()) <= std::sqrt(dt) + 4 * std::hypot(ma.std_error(), mb.std_error()));
        }
    }

    TEST_CASE("censoring at the horizon")
    {
        auto bm = DiffusionModel::brownian(1, 1.0);
        auto r = Region::interval(0, 1);
        auto cfg = coarse(1e-3);
        cfg.t_max = 0.05;
        auto samples = simulate_samples(bm, InitialCondition(Point{0.5}), r, r, cfg, 1000);
        std::size_t censored = 0;
        for (const auto& s : samples) {
            CHECK(s.tau1 <= 0.05 + 1e-12);
            if (s.censored1) {
                ++censored;
                CHECK(s.tau1 == 0.05);
            }
        }
        CHECK(censored > 500);
        cfg.t_max = 1e-3;
        CHECK_THROWS_AS(CoupledExitSimulator(bm, r, r, cfg), ConfigError);
    }

    TEST_CASE("near-boundary sub-stepping stays consistent")
    {
        auto bm = DiffusionModel::brownian(1, 1.0);
        auto r = Region::interval(0, 1);
        auto cfg = coarse(1e-3);
        cfg.substep_threshold = 3.0;
        auto samples = simulate_samples(bm, InitialCondition(Point{0.5}), r, r, cfg, 10000);
        auto m = tau_moments(samples, true);
        CHECK(std::abs(m.mean() - 0.25) <= 4 * m.std_error() + 2e-3);
    }

    TEST_CASE("default horizon")
    {
        auto bm = DiffusionModel::brownian(1, 1.0);
        CHECK(default_t_max(bm, Region::interval(0, 1), Region::interval(0.2, 1.2)) == doctest::Approx(100.0));
    }
}
