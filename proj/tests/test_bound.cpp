#include "exitwise/bound.hpp"
#include "exitwise/errors.hpp"
#include "exitwise/report_io.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace exitwise;

namespace {

SimConfig sim(double dt = 1e-3, std::uint64_t seed = 1)
{
    SimConfig c;
    c.dt = dt;
    c.seed = seed;
    return c;
}

bool has_flag(const TheoremReport& r, const std::string& f)
{
    return std::find(r.flags.begin(), r.flags.end(), f) != r.flags.end();
}

std::string csv_of(const TheoremReport& r)
{
    std::ostringstream o;
    write_report_csv(o, {r});
    return o.str();
}

}  // namespace

TEST_SUITE("bound")
{
    TEST_CASE("classification rule")
    {
        MCEstimate e;
        e.mean = 1.0;
        e.std_error = 0.1;
        CHECK(classify(e, 1.4) == Verdict::holds);
        CHECK(classify(e, 1.39) == Verdict::holds_within_noise);
        CHECK(classify(e, 0.6) == Verdict::holds_within_noise);
        CHECK(classify(e, 0.59) == Verdict::violated);
    }

    TEST_CASE("identical regions")
    {
        auto bm = DiffusionModel::brownian(1, 1.0);
        auto r = Region::interval(0, 1);
        auto rep = evaluate_theorem1(bm, InitialCondition(Point{0.5}), r, r, sim(), 2000, 16);
        CHECK(rep.lhs.mean == 0.0);
        CHECK(rep.rhs == 0.0);
        CHECK(rep.verdict == Verdict::holds);
        CHECK(has_flag(rep, "nested"));
        CHECK(has_flag(rep, "empty_sup_set"));
        CHECK_FALSE(has_flag(rep, "dt_halved"));
    }

    TEST_CASE("shifted unit interval")
    {
        auto bm = DiffusionModel::brownian(1, 1.0);
        for (double eps : {0.1, 0.2}) {
            auto rep = evaluate_theorem1(bm, InitialCondition(Point{0.5}), Region::interval(0, 1),
                                         Region::interval(eps, 1 + eps), sim(1e-3, 9), 20000, 16);
            MESSAGE("eps " << eps << " lhs " << rep.lhs.mean << " +- " << rep.lhs.std_error << " rhs " << rep.rhs
                           << " " << to_string(rep.verdict));
            CHECK(std::abs(rep.rhs - eps * (1 - eps)) <= 1e-9);
            CHECK(rep.sup1.value == doctest::Approx(eps * (1 - eps)).epsilon(1e-9));
            CHECK((*rep.sup1.argmax)[0] == eps);
            CHECK((*rep.sup2.argmax)[0] == 1.0);
            CHECK(rep.verdict != Verdict::violated);
            CHECK(rep.verdict != Verdict::error);
            CHECK(rep.margin == doctest::Approx(rep.rhs - rep.lhs.mean));
            CHECK_FALSE(has_flag(rep, "nested"));
        }
    }

    TEST_CASE("non-holds verdict triggers the halved-step rerun")
    {
        // The bound is tight here, so the first pass cannot be "holds".
        auto bm = DiffusionModel::brownian(1, 1.0);
        auto rep = evaluate_theorem1(bm, InitialCondition(Point{0.5}), Region::interval(0, 1),
                                     Region::interval(0.3, 1.3), sim(2e-3, 4), 5000, 8);
        CHECK(rep.verdict != Verdict::holds);
        CHECK(has_flag(rep, "dt_halved"));
        REQUIRE(rep.lhs_coarse);
        CHECK(rep.dt == doctest::Approx(1e-3));
        CHECK(rep.lhs_coarse->mean != rep.lhs.mean);
    }

    TEST_CASE("swapping the regions keeps the report")
    {
        auto bm = DiffusionModel::drifted_brownian({0.4}, 1.2);
        auto r1 = Region::interval(0, 1), r2 = Region::interval(0.35, 1.6);
        InitialCondition a(Point{0.6});
        auto x = evaluate_theorem1(bm, a, r1, r2, sim(1e-3, 21), 4000, 16);
        auto y = evaluate_theorem1(bm, a, r2, r1, sim(1e-3, 21), 4000, 16);
        CHECK(x.rhs == y.rhs);
        CHECK(x.lhs.mean == y.lhs.mean);
        CHECK(x.lhs.std_error == y.lhs.std_error);
        CHECK(x.sup1.value == y.sup2.value);
        CHECK(x.sup2.value == y.sup1.value);
    }

    TEST_CASE("determinism of the serialized report")
    {
        auto bm = DiffusionModel::brownian(2, 1.0);
        auto r1 = Region::ball({0, 0}, 1), r2 = Region::ball({0.5, 0}, 1);
        SupOptions sup;
        sup.method = SupMethod::mc;
        sup.mc_samples = 300;
        auto run = [&](std::size_t workers) {
            auto cfg = sim(2e-3, 8);
            cfg.workers = workers;
            return evaluate_theorem1(bm, InitialCondition(Point{0.2, 0}), r1, r2, cfg, 2500, 4, sup);
        };
        auto a = run(1), b = run(1), c = run(3);
        CHECK(csv_of(a) == csv_of(b));
        CHECK(csv_of(a) == csv_of(c));
        CHECK(to_json(a).dump() == to_json(c).dump());
        CHECK(a.verdict != Verdict::violated);
    }

    TEST_CASE("flags")
    {
        auto bm = DiffusionModel::brownian(2, 1.0);
        auto rep = evaluate_theorem1(bm, InitialCondition(Point{0.3, 0.3}), Region::box({0, 0}, {1, 1}),
                                     Region::ball({0.2, 0.2}, 0.5), sim(2e-3), 10, 4,
                                     SupOptions{SupMethod::mc, 2001, 200});
        CHECK(has_flag(rep, "experimental_geometry"));
        CHECK(has_flag(rep, "low_n"));
    }

    TEST_CASE("preconditions")
    {
        auto bm = DiffusionModel::brownian(1, 1.0);
        CHECK_THROWS_AS(evaluate_theorem1(bm, InitialCondition(Point{0.1}), Region::interval(0, 1),
                                          Region::interval(0.2, 1.2), sim(), 100, 4),
                        ConfigError);
        CHECK_THROWS_AS(evaluate_theorem1(bm, InitialCondition(Point{0.1, 0.1}), Region::interval(0, 1),
                                          Region::interval(0, 1), sim(), 100, 4),
                        ConfigError);
        CHECK_THROWS_AS(run_scenario_suite({}), ConfigError);
    }

    TEST_CASE("suite captures per-scenario errors")
    {
        ScenarioSpec good;
        good.id = "good";
        good.r1 = Region::interval(0, 1);
        good.r2 = Region::interval(0.2, 1.2);
        good.a = {{0.5}};
        good.a_weights = {1};
        good.n = 1000;
        good.sim = sim(2e-3);
        ScenarioSpec bad = good;
        bad.id = "bad";
        bad.r2.reset();
        auto rows = run_scenario_suite({good, bad});
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].verdict != Verdict::error);
        CHECK(rows[1].verdict == Verdict::error);
        CHECK_FALSE(rows[1].error.empty());
    }

    TEST_CASE("random nested drifted scenarios satisfy the bound")
    {
        std::mt19937_64 g(31);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 3; ++k) {
            const double mu = -2 + 4 * u(g), sigma = 0.5 + 1.5 * u(g);
            const double lo = -1 + u(g), len = 0.5 + 1.5 * u(g);
            const double ilo = lo + 0.3 * len * u(g), ihi = lo + len - 0.3 * len * u(g);
            const double a = ilo + (ihi - ilo) * (0.2 + 0.6 * u(g));
            auto model = DiffusionModel::drifted_brownian({mu}, sigma);
            auto rep = evaluate_theorem1(model, InitialCondition(Point{a}), Region::interval(ilo, ihi),
                                         Region::interval(lo, lo + len), sim(1e-3, 100 + k), 5000, 16);
            CHECK(rep.lhs.mean <= rep.rhs + 4 * rep.lhs.std_error);
            CHECK(has_flag(rep, "nested"));
        }
    }

    TEST_CASE("identities on identical regions are all zero")
    {
        auto bm = DiffusionModel::brownian(1, 1.0);
        auto r = Region::interval(0, 1);
        auto rep = verify_proof_identities(bm, Point{0.5}, r, r, sim(), 2000);
        for (const auto& c : rep.checks) {
            CHECK(c.lhs == 0.0);
            CHECK(c.rhs == 0.0);
            CHECK(c.z == 0.0);
        }
        CHECK(rep.max_path_residual == 0.0);
    }

    TEST_CASE("identities on the shifted interval")
    {
        auto bm = DiffusionModel::brownian(1, 1.0);
        for (double eps : {0.2, 0.5}) {
            auto rep = verify_proof_identities(bm, Point{0.5}, Region::interval(0, 1), Region::interval(eps, 1 + eps),
                                               sim(1e-3, 12), 20000);
            for (const auto& c : rep.checks) {
                MESSAGE(c.name << " " << c.lhs << " vs " << c.rhs << " z " << c.z);
                CHECK(std::abs(c.z) <= 4.0);
            }
            CHECK(rep.max_path_residual == 0.0);
            CHECK(rep.checks[0].name == "overshoot1");
            CHECK(rep.checks[2].name == "gap_split");
        }
    }

    TEST_CASE("identity 8 holds on every path")
    {
        auto model = DiffusionModel::drifted_brownian({-0.8}, 1.4);
        auto samples = simulate_samples(model, InitialCondition(Point{0.45}), Region::interval(0, 1),
                                        Region::interval(0.4, 1.7), sim(1e-3, 2), 5000);
        for (const auto& s : samples) {
            const double lhs = std::abs(s.tau1 - s.tau2);
            const double rhs = (s.e1 ? s.tau1 - s.tau2 : 0.0) + (s.e2 ? s.tau2 - s.tau1 : 0.0);
            REQUIRE(lhs == rhs);
        }
    }

    TEST_CASE("identities need one dimension")
    {
        auto bm = DiffusionModel::brownian(2, 1.0);
        CHECK_THROWS_AS(verify_proof_identities(bm, Point{0, 0}, Region::ball({0, 0}, 1), Region::ball({0, 0}, 1),
                                                sim(), 100),
                        ConfigError);
    }
}
