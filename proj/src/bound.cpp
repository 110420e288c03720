#include "exitwise/bound.hpp"

#include "exitwise/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace exitwise {

std::string_view to_string(Verdict v)
{
    switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::holds_within_noise: return "holds_within_noise";
    case Verdict::violated: return "violated";
    case Verdict::error: return "error";
    }
    return "error";
}

Verdict classify(const MCEstimate& lhs, double rhs)
{
    if (lhs.mean + kVerdictSigmas * lhs.std_error <= rhs) return Verdict::holds;
    if (lhs.mean - kVerdictSigmas * lhs.std_error > rhs) return Verdict::violated;
    return Verdict::holds_within_noise;
}

TheoremReport evaluate_theorem1(const DiffusionModel& model, const InitialCondition& a_dist, const Region& r1,
                                const Region& r2, const SimConfig& cfg, std::size_t n, std::size_t m,
                                const SupOptions& sup)
{
    if (model.n() != r1.dim() || model.n() != r2.dim() || a_dist.dim() != model.n())
        throw ConfigError("bound: model, regions and initial condition must share one dimension");
    a_dist.require_in_closure(r1, r2, kStartTolerance);
    if (!model.is_constant()) {
        const Region regions[] = {r1, r2};
        model.check_ellipticity(DiffusionModel::probe_points(regions, 1000, cfg.seed));
    }

    TheoremReport rep;
    rep.n = n;
    rep.m = m;
    rep.seed = cfg.seed;
    rep.method = sup.method;
    rep.sup1 = sup_expected_exit(model, r1, r2, cfg, m, sup);
    rep.sup2 = sup_expected_exit(model, r2, r1, cfg, m, sup);
    rep.rhs = std::max({0.0, rep.sup1.value, rep.sup2.value});

    rep.lhs = estimate_mean_abs_gap(model, a_dist, r1, r2, cfg, n);
    rep.dt = cfg.dt;
    rep.verdict = classify(rep.lhs, rep.rhs);
    if (rep.verdict != Verdict::holds) {
        // Separate time-step bias from noise before settling the verdict.
        SimConfig fine = cfg;
        fine.dt = cfg.dt / 2.0;
        rep.lhs_coarse = rep.lhs;
        rep.lhs = estimate_mean_abs_gap(model, a_dist, r1, r2, fine, n);
        rep.dt = fine.dt;
        rep.verdict = classify(rep.lhs, rep.rhs);
        rep.flags.emplace_back("dt_halved");
    }
    rep.margin = rep.rhs - rep.lhs.mean;

    if (rep.lhs.unreliable) rep.flags.emplace_back("censor_warning");
    if (r1.is_box() || r2.is_box()) rep.flags.emplace_back("experimental_geometry");
    if (closure_within(r1, r2) || closure_within(r2, r1)) rep.flags.emplace_back("nested");
    if (rep.sup1.points == 0 && rep.sup2.points == 0) rep.flags.emplace_back("empty_sup_set");
    if (n < kLowSampleCount) rep.flags.emplace_back("low_n");
    return rep;
}

double IdentityReport::max_abs_z() const
{
    double z = 0.0;
    for (const auto& c : checks) z = std::max(z, std::abs(c.z));
    return z;
}

namespace {

struct IdentityAccumulator {
    const ExpectedExitField* v1 = nullptr;
    const ExpectedExitField* v2 = nullptr;
    std::array<Moments, 3> lhs, rhs, diff;
    double max_residual = 0.0;
    std::size_t clamped = 0;
    double max_clamp = 0.0;
    std::size_t censored = 0;

    void add(const CoupledExitSample& s)
    {
        const double e1 = s.e1 ? 1.0 : 0.0;
        const double e2 = s.e2 ? 1.0 : 0.0;
        double out1 = 0.0, out2 = 0.0;
        const double v1_at_exit2 = s.e1 ? v1->clamped(s.exit_point2[0], &out1) : 0.0;
        const double v2_at_exit1 = s.e2 ? v2->clamped(s.exit_point1[0], &out2) : 0.0;
        for (double o : {out1, out2}) {
            if (o > 0.0) {
                ++clamped;
                max_clamp = std::max(max_clamp, o);
            }
        }
        const double one_sided1 = e1 * (s.tau1 - s.tau2);
        const double one_sided2 = e2 * (s.tau2 - s.tau1);
        const double gap = std::abs(s.tau1 - s.tau2);
        const double pairs[3][2] = {{e1 * v1_at_exit2, one_sided1},
                                    {e2 * v2_at_exit1, one_sided2},
                                    {gap, one_sided1 + one_sided2}};
        for (int i = 0; i < 3; ++i) {
            lhs[i].add(pairs[i][0]);
            rhs[i].add(pairs[i][1]);
            diff[i].add(pairs[i][0] - pairs[i][1]);
        }
        max_residual = std::max(max_residual, std::abs(gap - (one_sided1 + one_sided2)));
        if (s.censored1 || s.censored2) ++censored;
    }

    void merge(const IdentityAccumulator& o)
    {
        for (int i = 0; i < 3; ++i) {
            lhs[i].merge(o.lhs[i]);
            rhs[i].merge(o.rhs[i]);
            diff[i].merge(o.diff[i]);
        }
        max_residual = std::max(max_residual, o.max_residual);
        clamped += o.clamped;
        max_clamp = std::max(max_clamp, o.max_clamp);
        censored += o.censored;
    }
};

double z_score(const Moments& diff)
{
    const double mean = diff.mean();
    const double se = diff.std_error();
    if (se > 0.0) return mean / se;
    if (mean == 0.0) return 0.0;
    return mean > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

}  // namespace

IdentityReport verify_proof_identities(const DiffusionModel& model, std::span<const double> a, const Region& r1,
                                       const Region& r2, const SimConfig& cfg, std::size_t n, std::size_t fd_nodes)
{
    if (model.n() != 1 || r1.dim() != 1 || r2.dim() != 1)
        throw ConfigError("identities: only one-dimensional scenarios are supported");
    if (n < 2) throw ConfigError("identities: n must be >= 2");
    const auto v1 = solve_dirichlet_fd_1d(model, r1, fd_nodes);
    const auto v2 = solve_dirichlet_fd_1d(model, r2, fd_nodes);

    IdentityAccumulator init;
    init.v1 = &v1;
    init.v2 = &v2;
    InitialCondition start(Point(a.begin(), a.end()));
    auto acc = reduce_coupled_samples(model, start, r1, r2, cfg, n, init);

    IdentityReport rep;
    rep.n = n;
    rep.dt = cfg.dt;
    rep.seed = cfg.seed;
    const char* names[3] = {"overshoot1", "overshoot2", "gap_split"};
    for (int i = 0; i < 3; ++i) {
        auto& c = rep.checks[i];
        c.name = names[i];
        c.lhs = acc.lhs[i].mean();
        c.rhs = acc.rhs[i].mean();
        c.std_error = acc.diff[i].std_error();
        c.z = z_score(acc.diff[i]);
    }
    rep.max_path_residual = acc.max_residual;
    rep.clamped = acc.clamped;
    rep.max_clamp_distance = acc.max_clamp;
    rep.censor_rate = n ? static_cast<double>(acc.censored) / static_cast<double>(n) : 0.0;
    if (rep.censor_rate > kCensorWarnRate) rep.flags.emplace_back("censor_warning");
    if (n < kLowSampleCount) rep.flags.emplace_back("low_n");
    if (rep.clamped > 0) rep.flags.emplace_back("clamped");
    return rep;
}

TheoremReport evaluate_scenario(const ScenarioSpec& s)
{
    if (!s.r1 || !s.r2) throw ConfigError("scenario " + s.id + ": both r1 and r2 are required");
    const auto model = build_model(s.model, s.dim());
    auto rep = evaluate_theorem1(model, s.initial_condition(), *s.r1, *s.r2, s.sim, s.n, s.m, s.sup_options());
    rep.scenario_id = s.id;
    rep.inputs_echo = echo(s);
    return rep;
}

IdentityReport verify_scenario_identities(const ScenarioSpec& s)
{
    if (!s.r1 || !s.r2) throw ConfigError("scenario " + s.id + ": both r1 and r2 are required");
    if (s.a.size() != 1) throw ConfigError("scenario " + s.id + ": identities need a fixed starting point");
    const auto model = build_model(s.model, s.dim());
    auto rep = verify_proof_identities(model, s.a.front(), *s.r1, *s.r2, s.sim, s.n, s.fd_nodes);
    rep.scenario_id = s.id;
    return rep;
}

std::vector<TheoremReport> run_scenario_suite(const std::vector<ScenarioSpec>& suite)
{
    if (suite.empty()) throw ConfigError("run_scenario_suite: empty suite");
    std::vector<TheoremReport> out;
    out.reserve(suite.size());
    for (const auto& s : suite) {
        try {
            out.push_back(evaluate_scenario(s));
        } catch (const std::exception& e) {
            TheoremReport rep;
            rep.scenario_id = s.id;
            rep.verdict = Verdict::error;
            rep.error = e.what();
            rep.n = s.n;
            rep.dt = s.sim.dt;
            rep.seed = s.sim.seed;
            rep.flags.emplace_back("error");
            rep.inputs_echo = echo(s);
            out.push_back(std::move(rep));
        }
    }
    return out;
}

}  // namespace exitwise
