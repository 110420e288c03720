#include "exitwise/scenario.hpp"

#include "exitwise/errors.hpp"
#include "exitwise/numfmt.hpp"

#include <sstream>

namespace exitwise {

std::string_view to_string(ModelKind k)
{
    switch (k) {
    case ModelKind::bm: return "bm";
    case ModelKind::drifted_bm: return "drifted_bm";
    case ModelKind::constant_matrix: return "constant_matrix";
    }
    return "bm";
}

DiffusionModel build_model(const ModelSpec& spec, std::size_t n)
{
    switch (spec.kind) {
    case ModelKind::bm: return DiffusionModel::brownian(n, spec.sigma);
    case ModelKind::drifted_bm: {
        std::vector<double> mu = spec.mu;
        if (mu.size() == 1 && n > 1) mu.assign(n, spec.mu[0]);
        if (mu.size() != n) throw ConfigError("model: mu must have one entry per state dimension");
        return DiffusionModel::drifted_brownian(std::move(mu), spec.sigma);
    }
    case ModelKind::constant_matrix: {
        if (spec.drift.size() != n) throw ConfigError("model: drift must have one entry per state dimension");
        if (spec.beta.size() != n) throw ConfigError("model: beta must have one row per state dimension");
        const std::size_t d = spec.beta.front().size();
        std::vector<double> flat;
        for (const auto& row : spec.beta) {
            if (row.size() != d || d == 0) throw ConfigError("model: beta rows must have equal nonzero length");
            flat.insert(flat.end(), row.begin(), row.end());
        }
        return DiffusionModel::constant(spec.drift, std::move(flat), d);
    }
    }
    throw ConfigError("model: unknown kind");
}

InitialCondition ScenarioSpec::initial_condition() const
{
    if (a.empty()) throw ConfigError("scenario " + id + ": missing initial condition 'a'");
    if (a_weights.empty()) {
        if (a.size() == 1) return InitialCondition(a.front());
        return InitialCondition(a, std::vector<double>(a.size(), 1.0));
    }
    return InitialCondition(a, a_weights);
}

SupOptions ScenarioSpec::sup_options() const
{
    SupOptions o;
    o.method = sup_method.value_or(dim() == 1 ? SupMethod::fd : SupMethod::mc);
    o.fd_nodes = fd_nodes;
    o.mc_samples = sup_mc_samples;
    return o;
}

std::size_t ScenarioSpec::dim() const
{
    if (!r1) throw ConfigError("scenario " + id + ": missing region 'r1'");
    return r1->dim();
}

std::string echo(const ScenarioSpec& s)
{
    std::ostringstream out;
    auto list = [](const std::vector<double>& v) { return format_point(v, 17, ','); };
    out << "[scenario " << s.id << "]\n";
    out << "model = " << to_string(s.model.kind) << "\n";
    switch (s.model.kind) {
    case ModelKind::bm: out << "sigma = " << format_exact(s.model.sigma) << "\n"; break;
    case ModelKind::drifted_bm:
        out << "sigma = " << format_exact(s.model.sigma) << "\n";
        out << "mu = " << list(s.model.mu) << "\n";
        break;
    case ModelKind::constant_matrix: {
        out << "drift = " << list(s.model.drift) << "\n";
        out << "beta = ";
        for (std::size_t i = 0; i < s.model.beta.size(); ++i) out << (i ? "; " : "") << list(s.model.beta[i]);
        out << "\n";
        break;
    }
    }
    if (s.r1) out << "r1 = " << s.r1->describe() << "\n";
    if (s.r2) out << "r2 = " << s.r2->describe() << "\n";
    out << "a = ";
    for (std::size_t i = 0; i < s.a.size(); ++i) out << (i ? "; " : "") << list(s.a[i]);
    out << "\n";
    if (!s.a_weights.empty()) {
        out << "a_weights = ";
        for (std::size_t i = 0; i < s.a_weights.size(); ++i) out << (i ? "; " : "") << format_exact(s.a_weights[i]);
        out << "\n";
    }
    out << "dt = " << format_exact(s.sim.dt) << "\n";
    if (s.sim.t_max) out << "t_max = " << format_exact(*s.sim.t_max) << "\n";
    out << "bridge = " << (s.sim.bridge_correction ? "true" : "false") << "\n";
    out << "substep_threshold = " << format_exact(s.sim.substep_threshold) << "\n";
    out << "seed = " << s.sim.seed << "\n";
    out << "n = " << s.n << "\n";
    out << "m = " << s.m << "\n";
    if (s.sup_method) out << "sup_method = " << to_string(*s.sup_method) << "\n";
    out << "fd_nodes = " << s.fd_nodes << "\n";
    out << "sup_mc_samples = " << s.sup_mc_samples << "\n";
    if (!s.probes.empty()) {
        out << "probes = ";
        for (std::size_t i = 0; i < s.probes.size(); ++i) out << (i ? "; " : "") << format_exact(s.probes[i]);
        out << "\n";
    }
    out << "probe_samples = " << s.probe_samples << "\n";
    return out.str();
}

}  // namespace exitwise
