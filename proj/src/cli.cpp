#include "exitwise/cli.hpp"

#include "exitwise/bound.hpp"
#include "exitwise/config.hpp"
#include "exitwise/errors.hpp"
#include "exitwise/numfmt.hpp"
#include "exitwise/report_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <thread>

namespace exitwise {

namespace {

namespace fs = std::filesystem;

constexpr const char* kExampleSweep = R"(# Brownian motion on (0,1) against (eps, 1+eps), started at 0.5.
[sweep example]
model = bm
sigma = 1
r1 = interval 0 1
shift = 0.05:0.05:0.45
a = 0.5
dt = 1e-4
n = 100000
seed = 1
)";

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n;
    std::optional<double> dt;
    std::size_t workers = 0;
    std::string out_dir = ".";
    std::string format = "csv";
};

void add_common(CLI::App* cmd, Options& o, bool config_required)
{
    auto* cfg = cmd->add_option("--config", o.config, "Suite config file");
    if (config_required) cfg->required();
    cmd->add_option("--seed", o.seed, "Override the seed of every scenario");
    cmd->add_option("--n", o.n, "Override the path count of every scenario")->check(CLI::Range(2ul, 1ul << 40));
    cmd->add_option("--dt", o.dt, "Override the time step of every scenario")->check(CLI::PositiveNumber);
    cmd->add_option("--workers", o.workers, "Worker threads (results do not depend on it)")
        ->envname("EXITWISE_WORKERS");
    cmd->add_option("--out", o.out_dir, "Output directory");
    cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json", "both"}));
}

std::vector<ScenarioSpec> load_suite(const Options& o, const char* fallback)
{
    auto suite = o.config.empty() ? parse_config(fallback, "<builtin example>") : load_config(o.config);
    std::size_t workers = o.workers ? o.workers : std::max(1u, std::thread::hardware_concurrency());
    for (auto& s : suite) {
        if (o.seed) s.sim.seed = *o.seed;
        if (o.n) s.n = *o.n;
        if (o.dt) {
            s.sim.dt = *o.dt;
            if (s.sim.t_max && !(s.sim.dt < *s.sim.t_max))
                throw ConfigError("--dt: must be smaller than t_max of scenario " + s.id);
        }
        s.sim.workers = workers;
    }
    return suite;
}

bool want_csv(const Options& o) { return o.format == "csv" || o.format == "both"; }
bool want_json(const Options& o) { return o.format == "json" || o.format == "both"; }

std::ofstream open_out(const Options& o, const std::string& name)
{
    fs::create_directories(o.out_dir);
    std::ofstream f(fs::path(o.out_dir) / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + (fs::path(o.out_dir) / name).string() + "'");
    return f;
}

std::string file_safe(std::string id)
{
    for (char& c : id)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' || c == '=')) c = '_';
    return id;
}

int emit_bound(const Options& o, const std::vector<TheoremReport>& reports, const std::string& stem, bool summary,
               std::ostream& out, std::ostream& err)
{
    if (want_csv(o)) {
        auto f = open_out(o, stem + ".csv");
        write_report_csv(f, reports);
        if (summary) {
            auto s = open_out(o, stem + "_summary.csv");
            write_summary_csv(s, reports);
        }
    }
    if (want_json(o)) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : reports) arr.push_back(to_json(r));
        auto f = open_out(o, stem + ".json");
        f << arr.dump(2) << '\n';
    }
    {
        auto f = open_out(o, stem + "_inputs.cfg");
        for (const auto& r : reports) f << r.inputs_echo << '\n';
    }

    bool any_error = false, any_violated = false;
    out << std::left << std::setw(28) << "scenario" << std::setw(16) << "lhs" << std::setw(14) << "stderr"
        << std::setw(14) << "rhs" << "verdict\n";
    for (const auto& r : reports) {
        out << std::left << std::setw(28) << r.scenario_id << std::setw(16) << format_number(r.lhs.mean, 8)
            << std::setw(14) << format_number(r.lhs.std_error, 4) << std::setw(14) << format_number(r.rhs, 8)
            << to_string(r.verdict) << '\n';
        if (r.verdict == Verdict::error) {
            err << "scenario " << r.scenario_id << ": " << r.error << '\n';
            any_error = true;
        }
        any_violated = any_violated || r.verdict == Verdict::violated;
    }
    if (any_error) return kExitConfigError;
    return any_violated ? kExitViolated : kExitOk;
}

int cmd_bound(const Options& o, bool sweep, std::ostream& out, std::ostream& err)
{
    auto suite = load_suite(o, kExampleSweep);
    auto reports = run_scenario_suite(suite);
    return emit_bound(o, reports, sweep ? "sweep" : "bound", sweep, out, err);
}

int cmd_identities(const Options& o, std::ostream& out, std::ostream& err)
{
    auto suite = load_suite(o, kExampleSweep);
    std::vector<IdentityReport> reports;
    bool any_error = false, any_large = false;
    for (const auto& s : suite) {
        try {
            reports.push_back(verify_scenario_identities(s));
        } catch (const std::exception& e) {
            IdentityReport r;
            r.scenario_id = s.id;
            r.n = s.n;
            r.dt = s.sim.dt;
            r.seed = s.sim.seed;
            r.error = e.what();
            r.flags.emplace_back("error");
            reports.push_back(std::move(r));
            err << "scenario " << s.id << ": " << e.what() << '\n';
            any_error = true;
        }
    }
    if (want_csv(o)) {
        auto f = open_out(o, "identities.csv");
        write_identity_csv(f, reports);
    }
    if (want_json(o)) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : reports) arr.push_back(to_json(r));
        auto f = open_out(o, "identities.json");
        f << arr.dump(2) << '\n';
    }
    for (const auto& r : reports) {
        if (!r.error.empty()) continue;
        out << r.scenario_id;
        for (const auto& c : r.checks) out << "  " << c.name << " z=" << format_number(c.z, 4);
        for (const auto& f : r.flags) out << "  [" << f << "]";
        out << '\n';
        any_large = any_large || !(r.max_abs_z() <= kVerdictSigmas);
    }
    if (any_error) return kExitConfigError;
    return any_large ? kExitViolated : kExitOk;
}

int cmd_mfpt(const Options& o, std::ostream& out, std::ostream& err)
{
    auto suite = load_suite(o, kExampleSweep);
    struct ProbeRow {
        std::string id;
        double x, v_fd, v_mc, se, z;
    };
    std::vector<ProbeRow> rows;
    bool any_large = false;
    for (const auto& s : suite) {
        try {
            const auto model = build_model(s.model, s.dim());
            const auto field = solve_dirichlet_fd_1d(model, *s.r1, s.fd_nodes);
            if (want_csv(o)) {
                auto f = open_out(o, "mfpt_" + file_safe(s.id) + ".csv");
                f << "x,v\n";
                for (std::size_t j = 0; j < field.grid().size(); ++j)
                    f << format_number(field.grid()[j]) << ',' << format_number(field.values()[j]) << '\n';
            }
            for (double x : s.probes) {
                if (!(field.lo() <= x && x <= field.hi()))
                    throw ConfigError("probe " + format_number(x) + " lies outside " + s.r1->describe());
                const double v_fd = field.at(x);
                const Point start{x};
                auto mc = estimate_expected_exit_mc(model, start, *s.r1, s.sim, s.probe_samples);
                double diff = mc.mean - v_fd;
                double z = mc.std_error > 0.0 ? diff / mc.std_error : (diff == 0.0 ? 0.0 : INFINITY);
                any_large = any_large || !(std::abs(z) <= kVerdictSigmas);
                rows.push_back({s.id, x, v_fd, mc.mean, mc.std_error, z});
            }
        } catch (const std::exception& e) {
            err << "scenario " << s.id << ": " << e.what() << '\n';
            return kExitConfigError;
        }
    }
    if (want_csv(o)) {
        auto f = open_out(o, "mfpt_probes.csv");
        f << csv_line({"scenario_id", "x", "v_fd", "v_mc", "mc_stderr", "z"}) << '\n';
        for (const auto& r : rows)
            f << csv_line({r.id, format_number(r.x), format_number(r.v_fd), format_number(r.v_mc),
                           format_number(r.se), format_number(r.z)})
              << '\n';
    }
    if (want_json(o)) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows)
            arr.push_back({{"scenario_id", r.id}, {"x", r.x}, {"v_fd", r.v_fd}, {"v_mc", r.v_mc},
                           {"mc_stderr", r.se}, {"z", r.z}});
        auto f = open_out(o, "mfpt_probes.json");
        f << arr.dump(2) << '\n';
    }
    for (const auto& r : rows)
        out << r.id << "  x=" << format_number(r.x) << "  v_fd=" << format_number(r.v_fd, 8)
            << "  v_mc=" << format_number(r.v_mc, 8) << "  z=" << format_number(r.z, 4) << '\n';
    return any_large ? kExitViolated : kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"exitwise: L1 distance between first exit times from two regions"};
    app.require_subcommand(1);
    Options opt;
    auto* bound = app.add_subcommand("bound", "Evaluate the exit-time bound for each scenario");
    auto* identities = app.add_subcommand("identities", "Paired Monte-Carlo checks of the proof identities");
    auto* mfpt = app.add_subcommand("mfpt", "Mean first-passage time field (FD) with MC probes");
    auto* sweep = app.add_subcommand("sweep", "Bound over a shift sweep");
    add_common(bound, opt, true);
    add_common(identities, opt, true);
    add_common(mfpt, opt, true);
    add_common(sweep, opt, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, er;
        int code = app.exit(e, o, er);
        out << o.str();
        err << er.str();
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (bound->parsed()) return cmd_bound(opt, false, out, err);
        if (sweep->parsed()) return cmd_bound(opt, true, out, err);
        if (identities->parsed()) return cmd_identities(opt, out, err);
        if (mfpt->parsed()) return cmd_mfpt(opt, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
    return kExitConfigError;
}

}  // namespace exitwise
