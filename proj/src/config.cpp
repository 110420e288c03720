#include "exitwise/config.hpp"

#include "exitwise/errors.hpp"
#include "exitwise/numfmt.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace exitwise {

namespace {

std::string_view trim(std::string_view s)
{
    const auto* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

double parse_double(std::string_view s)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v))
        throw ConfigError("expected a finite number, got '" + std::string(s) + "'");
    return v;
}

std::uint64_t parse_u64(std::string_view s)
{
    s = trim(s);
    std::uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (!s.empty() && res.ec == std::errc{} && res.ptr == s.data() + s.size()) return v;
    // Scientific notation such as 1e5.
    double d = parse_double(s);
    if (d < 0.0 || d != std::floor(d) || d > 9007199254740992.0)
        throw ConfigError("expected a nonnegative integer, got '" + std::string(s) + "'");
    return static_cast<std::uint64_t>(d);
}

std::size_t parse_count(std::string_view s)
{
    return static_cast<std::size_t>(parse_u64(s));
}

bool parse_bool(std::string_view s)
{
    s = trim(s);
    if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "off" || s == "no" || s == "0") return false;
    throw ConfigError("expected true/false, got '" + std::string(s) + "'");
}

std::vector<double> parse_list(std::string_view s, char sep)
{
    std::vector<double> out;
    for (auto part : split(s, sep)) out.push_back(parse_double(part));
    return out;
}

std::vector<Point> parse_points(std::string_view s)
{
    std::vector<Point> out;
    for (auto part : split(s, ';')) out.push_back(parse_list(part, ','));
    return out;
}

std::vector<double> parse_values(std::string_view s)
{
    s = trim(s);
    auto parts = split(s, ':');
    if (parts.size() == 3) {
        const double start = parse_double(parts[0]);
        const double step = parse_double(parts[1]);
        const double stop = parse_double(parts[2]);
        if (!(step > 0.0) || stop < start) throw ConfigError("range needs step > 0 and stop >= start");
        const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        std::vector<double> out;
        for (std::size_t k = 0; k < count; ++k) out.push_back(start + static_cast<double>(k) * step);
        return out;
    }
    if (parts.size() != 1) throw ConfigError("expected start:step:stop or a ';' list");
    return parse_list(s, ';');
}

struct Entry {
    std::string key;
    std::string value;
    std::size_t line;
};

struct Table {
    std::string kind;  // defaults | scenario | sweep
    std::string id;
    std::size_t line = 0;
    std::vector<Entry> entries;
};

struct SweepSettings {
    std::vector<double> shifts;
    std::size_t axis = 0;
    bool has_shift = false;
};

void apply(ScenarioSpec& s, SweepSettings* sweep, const std::string& key, std::string_view value)
{
    if (key == "model") {
        auto v = trim(value);
        if (v == "bm") s.model.kind = ModelKind::bm;
        else if (v == "drifted_bm") s.model.kind = ModelKind::drifted_bm;
        else if (v == "constant_matrix") s.model.kind = ModelKind::constant_matrix;
        else throw ConfigError("unknown model '" + std::string(v) + "' (bm, drifted_bm, constant_matrix)");
    } else if (key == "sigma") {
        s.model.sigma = parse_double(value);
        if (!(s.model.sigma > 0.0)) throw ConfigError("sigma must be > 0");
    } else if (key == "mu") {
        s.model.mu = parse_list(value, ',');
    } else if (key == "drift") {
        s.model.drift = parse_list(value, ',');
    } else if (key == "beta") {
        s.model.beta = parse_points(value);
    } else if (key == "r1") {
        s.r1 = parse_region(value);
    } else if (key == "r2") {
        s.r2 = parse_region(value);
    } else if (key == "a") {
        s.a = parse_points(value);
    } else if (key == "a_weights") {
        s.a_weights = parse_list(value, ';');
    } else if (key == "dt") {
        s.sim.dt = parse_double(value);
        if (!(s.sim.dt > 0.0)) throw ConfigError("dt must be > 0");
    } else if (key == "t_max") {
        s.sim.t_max = parse_double(value);
        if (!(*s.sim.t_max > 0.0)) throw ConfigError("t_max must be > 0");
    } else if (key == "bridge") {
        s.sim.bridge_correction = parse_bool(value);
    } else if (key == "substep_threshold") {
        s.sim.substep_threshold = parse_double(value);
        if (s.sim.substep_threshold < 0.0) throw ConfigError("substep_threshold must be >= 0");
    } else if (key == "seed") {
        s.sim.seed = parse_u64(value);
    } else if (key == "n") {
        s.n = parse_count(value);
        if (s.n < 2) throw ConfigError("n must be >= 2");
    } else if (key == "m") {
        s.m = parse_count(value);
        if (s.m < 1) throw ConfigError("m must be >= 1");
    } else if (key == "sup_method") {
        auto v = trim(value);
        if (v == "fd") s.sup_method = SupMethod::fd;
        else if (v == "mc") s.sup_method = SupMethod::mc;
        else throw ConfigError("sup_method must be fd or mc");
    } else if (key == "fd_nodes") {
        s.fd_nodes = parse_count(value);
        if (s.fd_nodes < 3) throw ConfigError("fd_nodes must be >= 3");
    } else if (key == "sup_mc_samples") {
        s.sup_mc_samples = parse_count(value);
        if (s.sup_mc_samples < 2) throw ConfigError("sup_mc_samples must be >= 2");
    } else if (key == "probes") {
        s.probes = parse_list(value, ';');
    } else if (key == "probe_samples") {
        s.probe_samples = parse_count(value);
        if (s.probe_samples < 2) throw ConfigError("probe_samples must be >= 2");
    } else if (sweep && key == "shift") {
        sweep->shifts = parse_values(value);
        sweep->has_shift = true;
    } else if (sweep && key == "shift_axis") {
        sweep->axis = parse_count(value);
    } else {
        throw ConfigError("unknown key");
    }
}

[[noreturn]] void fail(std::string_view source, std::size_t line, std::string_view key, std::string_view why)
{
    std::ostringstream msg;
    msg << source << ":" << line << ": ";
    if (!key.empty()) msg << "key '" << key << "': ";
    msg << why;
    throw ConfigError(msg.str());
}

const Entry* find_entry(const std::vector<const Entry*>& entries, std::string_view key)
{
    const Entry* found = nullptr;
    for (const auto* e : entries)
        if (e->key == key) found = e;
    return found;
}

// Cross-field checks, reported against the line of the relevant key.
void validate(const ScenarioSpec& s, const std::vector<const Entry*>& entries, const Table& t, std::string_view source)
{
    auto line_of = [&](std::string_view key) {
        const Entry* e = find_entry(entries, key);
        return e ? e->line : t.line;
    };
    if (!s.r1) fail(source, t.line, "r1", "missing");
    if (s.a.empty()) fail(source, t.line, "a", "missing");
    const std::size_t n = s.r1->dim();
    if (s.r2 && s.r2->dim() != n) fail(source, line_of("r2"), "r2", "dimension differs from r1");
    try {
        build_model(s.model, n);
    } catch (const ConfigError& e) {
        fail(source, line_of("model"), "model", e.what());
    }
    InitialCondition ic = [&] {
        try {
            return s.initial_condition();
        } catch (const ConfigError& e) {
            fail(source, line_of("a"), "a", e.what());
        }
    }();
    if (ic.dim() != n) fail(source, line_of("a"), "a", "dimension differs from the regions");
    for (const Region* r : {s.r1 ? &*s.r1 : nullptr, s.r2 ? &*s.r2 : nullptr}) {
        if (!r) continue;
        for (const auto& p : ic.support()) {
            if (boundary_distance(*r, p) < -kStartTolerance)
                fail(source, line_of("a"), "a",
                     "starting point (" + format_point(p) + ") lies outside the closure of " + r->describe());
        }
    }
    double t_max = s.sim.t_max.value_or(std::numeric_limits<double>::infinity());
    if (!(s.sim.dt < t_max)) fail(source, line_of("dt"), "dt", "require dt < t_max");
}

}  // namespace

Region parse_region(std::string_view text)
{
    auto words = split_ws(trim(text));
    if (words.empty()) throw ConfigError("empty region");
    const auto kind = words[0];
    if (kind == "interval") {
        if (words.size() != 3) throw ConfigError("expected 'interval LO HI'");
        return Region::interval(parse_double(words[1]), parse_double(words[2]));
    }
    if (kind == "box") {
        if (words.size() != 3) throw ConfigError("expected 'box LO1,LO2,.. HI1,HI2,..'");
        return Region::box(parse_list(words[1], ','), parse_list(words[2], ','));
    }
    if (kind == "ball") {
        if (words.size() != 3) throw ConfigError("expected 'ball C1,C2,.. RADIUS'");
        return Region::ball(parse_list(words[1], ','), parse_double(words[2]));
    }
    throw ConfigError("unknown region kind '" + std::string(kind) + "' (interval, box, ball)");
}

std::vector<ScenarioSpec> parse_config(std::string_view text, std::string_view source)
{
    std::vector<Table> tables;
    Table defaults{"defaults", "", 0, {}};
    Table* current = nullptr;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        auto hash = raw.find('#');
        auto line = trim(hash == std::string_view::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(source, line_no, "", "unterminated table header");
            auto words = split_ws(trim(line.substr(1, line.size() - 2)));
            if (words.size() == 1 && words[0] == "defaults") {
                if (!tables.empty()) fail(source, line_no, "", "[defaults] must precede all scenario tables");
                current = &defaults;
                continue;
            }
            if (words.size() != 2 || (words[0] != "scenario" && words[0] != "sweep"))
                fail(source, line_no, "", "expected [defaults], [scenario ID] or [sweep ID]");
            for (const auto& t : tables)
                if (t.id == words[1]) fail(source, line_no, "", "duplicate table id '" + std::string(words[1]) + "'");
            tables.push_back(Table{std::string(words[0]), std::string(words[1]), line_no, {}});
            current = &tables.back();
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(source, line_no, "", "expected 'key = value'");
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) fail(source, line_no, "", "empty key");
        if (!current) fail(source, line_no, key, "appears before any table header");
        for (const auto& e : current->entries)
            if (e.key == key) fail(source, line_no, key, "duplicate key (first set on line " + std::to_string(e.line) + ")");
        current->entries.push_back(Entry{key, value, line_no});
    }
    if (tables.empty()) fail(source, line_no, "", "no [scenario] or [sweep] tables");

    std::vector<ScenarioSpec> out;
    for (const auto& t : tables) {
        ScenarioSpec s;
        s.id = t.id;
        SweepSettings sweep;
        const bool is_sweep = t.kind == "sweep";
        std::vector<const Entry*> entries;
        for (const auto& e : defaults.entries) entries.push_back(&e);
        for (const auto& e : t.entries) entries.push_back(&e);
        for (const auto* e : entries) {
            try {
                apply(s, is_sweep ? &sweep : nullptr, e->key, e->value);
            } catch (const ConfigError& err) {
                fail(source, e->line, e->key, err.what());
            }
        }
        if (!is_sweep) {
            validate(s, entries, t, source);
            out.push_back(std::move(s));
            continue;
        }
        if (!sweep.has_shift) fail(source, t.line, "shift", "missing in sweep table");
        if (!s.r1) fail(source, t.line, "r1", "missing");
        if (sweep.axis >= s.r1->dim()) fail(source, t.line, "shift_axis", "out of range");
        const Region base = s.r2 ? *s.r2 : *s.r1;
        for (double shift : sweep.shifts) {
            ScenarioSpec child = s;
            child.id = t.id + "/shift=" + format_number(shift);
            try {
                child.r2 = translated(base, sweep.axis, shift);
            } catch (const ConfigError& err) {
                fail(source, t.line, "shift", err.what());
            }
            validate(child, entries, t, source);
            out.push_back(std::move(child));
        }
    }
    return out;
}

std::vector<ScenarioSpec> load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

}  // namespace exitwise
