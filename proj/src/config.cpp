#include "chbs/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "chbs/errors.hpp"
#include "chbs/io.hpp"

namespace chbs {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"mesh", {"n"}},
        {"scheme", {"eps", "tau", "t_end", "newton_tol", "newton_max", "splitting", "eps_list", "unregularized"}},
        {"graphs", {"bulk", "boundary", "bulk_pi_slope", "boundary_pi_slope", "rho", "c0"}},
        {"init", {"preset", "value", "mean", "amplitude", "seed", "file"}},
        {"forcing", {"preset", "amplitude", "surface_amplitude", "file"}},
        {"output", {"stride", "snapshots", "dir"}},
    };
    return keys;
}

struct Entry {
    std::string value;
    int line;
};

class Entries {
public:
    void add(const std::string& section, const std::string& key, std::string value, int line) {
        const std::string full = section + "." + key;
        if (map_.count(full)) throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
        map_.emplace(full, Entry{std::move(value), line});
    }

    const Entry* find(const std::string& full) const {
        const auto it = map_.find(full);
        return it == map_.end() ? nullptr : &it->second;
    }

    double number(const std::string& full, double fallback) const {
        const Entry* e = find(full);
        if (!e) return fallback;
        return parse_double(e->value, where(full, *e));
    }

    long long integer(const std::string& full, long long fallback) const {
        const Entry* e = find(full);
        if (!e) return fallback;
        long long v = 0;
        const char* b = e->value.data();
        const char* end = b + e->value.size();
        const auto [ptr, ec] = std::from_chars(b, end, v);
        if (e->value.empty() || ec != std::errc() || ptr != end) {
            throw ConfigError(where(full, *e) + ": '" + e->value + "' is not an integer");
        }
        return v;
    }

    std::string text(const std::string& full, std::string fallback) const {
        const Entry* e = find(full);
        return e ? e->value : std::move(fallback);
    }

    static std::string where(const std::string& full, const Entry& e) {
        return "line " + std::to_string(e.line) + ": " + full;
    }

private:
    std::map<std::string, Entry> map_;
};

Entries tokenize(std::string_view text) {
    Entries entries;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto cut = raw.find_first_of("#;");
        const std::string s = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError("line " + std::to_string(line) + ": malformed section header");
            section = trim(s.substr(1, s.size() - 2));
            if (!known_keys().count(section)) {
                throw ConfigError("line " + std::to_string(line) + ": unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (section.empty()) {
            throw ConfigError("line " + std::to_string(line) + ": key '" + key + "' outside of any section");
        }
        if (!known_keys().at(section).count(key)) {
            throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "' in [" + section + "]");
        }
        if (value.empty()) throw ConfigError("line " + std::to_string(line) + ": empty value for '" + key + "'");
        entries.add(section, key, value, line);
    }
    return entries;
}

bool parse_bool(const Entries& e, const std::string& full) {
    const Entry* entry = e.find(full);
    if (!entry) return false;
    if (entry->value == "true" || entry->value == "1") return true;
    if (entry->value == "false" || entry->value == "0") return false;
    throw ConfigError(Entries::where(full, *entry) + ": expected true or false");
}

template <class Enum>
Enum choose(const Entries& e, const std::string& full, Enum fallback,
            const std::vector<std::pair<std::string_view, Enum>>& options) {
    const Entry* entry = e.find(full);
    if (!entry) return fallback;
    for (const auto& [name, value] : options) {
        if (entry->value == name) return value;
    }
    std::string names;
    for (const auto& [name, value] : options) names += (names.empty() ? "" : ", ") + std::string(name);
    throw ConfigError(Entries::where(full, *entry) + ": '" + entry->value + "' is not one of " + names);
}

GraphKind kind_of(const Entries& e, const std::string& full) {
    const Entry* entry = e.find(full);
    if (!entry) return GraphKind::Polynomial;
    try {
        return graph_kind_from_string(entry->value);
    } catch (const ConfigError& err) {
        throw ConfigError(Entries::where(full, *entry) + ": " + err.what());
    }
}

double default_slope(GraphKind kind) {
    switch (kind) {
        case GraphKind::Polynomial: return GraphSpec::polynomial().perturbation.slope;
        case GraphKind::Logarithmic: return GraphSpec::logarithmic().perturbation.slope;
        case GraphKind::Obstacle: return GraphSpec::obstacle().perturbation.slope;
    }
    return -1.0;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
    const std::filesystem::path p(file);
    return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

RunSpec parse_config(std::string_view text, const std::filesystem::path& base_dir) {
    const Entries e = tokenize(text);
    RunSpec spec;

    spec.mesh_n = static_cast<int>(e.integer("mesh.n", spec.mesh_n));
    if (spec.mesh_n < 3 || spec.mesh_n > 1025) throw ConfigError("mesh.n must lie in [3, 1025]");

    SchemeConfig& sc = spec.scheme;
    sc.eps = e.number("scheme.eps", 0.1);
    sc.tau = e.number("scheme.tau", sc.tau);
    sc.t_end = e.number("scheme.t_end", sc.t_end);
    sc.newton_tol = e.number("scheme.newton_tol", sc.newton_tol);
    sc.newton_max = static_cast<int>(e.integer("scheme.newton_max", sc.newton_max));
    sc.splitting = choose(e, "scheme.splitting", Splitting::ConvexSplit,
                          {{"convex_split", Splitting::ConvexSplit}, {"fully_implicit", Splitting::FullyImplicit}});
    sc.unregularized = parse_bool(e, "scheme.unregularized");
    if (const Entry* list = e.find("scheme.eps_list")) {
        spec.eps_list.clear();
        std::string item;
        std::istringstream items(list->value);
        while (std::getline(items, item, ',')) {
            spec.eps_list.push_back(parse_double(item, Entries::where("scheme.eps_list", *list)));
        }
        if (spec.eps_list.size() < 3) throw ConfigError("scheme.eps_list needs at least 3 entries");
        for (std::size_t k = 0; k < spec.eps_list.size(); ++k) {
            if (!(spec.eps_list[k] > 0.0 && spec.eps_list[k] <= 1.0)) {
                throw ConfigError("scheme.eps_list: eps must lie in (0,1]");
            }
            if (k > 0 && spec.eps_list[k] > spec.eps_list[k - 1]) {
                throw ConfigError("scheme.eps_list must be nonincreasing");
            }
        }
    }

    const GraphKind bulk = kind_of(e, "graphs.bulk");
    const GraphKind boundary = e.find("graphs.boundary") ? kind_of(e, "graphs.boundary") : bulk;
    const double bulk_slope = e.number("graphs.bulk_pi_slope", default_slope(bulk));
    sc.graphs.bulk = GraphSpec::of_kind(bulk, bulk_slope);
    sc.graphs.boundary = GraphSpec::of_kind(boundary, e.number("graphs.boundary_pi_slope", bulk_slope));
    sc.graphs.rho = e.number("graphs.rho", 1.0);
    sc.graphs.c0 = e.number("graphs.c0", 0.0);
    sc.validate();

    spec.init = choose(e, "init.preset", InitPreset::Constant,
                       {{"constant", InitPreset::Constant}, {"random", InitPreset::Random}, {"table", InitPreset::Table}});
    spec.init_value = e.number("init.value", spec.init_value);
    spec.init_mean = e.number("init.mean", spec.init_mean);
    spec.init_amplitude = e.number("init.amplitude", spec.init_amplitude);
    if (e.find("init.seed")) {
        const long long s = e.integer("init.seed", 0);
        if (s < 0) throw ConfigError("init.seed must be nonnegative");
        spec.seed = static_cast<std::uint64_t>(s);
    }
    if (spec.init == InitPreset::Random && !spec.seed) throw ConfigError("init.seed is mandatory for init.preset = random");
    if (spec.init == InitPreset::Table) {
        if (!e.find("init.file")) throw ConfigError("init.file is required for init.preset = table");
        spec.init_file = resolve(base_dir, e.text("init.file", ""));
    }

    spec.forcing = choose(e, "forcing.preset", ForcingPreset::Zero,
                          {{"zero", ForcingPreset::Zero},
                           {"constant", ForcingPreset::Constant},
                           {"cosine", ForcingPreset::Cosine},
                           {"table", ForcingPreset::Table}});
    spec.forcing_amplitude = e.number("forcing.amplitude", 0.0);
    spec.forcing_surface_amplitude = e.number("forcing.surface_amplitude", spec.forcing_amplitude);
    if (!std::isfinite(spec.forcing_amplitude) || !std::isfinite(spec.forcing_surface_amplitude)) {
        throw ConfigError("forcing amplitudes must be finite");
    }
    if (spec.forcing == ForcingPreset::Table) {
        if (!e.find("forcing.file")) throw ConfigError("forcing.file is required for forcing.preset = table");
        spec.forcing_file = resolve(base_dir, e.text("forcing.file", ""));
    }

    spec.monitor_stride = static_cast<int>(e.integer("output.stride", 1));
    if (spec.monitor_stride < 1) throw ConfigError("output.stride must be at least 1");
    spec.snapshot_stride = static_cast<int>(e.integer("output.snapshots", 0));
    if (spec.snapshot_stride < 0) throw ConfigError("output.snapshots must be nonnegative");
    if (e.find("output.dir")) spec.out_dir = resolve(base_dir, e.text("output.dir", ""));
    return spec;
}

RunSpec load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_config(text.str(), path.parent_path());
    } catch (const ConfigError& err) {
        throw ConfigError(path.string() + ": " + err.what());
    }
}

Problem build_problem(const RunSpec& spec) {
    auto dom = std::make_shared<const DiscreteDomain>(build_unit_square(spec.mesh_n));
    return build_problem(spec, std::make_shared<const PairSpace>(dom));
}

Problem build_problem(const RunSpec& spec, std::shared_ptr<const PairSpace> space) {
    if (space->domain().n != spec.mesh_n) throw ConfigError("mesh.n does not match the shared mesh");
    Problem p;
    p.space = std::move(space);
    p.domain = p.space->domain_ptr();
    const DiscreteDomain& dom = *p.domain;

    switch (spec.init) {
        case InitPreset::Constant:
            p.u0 = FieldPair::constant(dom, spec.init_value);
            break;
        case InitPreset::Random:
            p.u0 = random_initial(dom, *p.space, spec.init_mean, spec.init_amplitude, *spec.seed);
            break;
        case InitPreset::Table: {
            std::ifstream in(spec.init_file);
            if (!in) throw ConfigError("cannot open init.file " + spec.init_file.string());
            p.u0 = table_initial(dom, in);
            break;
        }
    }

    switch (spec.forcing) {
        case ForcingPreset::Zero:
            p.forcing = zero_forcing(p.domain);
            break;
        case ForcingPreset::Constant:
            p.forcing = constant_forcing(p.domain, spec.forcing_amplitude, spec.forcing_surface_amplitude);
            break;
        case ForcingPreset::Cosine:
            p.forcing = cosine_forcing(p.domain, spec.forcing_amplitude, spec.forcing_surface_amplitude);
            break;
        case ForcingPreset::Table: {
            std::ifstream in(spec.forcing_file);
            if (!in) throw ConfigError("cannot open forcing.file " + spec.forcing_file.string());
            p.forcing = table_forcing(p.domain, parse_forcing_table(in));
            break;
        }
    }
    return p;
}

}  // namespace chbs
