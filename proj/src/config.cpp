#include "wavebc/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace wavebc {

const char* experiment_name(Experiment e) {
    switch (e) {
        case Experiment::energy_audit: return "energy_audit";
        case Experiment::absorbing_set: return "absorbing_set";
        case Experiment::split_decay: return "split_decay";
        case Experiment::compare: return "compare";
        case Experiment::sweep: return "sweep";
        case Experiment::omega_limit: return "omega_limit";
        case Experiment::robin_demo: return "robin_demo";
    }
    return "?";
}

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace((unsigned char)s[b])) ++b;
    while (e > b && std::isspace((unsigned char)s[e - 1])) --e;
    return s.substr(b, e - b);
}

struct Entry {
    int line;
    std::string section;  // empty for global scope
    std::string key;
    std::string value;
};

const char* const known_keys[] = {
    "experiment", "mode",     "n",         "L",           "nonlinearity",
    "k",          "a3",       "a1",        "a0",          "dt",
    "T",          "sample_dt", "eps",      "eps_grid",    "seeds",
    "rng_seed",   "seed_radius", "boundary_data", "burn_in", "window",
    "cadence",    "residual_tol", "order_study", "threads", "output_dir",
};

bool key_known(const std::string& k) {
    for (const char* kk : known_keys)
        if (k == kk) return true;
    return false;
}

bool experiment_from_name(const std::string& name, Experiment& out) {
    for (int i = 0; i <= (int)Experiment::robin_demo; ++i) {
        if (name == experiment_name((Experiment)i)) {
            out = (Experiment)i;
            return true;
        }
    }
    return false;
}

double parse_num(const Entry& en) {
    const char* s = en.value.c_str();
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s || *end != '\0') fail(en.line, "malformed number for '" + en.key + "'");
    return v;
}

long long parse_int(const Entry& en) {
    const char* s = en.value.c_str();
    char* end = nullptr;
    const long long v = std::strtoll(s, &end, 10);
    if (end == s || *end != '\0') fail(en.line, "malformed integer for '" + en.key + "'");
    return v;
}

std::uint64_t parse_uint(const Entry& en) {
    const char* s = en.value.c_str();
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0' || en.value[0] == '-')
        fail(en.line, "malformed unsigned integer for '" + en.key + "'");
    return v;
}

bool parse_bool(const Entry& en) {
    std::string v = en.value;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return (char)std::tolower(c); });
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    fail(en.line, "malformed boolean for '" + en.key + "'");
}

std::vector<double> parse_grid(const Entry& en) {
    std::vector<double> grid;
    std::stringstream ss(en.value);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cell = trim(cell);
        if (cell.empty()) fail(en.line, "empty entry in '" + en.key + "'");
        const char* s = cell.c_str();
        char* end = nullptr;
        const double v = std::strtod(s, &end);
        if (end == s || *end != '\0')
            fail(en.line, "malformed number in '" + en.key + "'");
        grid.push_back(v);
    }
    if (grid.empty()) fail(en.line, "'" + en.key + "' needs at least one value");
    return grid;
}

// Value validation shared by active and inactive entries: every entry must be
// well-formed even if its section is not selected.
void check_wellformed(const Entry& en) {
    const std::string& k = en.key;
    if (k == "n" || k == "seeds" || k == "threads") {
        parse_int(en);
    } else if (k == "rng_seed") {
        parse_uint(en);
    } else if (k == "L" || k == "k" || k == "a3" || k == "a1" || k == "a0" ||
               k == "dt" || k == "T" || k == "sample_dt" || k == "eps" ||
               k == "seed_radius" || k == "burn_in" || k == "window" ||
               k == "cadence" || k == "residual_tol") {
        parse_num(en);
    } else if (k == "eps_grid") {
        parse_grid(en);
    } else if (k == "boundary_data" || k == "order_study") {
        parse_bool(en);
    } else if (k == "experiment") {
        Experiment e;
        if (!experiment_from_name(en.value, e))
            fail(en.line, "unknown experiment '" + en.value + "'");
    } else if (k == "mode") {
        if (en.value != "acoustic" && en.value != "transport" && en.value != "robin")
            fail(en.line, "unknown mode '" + en.value + "'");
    } else if (k == "nonlinearity") {
        if (en.value != "zero" && en.value != "double_well" && en.value != "cubic_poly")
            fail(en.line, "unknown nonlinearity '" + en.value + "'");
    }
    // output_dir: any string
}

void apply_entry(Config& cfg, const Entry& en) {
    const std::string& k = en.key;
    if (k == "experiment") {
        experiment_from_name(en.value, cfg.experiment);
    } else if (k == "mode") {
        cfg.mode = (en.value == "acoustic")   ? BcMode::acoustic
                   : (en.value == "transport") ? BcMode::transport
                                               : BcMode::robin;
    } else if (k == "n") {
        cfg.n = (int)parse_int(en);
        if (cfg.n < 3) fail(en.line, "n must be at least 3");
    } else if (k == "L") {
        cfg.L = parse_num(en);
        if (!(cfg.L > 0.0)) fail(en.line, "L must be positive");
    } else if (k == "nonlinearity") {
        cfg.nl_kind = (en.value == "zero")          ? NlKind::zero
                      : (en.value == "double_well") ? NlKind::double_well
                                                    : NlKind::cubic_poly;
    } else if (k == "k") {
        cfg.k = parse_num(en);
        if (!(cfg.k > 0.0)) fail(en.line, "k must be positive");
    } else if (k == "a3") {
        cfg.a3 = parse_num(en);
    } else if (k == "a1") {
        cfg.a1 = parse_num(en);
    } else if (k == "a0") {
        cfg.a0 = parse_num(en);
    } else if (k == "dt") {
        cfg.dt = parse_num(en);
        if (!(cfg.dt > 0.0)) fail(en.line, "dt must be positive");
    } else if (k == "T") {
        cfg.T = parse_num(en);
        if (!(cfg.T > 0.0)) fail(en.line, "T must be positive");
    } else if (k == "sample_dt") {
        cfg.sample_dt = parse_num(en);
        if (!(cfg.sample_dt > 0.0)) fail(en.line, "sample_dt must be positive");
    } else if (k == "eps") {
        cfg.eps = parse_num(en);
        if (!(cfg.eps > 0.0 && cfg.eps <= 1.0)) fail(en.line, "eps must be in (0,1]");
    } else if (k == "eps_grid") {
        cfg.eps_grid = parse_grid(en);
        for (double e : cfg.eps_grid)
            if (!(e > 0.0 && e <= 1.0)) fail(en.line, "eps_grid values must be in (0,1]");
        for (std::size_t i = 1; i < cfg.eps_grid.size(); ++i)
            if (!(cfg.eps_grid[i] < cfg.eps_grid[i - 1]))
                fail(en.line, "eps_grid must be strictly decreasing");
    } else if (k == "seeds") {
        cfg.seeds = (int)parse_int(en);
        if (cfg.seeds < 1) fail(en.line, "seeds must be at least 1");
    } else if (k == "rng_seed") {
        cfg.rng_seed = parse_uint(en);
    } else if (k == "seed_radius") {
        cfg.seed_radius = parse_num(en);
        if (!(cfg.seed_radius > 0.0)) fail(en.line, "seed_radius must be positive");
    } else if (k == "boundary_data") {
        cfg.boundary_data = parse_bool(en);
    } else if (k == "burn_in") {
        cfg.burn_in = parse_num(en);
        if (!(cfg.burn_in > 0.0)) fail(en.line, "burn_in must be positive");
    } else if (k == "window") {
        cfg.window = parse_num(en);
        if (!(cfg.window > 0.0)) fail(en.line, "window must be positive");
    } else if (k == "cadence") {
        cfg.cadence = parse_num(en);
        if (!(cfg.cadence > 0.0)) fail(en.line, "cadence must be positive");
    } else if (k == "residual_tol") {
        cfg.residual_tol = parse_num(en);
        if (!(cfg.residual_tol > 0.0)) fail(en.line, "residual_tol must be positive");
    } else if (k == "order_study") {
        cfg.order_study = parse_bool(en);
    } else if (k == "threads") {
        cfg.threads = (int)parse_int(en);
        if (cfg.threads < 1) fail(en.line, "threads must be at least 1");
    } else if (k == "output_dir") {
        cfg.output_dir = en.value;
    }
}

// Keys that only make sense for particular experiments.
void check_schema(const Config& cfg, const std::vector<Entry>& active) {
    const Experiment ex = cfg.experiment;
    for (const Entry& en : active) {
        const std::string& k = en.key;
        if (k == "mode" && ex != Experiment::energy_audit)
            fail(en.line, "'mode' is only valid for energy_audit");
        if (k == "eps_grid" && ex != Experiment::sweep &&
            ex != Experiment::absorbing_set && ex != Experiment::omega_limit)
            fail(en.line, std::string(experiment_name(ex)) + " takes a single eps");
        if (k == "eps" && (ex == Experiment::sweep ||
                           ex == Experiment::absorbing_set ||
                           ex == Experiment::omega_limit))
            fail(en.line, std::string(experiment_name(ex)) +
                              " takes eps_grid, not a single eps");
        if (k == "eps" && ex == Experiment::robin_demo)
            fail(en.line, "robin_demo has no eps");
        if ((k == "burn_in" || k == "window" || k == "cadence") &&
            ex != Experiment::omega_limit)
            fail(en.line, "'" + k + "' is only valid for omega_limit");
        if (k == "boundary_data" && ex != Experiment::compare && ex != Experiment::sweep)
            fail(en.line, "'boundary_data' is only valid for compare and sweep");
        if (k == "k" && cfg.nl_kind != NlKind::double_well)
            fail(en.line, "'k' is only valid for nonlinearity=double_well");
        if ((k == "a3" || k == "a1" || k == "a0") && cfg.nl_kind != NlKind::cubic_poly)
            fail(en.line, "'" + k + "' is only valid for nonlinearity=cubic_poly");
        if ((k == "residual_tol" || k == "order_study") &&
            ex != Experiment::energy_audit && ex != Experiment::robin_demo)
            fail(en.line, "'" + k + "' is only valid for the energy audits");
    }
    if (cfg.nl_kind == NlKind::cubic_poly && !(cfg.a3 > 0.0))
        throw ConfigError("config: cubic_poly needs a3 > 0");
}

}  // namespace

void apply_experiment_defaults(Config& cfg) {
    auto def = [](double& slot, double v) {
        if (slot == 0.0) slot = v;
    };
    switch (cfg.experiment) {
        case Experiment::energy_audit:
        case Experiment::robin_demo:
            def(cfg.T, 10.0);
            def(cfg.sample_dt, 5.0 * cfg.dt);
            break;
        case Experiment::absorbing_set:
            def(cfg.T, 40.0);
            def(cfg.sample_dt, 0.05);
            if (cfg.eps_grid.empty()) cfg.eps_grid = {1.0, 0.1, 0.01};
            break;
        case Experiment::split_decay:
            def(cfg.T, 50.0);
            def(cfg.sample_dt, 0.05);
            break;
        case Experiment::compare:
            def(cfg.T, 5.0);
            def(cfg.sample_dt, 0.01);
            break;
        case Experiment::sweep:
            def(cfg.T, 5.0);
            def(cfg.sample_dt, 0.01);
            if (cfg.eps_grid.empty())
                cfg.eps_grid = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
            break;
        case Experiment::omega_limit:
            def(cfg.T, 5.0);
            def(cfg.sample_dt, 0.05);
            def(cfg.burn_in, 20.0);
            def(cfg.window, 5.0);
            def(cfg.cadence, 1.0);
            if (cfg.eps_grid.empty()) cfg.eps_grid = {1e-1, 1e-2, 1e-3};
            break;
    }
    if (cfg.sample_dt < cfg.dt) cfg.sample_dt = cfg.dt;
}

Config parse_config(const std::string& text) {
    std::vector<Entry> entries;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    int experiment_line = -1;
    std::string experiment_value;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            Experiment e;
            if (!experiment_from_name(section, e))
                fail(line_no, "unknown section '" + section + "'");
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected key=value");
        Entry en;
        en.line = line_no;
        en.section = section;
        en.key = trim(line.substr(0, eq));
        en.value = trim(line.substr(eq + 1));
        if (en.key.empty()) fail(line_no, "empty key");
        if (!key_known(en.key)) fail(line_no, "unknown key '" + en.key + "'");
        check_wellformed(en);
        if (en.key == "experiment") {
            if (!en.section.empty()) fail(line_no, "'experiment' must be global");
            experiment_line = line_no;
            experiment_value = en.value;
        }
        entries.push_back(std::move(en));
    }

    if (experiment_line < 0) throw ConfigError("config: missing required key 'experiment'");

    Config cfg;
    experiment_from_name(experiment_value, cfg.experiment);

    // Globals first, then the section matching the selected experiment.
    std::vector<Entry> active;
    for (const Entry& en : entries)
        if (en.section.empty()) {
            apply_entry(cfg, en);
            if (en.key != "experiment") active.push_back(en);
        }
    for (const Entry& en : entries)
        if (en.section == experiment_name(cfg.experiment)) {
            apply_entry(cfg, en);
            active.push_back(en);
        }

    check_schema(cfg, active);
    apply_experiment_defaults(cfg);
    return cfg;
}

Config parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace wavebc
