#include "biwave/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "biwave/errors.hpp"
#include "biwave/initial_data.hpp"
#include "biwave/snapshot.hpp"

namespace biwave {

double default_dt(const PenaltyParams& p) {
    // The linear flow is exact, so dt is constrained only by the splitting
    // commutator, which scales with the penalty frequency sqrt(8/eps).
    return std::min(0.1 * std::sqrt(p.epsilon), 1e-3);
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

struct RawConfig {
    // key -> (value, line number); consumed entries are erased so leftovers
    // can be reported as unknown keys with their locations.
    std::map<std::string, std::pair<std::string, int>> entries;

    bool has(const std::string& key) const { return entries.count(key) > 0; }

    std::optional<std::string> take(const std::string& key) {
        auto it = entries.find(key);
        if (it == entries.end()) return std::nullopt;
        std::string v = it->second.first;
        entries.erase(it);
        return v;
    }

    int line_of(const std::string& key) const {
        auto it = entries.find(key);
        return it == entries.end() ? 0 : it->second.second;
    }
};

RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value', got '" + line + "'", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", lineno);
        if (raw.entries.count(key)) throw ConfigError("duplicate key '" + key + "'", lineno);
        raw.entries[key] = {value, lineno};
    }
    return raw;
}

double parse_double(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("value '" + v + "' for " + key + " is not a number", line);
    }
}

long long parse_int(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t used = 0;
        const long long x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("value '" + v + "' for " + key + " is not an integer", line);
    }
}

bool parse_bool(const std::string& v, const std::string& key, int line) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("value '" + v + "' for " + key + " is not a boolean", line);
}

std::vector<std::string> split_commas(const std::string& v) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(v);
    while (std::getline(in, cur, ',')) parts.push_back(trim(cur));
    return parts;
}

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

SimConfig parse_config_text(const std::string& text) {
    RawConfig raw = tokenize(text);
    SimConfig cfg;

    int line = 0;
    auto line_for = [&raw](const std::string& key) { return raw.line_of(key); };

    if (raw.has("grid.n")) {
        line = line_for("grid.n");
        cfg.grid.dim = static_cast<int>(parse_int(*raw.take("grid.n"), "grid.n", line));
    }
    if (raw.has("grid.points")) {
        line = line_for("grid.points");
        std::vector<int> pts;
        for (const std::string& p : split_commas(*raw.take("grid.points")))
            pts.push_back(static_cast<int>(parse_int(p, "grid.points", line)));
        cfg.grid.points = pts;
    }
    if (raw.has("grid.lengths")) {
        line = line_for("grid.lengths");
        std::vector<double> ls;
        for (const std::string& p : split_commas(*raw.take("grid.lengths")))
            ls.push_back(parse_double(p, "grid.lengths", line));
        cfg.grid.lengths = ls;
    }
    // A 1-entry default expands to the requested dimension for convenience.
    if (static_cast<int>(cfg.grid.points.size()) != cfg.grid.dim && cfg.grid.points.size() == 1)
        cfg.grid.points.assign(cfg.grid.dim, cfg.grid.points[0]);
    if (static_cast<int>(cfg.grid.lengths.size()) != cfg.grid.dim && cfg.grid.lengths.size() == 1)
        cfg.grid.lengths.assign(cfg.grid.dim, cfg.grid.lengths[0]);

    if (raw.has("target.l")) {
        line = line_for("target.l");
        cfg.sphere_dim = static_cast<int>(parse_int(*raw.take("target.l"), "target.l", line));
    }

    if (raw.has("penalty.epsilon")) {
        line = line_for("penalty.epsilon");
        cfg.integrator.penalty.epsilon =
            parse_double(*raw.take("penalty.epsilon"), "penalty.epsilon", line);
    }
    if (raw.has("penalty.chi_lo")) {
        line = line_for("penalty.chi_lo");
        cfg.integrator.penalty.chi_lo =
            parse_double(*raw.take("penalty.chi_lo"), "penalty.chi_lo", line);
    }
    if (raw.has("penalty.chi_hi")) {
        line = line_for("penalty.chi_hi");
        cfg.integrator.penalty.chi_hi =
            parse_double(*raw.take("penalty.chi_hi"), "penalty.chi_hi", line);
    }

    if (raw.has("integrator.scheme")) {
        line = line_for("integrator.scheme");
        const std::string v = *raw.take("integrator.scheme");
        if (v == "strang_split")
            cfg.integrator.scheme = Scheme::strang_split;
        else if (v == "velocity_verlet")
            cfg.integrator.scheme = Scheme::velocity_verlet;
        else
            throw ConfigError("unknown scheme '" + v + "'", line);
    }
    if (raw.has("integrator.variant")) {
        line = line_for("integrator.variant");
        const std::string v = *raw.take("integrator.variant");
        if (v == "standard")
            cfg.integrator.variant = Variant::standard;
        else if (v == "tangential_laplacian")
            cfg.integrator.variant = Variant::tangential_laplacian;
        else
            throw ConfigError("unknown variant '" + v + "'", line);
    }
    if (raw.has("integrator.dealias")) {
        line = line_for("integrator.dealias");
        cfg.integrator.dealias_variant =
            parse_bool(*raw.take("integrator.dealias"), "integrator.dealias", line);
    }
    if (raw.has("integrator.dt")) {
        line = line_for("integrator.dt");
        cfg.integrator.dt = parse_double(*raw.take("integrator.dt"), "integrator.dt", line);
        cfg.dt_given = true;
    } else {
        cfg.integrator.dt = default_dt(cfg.integrator.penalty);
        cfg.dt_given = false;
    }

    if (raw.has("init.generator")) {
        line = line_for("init.generator");
        cfg.init.generator = *raw.take("init.generator");
        if (cfg.init.generator != "great_circle" && cfg.init.generator != "random_sphere" &&
            cfg.init.generator != "snapshot")
            throw ConfigError("unknown generator '" + cfg.init.generator + "'", line);
    }
    if (raw.has("init.wave_index")) {
        line = line_for("init.wave_index");
        std::vector<int> ks;
        for (const std::string& p : split_commas(*raw.take("init.wave_index")))
            ks.push_back(static_cast<int>(parse_int(p, "init.wave_index", line)));
        cfg.init.wave_index = ks;
    }
    if (raw.has("init.omega")) {
        line = line_for("init.omega");
        cfg.init.omega = parse_double(*raw.take("init.omega"), "init.omega", line);
    }
    if (raw.has("init.phase")) {
        line = line_for("init.phase");
        cfg.init.phase = parse_double(*raw.take("init.phase"), "init.phase", line);
    }
    if (raw.has("init.plane_i")) {
        line = line_for("init.plane_i");
        cfg.init.plane_i = static_cast<int>(parse_int(*raw.take("init.plane_i"), "init.plane_i", line));
    }
    if (raw.has("init.plane_j")) {
        line = line_for("init.plane_j");
        cfg.init.plane_j = static_cast<int>(parse_int(*raw.take("init.plane_j"), "init.plane_j", line));
    }
    if (raw.has("init.seed")) {
        line = line_for("init.seed");
        cfg.init.seed = static_cast<std::uint64_t>(parse_int(*raw.take("init.seed"), "init.seed", line));
    }
    if (raw.has("init.max_mode")) {
        line = line_for("init.max_mode");
        cfg.init.max_mode = static_cast<int>(parse_int(*raw.take("init.max_mode"), "init.max_mode", line));
    }
    if (raw.has("init.amplitude")) {
        line = line_for("init.amplitude");
        cfg.init.amplitude = parse_double(*raw.take("init.amplitude"), "init.amplitude", line);
    }
    if (raw.has("init.v_amplitude")) {
        line = line_for("init.v_amplitude");
        cfg.init.v_amplitude = parse_double(*raw.take("init.v_amplitude"), "init.v_amplitude", line);
    }
    if (raw.has("init.smooth_modes")) {
        line = line_for("init.smooth_modes");
        cfg.init.smooth_modes =
            static_cast<int>(parse_int(*raw.take("init.smooth_modes"), "init.smooth_modes", line));
    }
    if (raw.has("init.path")) cfg.init.path = *raw.take("init.path");

    if (raw.has("run.T")) {
        line = line_for("run.T");
        cfg.T = parse_double(*raw.take("run.T"), "run.T", line);
    }
    if (raw.has("run.sample_every")) {
        line = line_for("run.sample_every");
        cfg.sample_every =
            static_cast<int>(parse_int(*raw.take("run.sample_every"), "run.sample_every", line));
    }
    if (raw.has("output.diagnostics")) cfg.diagnostics_path = *raw.take("output.diagnostics");
    if (raw.has("output.snapshots")) cfg.snapshot_prefix = *raw.take("output.snapshots");

    if (!raw.entries.empty()) {
        const auto& [key, value_line] = *raw.entries.begin();
        throw ConfigError("unknown key '" + key + "'", value_line.second);
    }

    cfg.validate();
    return cfg;
}

SimConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void SimConfig::validate() const {
    grid.validate();
    if (sphere_dim < 1) throw ConfigError("target.l must be >= 1");
    integrator.penalty.validate();
    if (!(integrator.dt > 0.0)) throw ConfigError("integrator.dt must be positive");
    if (!(T > 0.0)) throw ConfigError("run.T must be positive");
    if (sample_every < 1) throw ConfigError("run.sample_every must be >= 1");
    if (diagnostics_path.empty()) throw ConfigError("output.diagnostics must not be empty");

    if (init.generator == "great_circle") {
        if (static_cast<int>(init.wave_index.size()) != grid.dim)
            throw ConfigError("init.wave_index needs one entry per grid axis");
        const int ambient = ambient_dim();
        if (init.plane_i < 1 || init.plane_i > ambient || init.plane_j < 1 ||
            init.plane_j > ambient || init.plane_i == init.plane_j)
            throw ConfigError("init.plane_i/plane_j must be distinct ambient axes (1-based)");
    } else if (init.generator == "random_sphere") {
        int min_n = grid.points[0];
        for (int a = 1; a < grid.dim; ++a) min_n = std::min(min_n, grid.points[a]);
        if (init.max_mode < 0 || 3 * init.max_mode >= min_n)
            throw ConfigError("init.max_mode must satisfy 3*max_mode < min(grid.points)");
        if (init.amplitude < 0.0 || init.v_amplitude < 0.0)
            throw ConfigError("init amplitudes must be nonnegative");
    } else if (init.generator == "snapshot") {
        if (init.path.empty()) throw ConfigError("init.path required for the snapshot generator");
    } else {
        throw ConfigError("unknown generator '" + init.generator + "'");
    }
}

std::string serialize_config(const SimConfig& cfg) {
    std::ostringstream out;
    out << "grid.n = " << cfg.grid.dim << "\n";
    out << "grid.points = ";
    for (int a = 0; a < cfg.grid.dim; ++a) out << (a ? "," : "") << cfg.grid.points[a];
    out << "\n";
    out << "grid.lengths = ";
    for (int a = 0; a < cfg.grid.dim; ++a) out << (a ? "," : "") << fmt_double(cfg.grid.lengths[a]);
    out << "\n";
    out << "target.l = " << cfg.sphere_dim << "\n";
    out << "penalty.epsilon = " << fmt_double(cfg.integrator.penalty.epsilon) << "\n";
    out << "penalty.chi_lo = " << fmt_double(cfg.integrator.penalty.chi_lo) << "\n";
    out << "penalty.chi_hi = " << fmt_double(cfg.integrator.penalty.chi_hi) << "\n";
    out << "integrator.scheme = "
        << (cfg.integrator.scheme == Scheme::velocity_verlet ? "velocity_verlet" : "strang_split")
        << "\n";
    out << "integrator.dt = " << fmt_double(cfg.integrator.dt) << "\n";
    out << "integrator.variant = "
        << (cfg.integrator.variant == Variant::tangential_laplacian ? "tangential_laplacian"
                                                                    : "standard")
        << "\n";
    out << "integrator.dealias = " << (cfg.integrator.dealias_variant ? "true" : "false") << "\n";
    out << "init.generator = " << cfg.init.generator << "\n";
    if (cfg.init.generator == "great_circle") {
        out << "init.wave_index = ";
        for (std::size_t a = 0; a < cfg.init.wave_index.size(); ++a)
            out << (a ? "," : "") << cfg.init.wave_index[a];
        out << "\n";
        out << "init.omega = " << fmt_double(cfg.init.omega) << "\n";
        out << "init.phase = " << fmt_double(cfg.init.phase) << "\n";
        out << "init.plane_i = " << cfg.init.plane_i << "\n";
        out << "init.plane_j = " << cfg.init.plane_j << "\n";
    } else if (cfg.init.generator == "random_sphere") {
        out << "init.seed = " << cfg.init.seed << "\n";
        out << "init.max_mode = " << cfg.init.max_mode << "\n";
        out << "init.amplitude = " << fmt_double(cfg.init.amplitude) << "\n";
        out << "init.v_amplitude = " << fmt_double(cfg.init.v_amplitude) << "\n";
    } else if (cfg.init.generator == "snapshot") {
        out << "init.path = " << cfg.init.path << "\n";
    }
    if (cfg.init.smooth_modes) out << "init.smooth_modes = " << *cfg.init.smooth_modes << "\n";
    out << "run.T = " << fmt_double(cfg.T) << "\n";
    out << "run.sample_every = " << cfg.sample_every << "\n";
    out << "output.diagnostics = " << cfg.diagnostics_path << "\n";
    if (!cfg.snapshot_prefix.empty()) out << "output.snapshots = " << cfg.snapshot_prefix << "\n";
    return out.str();
}

State build_initial_state(const SimConfig& cfg) {
    if (cfg.init.generator == "great_circle") {
        std::vector<double> p1(cfg.ambient_dim(), 0.0), p2(cfg.ambient_dim(), 0.0);
        p1[cfg.init.plane_i - 1] = 1.0;
        p2[cfg.init.plane_j - 1] = 1.0;
        return great_circle_wave(cfg.grid, cfg.init.wave_index, cfg.init.omega, p1, p2,
                                 cfg.init.phase);
    }
    if (cfg.init.generator == "random_sphere") {
        Field u = random_sphere_field(cfg.grid, cfg.ambient_dim(), cfg.init.max_mode,
                                      cfg.init.amplitude, cfg.init.seed);
        // Independent velocity stream: decorrelate from the position draw.
        Field v = random_tangent_field(u, cfg.init.max_mode, cfg.init.v_amplitude,
                                       cfg.init.seed ^ 0x9e3779b97f4a7c15ULL);
        if (cfg.init.smooth_modes) return prepare(u, v, cfg.init.smooth_modes);
        State s;
        s.u = std::move(u);
        s.v = std::move(v);
        s.t = 0.0;
        return s;
    }
    if (cfg.init.generator == "snapshot") {
        Snapshot snap = read_snapshot(cfg.init.path);
        if (!(snap.state.u.grid == cfg.grid) || snap.sphere_dim != cfg.sphere_dim)
            throw ConfigError("snapshot '" + cfg.init.path + "' does not match the configured grid/target");
        return snap.state;
    }
    throw ConfigError("unknown generator '" + cfg.init.generator + "'");
}

}  // namespace biwave
