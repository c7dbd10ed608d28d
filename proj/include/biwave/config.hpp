#ifndef BIWAVE_CONFIG_HPP
#define BIWAVE_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "biwave/dynamics.hpp"
#include "biwave/grid.hpp"

namespace biwave {

// Initial-data descriptor: which generator, with which parameters.
struct InitSpec {
    std::string generator = "great_circle";  // great_circle | random_sphere | snapshot

    // great_circle
    std::vector<int> wave_index = {1};  // integer modes per axis
    double omega = 1.0;
    double phase = 0.0;
    int plane_i = 1;  // 1-based ambient axes spanning the circle plane
    int plane_j = 2;

    // random_sphere
    std::uint64_t seed = 1;
    int max_mode = 4;
    double amplitude = 0.3;
    double v_amplitude = 0.3;
    std::optional<int> smooth_modes;

    // snapshot
    std::string path;
};

/*
 * Full description of one simulation.  Serialized as flat `key = value`
 * lines with dotted prefixes; parse_config/serialize_config round-trip
 * exactly (doubles are printed with 17 significant digits).
 */
struct SimConfig {
    GridSpec grid = make_grid(1, {64}, {6.283185307179586476925286766559});
    int sphere_dim = 1;  // target sphere dimension l (ambient l+1)
    IntegratorConfig integrator;
    bool dt_given = false;  // false: dt resolved from the default rule
    InitSpec init;
    double T = 1.0;
    int sample_every = 1;
    std::string diagnostics_path = "diagnostics.csv";
    std::string snapshot_prefix;  // empty: no snapshots written

    void validate() const;
    int ambient_dim() const { return sphere_dim + 1; }
};

// Parse a config file / config text.  Unknown keys, malformed lines and
// invalid values raise ConfigError carrying the offending line number.
SimConfig parse_config_text(const std::string& text);
SimConfig parse_config_file(const std::string& path);

// Emit the fully resolved config (defaults filled in) as key = value lines.
std::string serialize_config(const SimConfig& cfg);

// Default step rule: dt = min(0.1*sqrt(eps), 1e-3) unless the file pins one.
double default_dt(const PenaltyParams& p);

// Build the initial state a config describes.
State build_initial_state(const SimConfig& cfg);

}  // namespace biwave

#endif
