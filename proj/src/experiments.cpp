#include "biwave/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "biwave/diagnostics.hpp"
#include "biwave/errors.hpp"
#include "biwave/snapshot.hpp"

namespace biwave {

namespace {

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string fmt_short(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

// Slope of the least-squares line through (x_i, y_i).
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
    const std::size_t slash = path.find_last_of('/');
    const std::size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

void write_record_row(std::ostream& out, const DiagnosticsRecord& rec) {
    out << fmt_double(rec.t) << ',' << fmt_double(rec.energy_penalized) << ','
        << fmt_double(rec.energy_geometric) << ',' << fmt_double(rec.penalty_mass) << ','
        << fmt_double(rec.constraint_l2) << ',' << fmt_double(rec.constraint_linf);
    for (double q : rec.charges) out << ',' << fmt_double(q);
    out << ',' << fmt_double(rec.tangential_residual_l2) << ','
        << fmt_double(rec.identity_gap_l2) << '\n';
}

void write_csv_preamble(std::ostream& out, const SimConfig& cfg) {
    std::istringstream cfg_lines(serialize_config(cfg));
    std::string line;
    while (std::getline(cfg_lines, line)) out << "# " << line << '\n';
    out << "t,E_eps,E_geom,penalty_mass,constraint_l2,constraint_linf";
    for (const SkewGenerator& g : all_generators(cfg.ambient_dim()))
        out << ",Q_" << (g.i + 1) << '_' << (g.j + 1);
    out << ",tangential_residual_l2,identity_gap_l2\n";
}

// Evolve with a fixed step count (converge levels must share exact horizons).
State evolve_steps(State s, const IntegratorConfig& cfg, std::size_t steps,
                   SpectralWorkspace& ws) {
    for (std::size_t k = 0; k < steps; ++k)
        s = cfg.scheme == Scheme::velocity_verlet ? step_verlet(s, cfg, ws)
                                                  : step_strang(s, cfg, ws);
    return s;
}

std::size_t ceil_steps(double T, double dt) {
    const double ratio = T / dt;
    const double rounded = std::round(ratio);
    if (rounded >= 1.0 && std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, ratio))
        return static_cast<std::size_t>(rounded);
    return static_cast<std::size_t>(std::ceil(ratio));
}

}  // namespace

void write_diagnostics_csv(std::ostream& out, const SimConfig& cfg,
                           const std::vector<DiagnosticsRecord>& records) {
    write_csv_preamble(out, cfg);
    for (const DiagnosticsRecord& rec : records) write_record_row(out, rec);
}

std::string extract_embedded_config(const std::string& diagnostics_path) {
    std::ifstream in(diagnostics_path, std::ios::binary);
    if (!in) throw ConfigError("cannot open diagnostics file '" + diagnostics_path + "'");
    std::string line, cfg;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0)
            cfg += line.substr(2) + "\n";
        else
            break;
    }
    return cfg;
}

int cmd_run(const std::string& config_path) {
    SimConfig cfg;
    try {
        cfg = parse_config_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }

    const double guidance = 0.25 * std::sqrt(cfg.integrator.penalty.epsilon);
    if (cfg.integrator.scheme == Scheme::strang_split && cfg.integrator.dt > guidance)
        std::cerr << "warning: dt = " << fmt_short(cfg.integrator.dt)
                  << " exceeds the splitting guidance 0.25*sqrt(epsilon) = "
                  << fmt_short(guidance) << "; proceeding\n";

    State initial;
    try {
        initial = build_initial_state(cfg);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }

    std::ofstream out(cfg.diagnostics_path, std::ios::binary | std::ios::trunc);
    if (!out) {
        std::cerr << "cannot open '" << cfg.diagnostics_path << "' for writing\n";
        return kExitConfig;
    }
    write_csv_preamble(out, cfg);

    SpectralWorkspace ws(cfg.grid);
    State last_good;
    bool have_state = false;
    std::size_t sample_index = 0;
    const double eps = cfg.integrator.penalty.epsilon;

    try {
        run_observed(initial, cfg.integrator, cfg.T, cfg.sample_every, ws,
                     [&](const State& s, const DiagnosticsRecord& rec) {
                         write_record_row(out, rec);
                         if (!cfg.snapshot_prefix.empty()) {
                             char idx[32];
                             std::snprintf(idx, sizeof(idx), "_%06zu.biwv", sample_index);
                             write_snapshot(cfg.snapshot_prefix + idx, s, cfg.sphere_dim, eps);
                         }
                         last_good = s;
                         have_state = true;
                         ++sample_index;
                     });
    } catch (const NonFinite& e) {
        std::cerr << e.what() << "\n";
        if (have_state) {
            const std::string path = cfg.snapshot_prefix.empty()
                                         ? std::string("last_good.biwv")
                                         : cfg.snapshot_prefix + "_last_good.biwv";
            write_snapshot(path, last_good, cfg.sphere_dim, eps);
            std::cerr << "last finite sample flushed to " << path << "\n";
        }
        return kExitNonFinite;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }

    std::cout << "wrote " << sample_index << " samples to " << cfg.diagnostics_path << "\n";
    return kExitOk;
}

namespace {

struct SweepRun {
    SweepRow row;
    std::vector<Field> sampled_u;
    std::string error;
};

SweepRun sweep_single(const SimConfig& base, double eps) {
    SweepRun result;
    result.row.epsilon = eps;

    SimConfig cfg = base;
    cfg.integrator.penalty.epsilon = eps;
    // Matched sample times t_j = j*T/16 for the cross-epsilon comparison:
    // dt divides the interval exactly and respects the dt <= 0.1 sqrt(eps)
    // step rule.
    constexpr int kIntervals = 16;
    const double interval = cfg.T / kIntervals;
    const double target_dt = 0.1 * std::sqrt(eps);
    const int per_interval = std::max(1, static_cast<int>(std::ceil(interval / target_dt - 1e-12)));
    cfg.integrator.dt = interval / per_interval;
    cfg.dt_given = true;
    cfg.sample_every = per_interval;
    cfg.diagnostics_path = with_suffix(base.diagnostics_path, "_eps" + fmt_short(eps));
    cfg.snapshot_prefix.clear();

    State initial = build_initial_state(cfg);
    SpectralWorkspace ws(cfg.grid);
    Trajectory traj = run(initial, cfg.integrator, cfg.T, cfg.sample_every, ws);

    std::ofstream out(cfg.diagnostics_path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open '" + cfg.diagnostics_path + "' for writing");
    write_diagnostics_csv(out, cfg, traj.records);

    result.row.initial_energy = traj.records.front().energy_penalized;
    for (const DiagnosticsRecord& rec : traj.records) {
        result.row.max_penalty_mass = std::max(result.row.max_penalty_mass, rec.penalty_mass);
        result.row.max_constraint_l2 = std::max(result.row.max_constraint_l2, rec.constraint_l2);
        for (std::size_t q = 0; q < rec.charges.size(); ++q)
            result.row.max_charge_drift =
                std::max(result.row.max_charge_drift,
                         std::abs(rec.charges[q] - traj.records.front().charges[q]));
    }
    for (const State& s : traj.samples) result.sampled_u.push_back(s.u);
    return result;
}

}  // namespace

SweepResult run_sweep(const SimConfig& base, const std::vector<double>& epsilons, int jobs) {
    if (epsilons.empty()) throw ConfigError("epsilon list must not be empty");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0)) throw ConfigError("epsilon values must be positive");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw ConfigError("epsilon list must be strictly decreasing");
    }

    std::vector<SweepRun> runs(epsilons.size());
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(epsilons.size())));

    std::mutex next_mutex;
    std::size_t next = 0;
    auto worker = [&]() {
        for (;;) {
            std::size_t idx;
            {
                std::lock_guard<std::mutex> lock(next_mutex);
                if (next >= epsilons.size()) return;
                idx = next++;
            }
            try {
                runs[idx] = sweep_single(base, epsilons[idx]);
            } catch (const std::exception& e) {
                runs[idx].row.epsilon = epsilons[idx];
                runs[idx].row.failed = true;
                runs[idx].error = e.what();
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    SweepResult result;
    for (const SweepRun& r : runs) {
        result.rows.push_back(r.row);
        if (r.row.failed) std::cerr << "epsilon " << fmt_short(r.row.epsilon) << ": " << r.error << "\n";
    }

    // Empirical Cauchy check: L2 distance of u between consecutive epsilons,
    // maximized over the matched sample times.
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
        if (runs[i].row.failed || runs[i + 1].row.failed) continue;
        const auto& a = runs[i].sampled_u;
        const auto& b = runs[i + 1].sampled_u;
        const std::size_t m = std::min(a.size(), b.size());
        double dist = 0.0;
        for (std::size_t j = 0; j < m; ++j) dist = std::max(dist, l2_norm(pointwise_sub(a[j], b[j])));
        result.pairwise_distance.push_back(dist);
    }

    std::vector<double> log_eps, log_c;
    for (const SweepRow& row : result.rows) {
        if (row.failed) continue;
        log_eps.push_back(std::log(row.epsilon));
        log_c.push_back(std::log(std::max(row.max_constraint_l2, 1e-300)));
    }
    if (log_eps.size() >= 2) {
        result.slope = ls_slope(log_eps, log_c);
        result.slope_valid = true;
    }
    return result;
}

int cmd_sweep(const std::string& config_path, const std::vector<double>& epsilons, int jobs) {
    SimConfig base;
    try {
        base = parse_config_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }

    SweepResult result;
    try {
        result = run_sweep(base, epsilons, jobs);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }

    std::cout << "epsilon,max_penalty_mass,max_constraint_l2,max_charge_drift,mass_over_eps_E0\n";
    bool any_failed = false;
    for (const SweepRow& row : result.rows) {
        if (row.failed) {
            any_failed = true;
            std::cout << fmt_short(row.epsilon) << ",failed,,,\n";
            continue;
        }
        const double denom = row.epsilon * row.initial_energy;
        std::cout << fmt_short(row.epsilon) << ',' << fmt_double(row.max_penalty_mass) << ','
                  << fmt_double(row.max_constraint_l2) << ',' << fmt_double(row.max_charge_drift)
                  << ',' << fmt_double(denom > 0.0 ? row.max_penalty_mass / denom : 0.0) << "\n";
    }
    for (std::size_t i = 0; i < result.pairwise_distance.size(); ++i)
        std::cout << "# pair_distance_" << i << " = " << fmt_double(result.pairwise_distance[i])
                  << "\n";
    if (result.slope_valid)
        std::cout << "# constraint_slope = " << fmt_double(result.slope) << "\n";

    const std::string summary_path = with_suffix(base.diagnostics_path, "_sweep_summary");
    std::ofstream summary(summary_path, std::ios::binary | std::ios::trunc);
    if (summary) {
        summary << "epsilon,failed,initial_energy,max_penalty_mass,max_constraint_l2,max_charge_drift\n";
        for (const SweepRow& row : result.rows)
            summary << fmt_short(row.epsilon) << ',' << (row.failed ? 1 : 0) << ','
                    << fmt_double(row.initial_energy) << ',' << fmt_double(row.max_penalty_mass)
                    << ',' << fmt_double(row.max_constraint_l2) << ','
                    << fmt_double(row.max_charge_drift) << "\n";
        if (result.slope_valid) summary << "# constraint_slope = " << fmt_double(result.slope) << "\n";
        for (std::size_t i = 0; i < result.pairwise_distance.size(); ++i)
            summary << "# pair_distance_" << i << " = " << fmt_double(result.pairwise_distance[i])
                    << "\n";
    }

    return any_failed ? kExitNonFinite : kExitOk;
}

ConvergenceResult run_convergence(const SimConfig& base, const std::string& mode, int levels) {
    if (levels < 2) throw ConfigError("need >= 2 levels");
    ConvergenceResult result;

    if (mode == "dt") {
        const std::size_t base_steps = ceil_steps(base.T, base.integrator.dt);
        const double dt_base = base.T / static_cast<double>(base_steps);

        State initial = build_initial_state(base);
        SpectralWorkspace ws(base.grid);

        std::vector<State> finals;
        for (int lev = 0; lev <= levels; ++lev) {  // last level is the reference
            IntegratorConfig cfg = base.integrator;
            cfg.dt = dt_base / static_cast<double>(1u << lev);
            const std::size_t steps = base_steps << lev;
            finals.push_back(evolve_steps(initial, cfg, steps, ws));
            if (lev < levels) result.step_or_h.push_back(cfg.dt);
        }
        const State& ref = finals.back();
        for (int lev = 0; lev < levels; ++lev) {
            const double eu = l2_norm(pointwise_sub(finals[lev].u, ref.u));
            const double ev = l2_norm(pointwise_sub(finals[lev].v, ref.v));
            result.error.push_back(std::sqrt(eu * eu + ev * ev));
        }
    } else if (mode == "grid") {
        if (base.init.generator == "snapshot")
            throw ConfigError("grid mode needs an analytic generator, not a snapshot");
        const std::size_t steps = ceil_steps(base.T, base.integrator.dt);

        std::vector<State> finals;
        std::vector<GridSpec> grids;
        for (int lev = 0; lev <= levels; ++lev) {
            SimConfig cfg = base;
            for (int a = 0; a < cfg.grid.dim; ++a) cfg.grid.points[a] = base.grid.points[a] << lev;
            cfg.validate();
            State initial = build_initial_state(cfg);
            SpectralWorkspace ws(cfg.grid);
            finals.push_back(evolve_steps(initial, cfg.integrator, steps, ws));
            grids.push_back(cfg.grid);
            if (lev < levels) {
                double h = 0.0;
                for (int a = 0; a < cfg.grid.dim; ++a)
                    h = std::max(h, cfg.grid.lengths[a] / cfg.grid.points[a]);
                result.step_or_h.push_back(h);
            }
        }

        const State& ref = finals.back();
        const GridSpec& rgrid = grids.back();
        for (int lev = 0; lev < levels; ++lev) {
            const GridSpec& cgrid = grids[lev];
            const int stride = rgrid.points[0] / cgrid.points[0];
            const int comps = finals[lev].u.components;
            double sq = 0.0;
            const int n0 = cgrid.points[0];
            const int n1 = cgrid.dim == 2 ? cgrid.points[1] : 1;
            const int rn1 = rgrid.dim == 2 ? rgrid.points[1] : 1;
            for (int i0 = 0; i0 < n0; ++i0)
                for (int i1 = 0; i1 < n1; ++i1) {
                    const std::size_t cp = static_cast<std::size_t>(i0) * n1 + i1;
                    const std::size_t rp =
                        static_cast<std::size_t>(i0) * stride * rn1 + static_cast<std::size_t>(i1) * stride;
                    for (int c = 0; c < comps; ++c) {
                        const double du =
                            finals[lev].u.values[cp * comps + c] - ref.u.values[rp * comps + c];
                        const double dv =
                            finals[lev].v.values[cp * comps + c] - ref.v.values[rp * comps + c];
                        sq += (du * du + dv * dv) * cgrid.cell_volume();
                    }
                }
            result.error.push_back(std::sqrt(sq));
        }
    } else {
        throw ConfigError("unknown convergence mode '" + mode + "' (expected dt or grid)");
    }

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < result.error.size(); ++i) {
        if (result.error[i] > 1e-14) {
            lx.push_back(std::log(result.step_or_h[i]));
            ly.push_back(std::log(result.error[i]));
        }
    }
    if (lx.size() >= 2) result.order = ls_slope(lx, ly);
    return result;
}

int cmd_converge(const std::string& config_path, const std::string& mode, int levels) {
    SimConfig base;
    try {
        base = parse_config_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }

    ConvergenceResult result;
    try {
        result = run_convergence(base, mode, levels);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }

    std::cout << (mode == "dt" ? "dt,error\n" : "h,error\n");
    for (std::size_t i = 0; i < result.error.size(); ++i)
        std::cout << fmt_double(result.step_or_h[i]) << ',' << fmt_double(result.error[i]) << "\n";
    std::cout << "# fitted_order = " << fmt_double(result.order) << "\n";

    if (mode == "dt") return result.order >= 1.8 ? kExitOk : kExitOrderFailure;

    // Grid mode: spectral accuracy shows either an immediate error floor or
    // at least a decade of decay per doubling until the rounding floor.
    if (result.error.size() >= 2 && result.error[1] <= 1e-10) return kExitOk;
    for (std::size_t i = 0; i + 1 < result.error.size(); ++i) {
        if (result.error[i] <= 1e-12) return kExitOk;
        if (result.error[i + 1] > result.error[i] / 10.0) return kExitOrderFailure;
    }
    return kExitOk;
}

}  // namespace biwave
