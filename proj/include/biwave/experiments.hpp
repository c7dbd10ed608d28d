#ifndef BIWAVE_EXPERIMENTS_HPP
#define BIWAVE_EXPERIMENTS_HPP

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "biwave/config.hpp"
#include "biwave/dynamics.hpp"
#include "biwave/record.hpp"

namespace biwave {

// Exit codes shared by the drivers.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNonFinite = 2;
inline constexpr int kExitOrderFailure = 3;

// Serialize records as comma-separated text: the resolved config as '# '
// comment lines, one header line, then one row per record with columns
// t, E_eps, E_geom, penalty_mass, constraint_l2, constraint_linf,
// Q_i_j (lexicographic), tangential_residual_l2, identity_gap_l2.
void write_diagnostics_csv(std::ostream& out, const SimConfig& cfg,
                           const std::vector<DiagnosticsRecord>& records);

// Recover the embedded config from a diagnostics file ('# ' comment lines).
std::string extract_embedded_config(const std::string& diagnostics_path);

// Single run: writes the diagnostics series and optional snapshots.
// Exit 0 on success, 1 on config problems, 2 on blow-up (after flushing the
// last finite sampled state as <prefix>_last_good or last_good.biwv).
int cmd_run(const std::string& config_path);

/*
 * Penalty sweep: one run per epsilon (decreasing, positive), each with
 * dt <= 0.1*sqrt(eps) chosen so samples land on the shared matched times
 * t_j = j*T/16.  Prints a summary table (max_t penalty_mass, max_t
 * constraint_l2, max_t |Q drift|, penalty_mass/(eps*E0)), the fitted slope
 * of log max_t constraint_l2 against log eps when >= 2 runs succeed, and
 * the pairwise distances ||u_{eps_k} - u_{eps_{k+1}}||_{L2} at matched
 * times.  Per-run failures are reported and skipped; exit 2 if any run
 * failed, else 0.
 */
struct SweepRow {
    double epsilon = 0.0;
    bool failed = false;
    double initial_energy = 0.0;
    double max_penalty_mass = 0.0;
    double max_constraint_l2 = 0.0;
    double max_charge_drift = 0.0;
};
struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<double> pairwise_distance;  // between consecutive successful rows
    double slope = 0.0;
    bool slope_valid = false;
};
SweepResult run_sweep(const SimConfig& base, const std::vector<double>& epsilons, int jobs);
int cmd_sweep(const std::string& config_path, const std::vector<double>& epsilons, int jobs);

/*
 * Self-convergence study.  mode "dt": halve dt across `levels` levels, with
 * one further halving as the reference solution; exit 0 when the fitted
 * order is >= 1.8, else 3.  mode "grid": double N across `levels` levels
 * against the finest as reference, comparing on shared nodes; exit 0 when
 * the error at the second level is <= 1e-10 or every ratio between
 * consecutive levels is >= 10 until the 1e-12 floor, else 3.  Fewer than 2
 * levels: exit 1.
 */
struct ConvergenceResult {
    std::vector<double> step_or_h;  // dt per level, or max cell width per level
    std::vector<double> error;      // state error vs reference per level
    double order = 0.0;             // least-squares slope of log error vs log dt
};
ConvergenceResult run_convergence(const SimConfig& base, const std::string& mode, int levels);
int cmd_converge(const std::string& config_path, const std::string& mode, int levels);

}  // namespace biwave

#endif
