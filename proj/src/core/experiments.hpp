#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "common.hpp"
#include "dynamics.hpp"
#include "functionals.hpp"
#include "noise.hpp"
#include "transforms.hpp"

namespace sns {

enum class ScatterNorm { H1, Sigma };

struct ScatterVerdict {
    std::vector<double> window_times;  // snapped pullback sample times
    std::vector<double> deltas;        // Cauchy differences between windows
    bool flag = false;
    bool blow_up = false;
    int windows = 0;
};

// Finite-horizon scattering proxy: pullbacks at dyadic times
// t_m = T * 2^((m - W)/2), m = 0..W, snapped to stored snapshots;
// flag iff the last Cauchy difference drops below ratio * the first
// (a flat-at-machine-zero series also flags). Blow-up never flags.
ScatterVerdict detect_scattering(const Trajectory& traj, const NoiseModel& model,
                                 ScatterNorm norm, int windows, double ratio,
                                 bool star = true);

struct SweepPoint {
    double re_v1 = 0.0;
    int paths = 0;
    double fraction_detector = 0.0;
    double fraction_proxy = 0.0;
    double mean_eps = 0.0;         // mean of eps_hat(v1), non-lensed
    double mean_eps_lensed = 0.0;  // mean of the lensed variant
    int blowups = 0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    uint64_t master_seed = 0;
    double calibrated_C = 0.0;     // contraction constant fixed on the baseline
    std::vector<std::vector<int>> flags; // [point][path] detector verdicts
};

struct SweepOptions {
    Field X0;
    double alpha = 1.5;
    int lambda = 1;
    // base channels; channel 0's Re v1 is replaced by each sweep value
    std::vector<std::pair<SpatialProfile, TemporalProfile>> channels;
    double horizon = 8.0;
    double T = 6.0;
    StepPlan plan;
    std::vector<double> v1_values;
    int paths = 50;
    int windows = 4;
    double ratio = 0.5;
    double theta = 0.0;            // <= 0: use the exponent-table value
    uint64_t master_seed = 1;
    int threads = 0;
    ScatterNorm norm = ScatterNorm::H1;
};

// Theorem 1.6 study: frozen path set across the v1 grid, H1 pullback
// detector on e^{it Delta} e^{-phi(t)} X(t) and the Section 4 stopping-time
// proxy with one constant calibrated on the baseline point.
SweepResult regularization_sweep(const SweepOptions& opt);

struct ItoSuiteRow {
    std::string functional;
    std::vector<double> dts;
    std::vector<double> residuals;   // |residual(T)| per level
    double slope = 0.0;              // least-squares log2 slope
    bool saturated = false;          // at the round-off floor
};

struct MartingaleStat {
    int paths = 0;
    double mean_deviation = 0.0;     // mean mass(T) - mass(0)
    double standard_error = 0.0;
    bool within_3se = false;
};

struct ItoSuiteReport {
    std::vector<ItoSuiteRow> rows;
    MartingaleStat martingale;
};

struct ItoSuiteOptions {
    Field X0;
    double alpha = 3.0;
    int lambda = -1;
    std::vector<std::pair<SpatialProfile, TemporalProfile>> channels;
    double horizon = 1.0;
    double T = 0.5;
    double base_dt = 2e-3;
    int levels = 3;
    std::vector<Functional> functionals;
    uint64_t master_seed = 1;
    int martingale_paths = 0;        // 0: skip the weak check
    int threads = 0;
};

// Residual replays across bridge-refined levels dt, dt/2, ... plus the
// drift-free mass check in the weak (Monte Carlo mean) sense.
ItoSuiteReport ito_suite(const ItoSuiteOptions& opt);

struct ConvergenceRow {
    std::string label;
    std::vector<double> dts;
    std::vector<double> errors;
    double order = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    // CLT scaling: CI width at M vs 2M paths
    double ci_ratio = 0.0;
    bool ci_ok = false;
};

struct ConvergenceOptions {
    Field X0;
    double alpha = 3.0;
    int lambda = -1;
    std::vector<std::pair<SpatialProfile, TemporalProfile>> channels;
    double horizon = 1.0;
    double T = 0.5;
    double base_dt = 2e-3;
    int levels = 3;
    uint64_t master_seed = 1;
    int clt_paths = 0;               // 0: skip the CLT check
    int threads = 0;
    bool soliton_reference = false;  // exact sech soliton available
};

ConvergenceReport convergence_study(const ConvergenceOptions& opt);

} // namespace sns
