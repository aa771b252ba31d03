#pragma once

#include <memory>
#include <vector>

#include "common.hpp"
#include "field.hpp"
#include "noise.hpp"

namespace sns {

enum class SplitScheme { Lie, Strang };

struct StepPlan {
    double dt = 1e-3;
    SplitScheme scheme = SplitScheme::Strang;
    int snapshot_stride = 1;      // snapshot every k-th step (first/last always kept)
    double blowup_cap = 1e6;      // sup-norm abort threshold
};

// A run plus everything needed to replay it: snapshots, the per-step noise
// increments actually consumed, and the refined model they came from.
struct Trajectory {
    SpaceTimeSeries series;
    double t0 = 0.0;
    double dt = 0.0;
    int steps = 0;
    std::vector<std::size_t> snapshot_step;        // step index of each snapshot
    std::vector<std::vector<double>> increments;   // [channel][step]
    bool blew_up = false;
    double blowup_time = 0.0;
    std::shared_ptr<NoiseModel> model_used;        // paths refined to dt; null when N = 0
    int lambda = 0;
    double alpha = 2.0;

    const Field& final_field() const { return series.fields.back(); }
    double final_time() const { return series.times.back(); }
};

// e^{it Delta}: Fourier multiplier exp(-i |k|^2 t). Unitary on L^2.
Field free_propagate(const Field& f, double t);

// Exact flow of d_t f = -i lambda |f|^(alpha-1) f over dt (pointwise phase).
Field step_nonlinear(const Field& f, double dt, double alpha, double lambda);

// Exact flow of dX = sum_k X G_k dB_k - mu X dt over one mesh cell of the
// model: multiply by exp(sum_k G_k dB_k - 1/2 (G_k^2 + |G_k|^2) dt), the
// per-cell increment of e^phi with g at the left endpoint.
Field step_noise(const Field& f, const NoiseModel& model, int cell_index);

// Ito equation for X on [0, T]. Strang order per step:
// noise, linear half, nonlinear, linear half; the linear substep solves
// d_t X = -i Delta X, i.e. free_propagate with negated argument.
Trajectory evolve_X(const Field& X0, const NoiseModel& model, const StepPlan& plan,
                    double T, double alpha);

// Deterministic NLS d_t u = -i Delta u - lambda i |u|^(alpha-1) u on [t_from, t_to].
Trajectory evolve_deterministic(const Field& u0, const StepPlan& plan, double t_from,
                                double t_to, double alpha, double lambda);

// Lensed equation d_t w = -i Delta w - lambda i h(t) e^((alpha-1) Re phi~(t)) |w|^(alpha-1) w
// on [t0, t1] in [0,1), phi~(t) = phi(t/(1-t)). Needs constant (H2) profiles
// (or N = 0) so the lensed generator carries no coefficient fields; the
// nonlinear substep uses the midpoint value of h e^((alpha-1) Re phi~).
Trajectory evolve_lensed(const Field& w0, const NoiseModel& model, const StepPlan& plan,
                         double t0, double t1, double alpha);

// V(t,s) for the homogeneous (F = 0) equation: e^{-psi(t)} Lambda(t,s) e^{psi(s)}
// with psi = phi (star = false) or phi_star (star = true) and Lambda the
// linear stochastic flow. Requires s <= t, both on the dt grid.
Field homogeneous_evolve(const Field& v_s, double s, double t, const NoiseModel& model,
                         const StepPlan& plan, bool star);

// Inverse direction V(s,t) with s < t (used for the V(0,t) pullback): applies
// the exact substep inverses in reverse order.
Field homogeneous_evolve_backward(const Field& v_t, double t, double s,
                                  const NoiseModel& model, const StepPlan& plan, bool star);

} // namespace sns
