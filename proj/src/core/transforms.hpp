#pragma once

#include <vector>

#include "common.hpp"
#include "dynamics.hpp"
#include "field.hpp"
#include "noise.hpp"

namespace sns {

// f e^{+psi} (sign > 0) or f e^{-psi}.
Field gauge(const Field& f, const Field& psi, int sign);

// Pseudo-conformal lens at t in [0, t_max]:
//   forward:  w(x) = (1-t)^(-d/2) v(x/(1-t)) e^{i|x|^2/(4(1-t))}
//   inverse:  v(y) = (1-t)^(d/2) [w e^{-i|.|^2/(4(1-t))}](y(1-t))
// Off-grid points via trigonometric interpolation of the chirp-free factor.
Field pct_forward(const Field& v, double t, double t_max = 0.9);
Field pct_inverse(const Field& w, double t, double t_max = 0.9);

// D_beta f(x) = beta^(d/2) f(beta x); L2-isometric.
Field dilation(const Field& f, double beta);
// M_sigma f(x) = e^{i sigma |x|^2 / 4} f(x).
Field modulation(const Field& f, double sigma);

// e^{it Delta} e^{-psi(t)} X(t) with psi = phi_star (star) or phi.
Field scattering_pullback(const Field& X_t, double t, const NoiseModel& model, bool star = true);

// V(0,t) e^{-phi_star(t)} X(t): undo the homogeneous stochastic flow instead
// of the free flow (Theorem 1.3(ii) / 1.5(ii) variant).
Field scattering_pullback_V(const Field& X_t, double t, const NoiseModel& model,
                            const StepPlan& plan, bool star = true);

// max_s | T(s) z*(s) - M_{-1} T(s/(1+s)) z~*(s/(1+s)) |_2 / |z*(s)|_2 over the
// sampled times; z_series carries s-times, lensed_series carries t = s/(1+s).
double asymptotic_equivalence_check(const SpaceTimeSeries& z_series,
                                    const SpaceTimeSeries& lensed_series);

// Spectral concentration guard shared by the interpolating transforms.
void require_band_limited(const Field& f, double tol = 1e-10);

} // namespace sns
