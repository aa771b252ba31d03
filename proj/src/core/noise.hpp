#pragma once

#include <cstdint>
#include <vector>

#include "brownian.hpp"
#include "common.hpp"
#include "field.hpp"
#include "profiles.hpp"

namespace sns {

struct NoiseChannel {
    SpatialProfile spatial;
    TemporalProfile temporal;
    BrownianPath path;
};

struct FlatnessRow {
    double t;
    char coefficient;  // 'b' or 'c'
    int order;         // derivative order
    double sup;        // sup over grid of <x>^2 |d^beta coeff|
};

struct FlatnessReport {
    bool star = false;
    std::vector<FlatnessRow> rows;
};

// The noise G_k(t,x) = g_k(t) phi_k(x) dB_k with lambda and one sampled
// Brownian path per channel. Carries the per-channel scalar quadratures
//   I_k(t) = int_0^t g_k dB_k   (Ito, left endpoint)
//   J_k(t) = int_0^t g_k^2 ds   (trapezoid)
// from which every derived object separates as
//   phi(t,x)  = sum_k [ phi_k(x) I_k(t) - rho_k(x) J_k(t) ],  rho_k = (Re phi_k) phi_k,
// and likewise for the coefficient fields b, c, b*, c*.
class NoiseModel {
public:
    NoiseModel(std::vector<std::pair<SpatialProfile, TemporalProfile>> channels,
               int lambda, double horizon, int mesh_cells, uint64_t seed);
    NoiseModel(std::vector<NoiseChannel> channels, int lambda, double horizon);

    int N() const { return static_cast<int>(channels_.size()); }
    int lambda() const { return lambda_; }
    double horizon() const { return horizon_; }
    double mesh_dt() const { return mesh_dt_; }
    int mesh_cells() const { return cells_; }
    uint64_t seed() const { return seed_; }
    const NoiseChannel& channel(int k) const { return channels_[static_cast<std::size_t>(k)]; }

    bool conservative() const;            // all Re phi_k identically zero
    bool constant_profiles() const;       // the (H2) family

    NoiseModel refined_to(double dt) const;

    // scalar quadratures (linear bridge interpolation inside a mesh cell)
    double ito_integral(int k, double t) const;          // I_k(t)
    double ds_integral(int k, double t) const;           // J_k(t)
    double ito_integral_star(int k, double t) const;     // I_k(horizon) - I_k(t)
    double ds_integral_star(int k, double t) const;      // J_k(horizon) - J_k(t)

    Field phi(double t, const Grid& g) const;
    Field phi_star(double t, const Grid& g) const;
    Field mu(double t, const Grid& g) const;
    Field mu_hat(double t, const Grid& g) const;

    // Re phi(t) for constant profiles (spatially uniform); v1_scale multiplies
    // Re v_1 of channel 0 while the paths stay frozen.
    double re_phi_uniform(double t, double v1_scale = 1.0) const;
    cplx phi_uniform(double t) const;

    std::vector<Field> coeff_b(double t, const Grid& g) const;
    Field coeff_c(double t, const Grid& g) const;
    std::vector<Field> coeff_b_star(double t, const Grid& g) const;
    Field coeff_c_star(double t, const Grid& g) const;

    FlatnessReport flatness_report(const std::vector<double>& t_list, const Grid& g,
                                   bool star = false) const;

    // Pathwise damping functionals of Section 4:
    //   non-lensed: int_0^T exp((alpha-1) theta Re phi(s)) ds
    //   lensed:     int_0^T (1+s)^(-(d(alpha-1)-4) theta/2 - 2) exp(...) ds
    // Constant (or empty) profiles only; theta > 1.
    double epsilon_theta(double v1_scale, double theta, double horizon, bool lensed,
                         int d, double alpha) const;

    // (H1) iterated-logarithm diagnostic at lens times t in [0,1); reported only.
    std::vector<double> ilog_diagnostic(const std::vector<double>& lens_times) const;

    // Neglected tail of int g_k^2 beyond the horizon, per channel (closed form).
    std::vector<double> tail_bounds() const;

private:
    void build_caches();
    void check_time(double t) const;

    std::vector<NoiseChannel> channels_;
    int lambda_;
    double horizon_;
    double mesh_dt_ = 0.0;
    int cells_ = 0;
    uint64_t seed_ = 0;
    std::vector<std::vector<double>> I_; // per channel, size cells+1
    std::vector<std::vector<double>> J_;
};

} // namespace sns
