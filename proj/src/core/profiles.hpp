#pragma once

#include <array>
#include <string>

#include "common.hpp"
#include "field.hpp"
#include "grid.hpp"

namespace sns {

// Spatial factor phi_k of a noise channel. All kinds are radial,
// phi(x) = amp * F(|x|^2), with F smooth, so every partial derivative up to
// third order comes from closed-form F', F'', F''' rather than differencing.
//   constant:       F = 1                        -- the (H2) family
//   gaussian_decay: F = exp(-u / (2 w^2))
//   inverse_poly:   F = (1+u)^(-p/2), p >= 3     -- meets the |x|^3 flatness decay
class SpatialProfile {
public:
    enum class Kind { Constant, GaussianDecay, InversePoly };

    static SpatialProfile constant(cplx v);
    static SpatialProfile gaussian_decay(cplx amp, double width);
    static SpatialProfile inverse_poly(cplx amp, double power);

    Kind kind() const { return kind_; }
    cplx amplitude() const { return amp_; }
    double parameter() const { return par_; }
    bool is_constant() const { return kind_ == Kind::Constant; }
    // Purely imaginary profiles give conservative noise.
    bool is_conservative() const { return amp_.real() == 0.0; }

    cplx value(const double* x, int d) const;
    void grad(const double* x, int d, cplx* out) const;            // out[d]
    void hessian(const double* x, int d, cplx* out) const;         // out[d*d], row-major
    cplx laplacian(const double* x, int d) const;
    // third partial d_a d_b d_c
    cplx third(const double* x, int d, int a, int b, int c) const;

    Field evaluate(const Grid& g) const;
    Field evaluate_gradient(const Grid& g, int axis) const;

    // Profile of rho = (Re phi) phi = (Re amp) amp F^2; same radial family.
    SpatialProfile rho() const;
    // Profile of |phi|^2 = |amp|^2 F^2 (real).
    SpatialProfile abs_sq() const;

    std::string describe() const;

private:
    SpatialProfile(Kind k, cplx amp, double par) : kind_(k), amp_(amp), par_(par) {}
    // F and derivatives in u = |x|^2
    void f_derivs(double u, double& f, double& f1, double& f2, double& f3) const;

    Kind kind_;
    cplx amp_;
    double par_;     // width (gaussian), power (inverse_poly), unused (constant)
    int square_ = 0; // rho() marker: evaluate F^2 of the base family
};

// Temporal factor g_k. Deterministic, nonnegative.
//   constant(c0):       g = c0 > 0               -- (H2), not square integrable
//   compact(c, T0):     g = c on [0, T0], else 0
//   poly_decay(c, r):   g = c (1+t)^(-r), r > 5/2 so (1+s^4) g^2 is integrable
//   exp_decay(c, a):    g = c exp(-a t)
class TemporalProfile {
public:
    enum class Kind { Constant, Compact, PolyDecay, ExpDecay };

    static TemporalProfile constant(double c0);
    static TemporalProfile compact(double c, double t0);
    static TemporalProfile poly_decay(double c, double rate);
    static TemporalProfile exp_decay(double c, double rate);

    Kind kind() const { return kind_; }
    double operator()(double t) const;
    double scale() const { return c_; }
    double parameter() const { return par_; }

    bool square_integrable() const { return kind_ != Kind::Constant; }
    bool h2_lower_bounded() const { return kind_ == Kind::Constant; } // inf_t g >= c0 > 0
    // closed-form integral of g^2 over [a, b]
    double sq_integral(double a, double b) const;
    // closed-form tail of g^2 beyond T (the mass a finite horizon neglects)
    double sq_tail(double T) const;
    // closed-form integral of (1+s^4) g^2 over [0, inf); may be infinite
    double weighted_sq_integral() const;

    std::string describe() const;

private:
    TemporalProfile(Kind k, double c, double par) : kind_(k), c_(c), par_(par) {}
    Kind kind_;
    double c_;
    double par_; // T0 (compact) or rate
};

} // namespace sns
