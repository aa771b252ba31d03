#pragma once

#include <string>
#include <vector>

#include "common.hpp"
#include "dynamics.hpp"
#include "field.hpp"
#include "noise.hpp"

namespace sns {

// Scalar functionals driving the a-priori estimates. `mass` is |X|_2^2
// (the squared norm, as in the Ito identity), H carries the lambda sign,
// V and G use the box-centered coordinate and the spectral gradient.
double mass(const Field& f);
double hamiltonian(const Field& f, double alpha, double lambda);
double virial(const Field& f);
double momentum(const Field& f);

// Pseudo-conformal energy at time s:
//   int |(x - 2i(1+s) grad) X|^2 dx + 8/(1+alpha) (1+s)^2 |X|_{alpha+1}^{alpha+1}.
// Also evaluates the decomposition 8(1+s)^2 H_{-1} - 4(1+s) G + V (defocusing
// Hamiltonian) and demands agreement to 1e-8 relative; returns the direct value.
double pc_energy(const Field& f, double s, double alpha);

enum class Functional { Mass, Hamiltonian, Virial, Momentum, PcEnergy };

const char* functional_name(Functional which);

struct ItoTerms {
    double drift = 0.0;               // ds integrand
    std::vector<double> sigma;        // per-channel dB integrands
};

// Exact integrand formulas of the Ito identities, evaluated by quadrature
// with analytic profile derivatives. For PcEnergy the model must be
// defocusing (lambda = -1).
ItoTerms ito_integrands(const Field& f, const NoiseModel& model, double t, Functional which,
                        double alpha);

struct ItoLedger {
    Functional which = Functional::Mass;
    std::vector<double> times;
    std::vector<double> value;
    std::vector<double> drift_cum;
    std::vector<std::vector<double>> stoch_cum; // [channel][snapshot]
    std::vector<double> residual;               // value - value0 - drift - sum stoch

    double final_abs_residual() const { return residual.empty() ? 0.0 : std::abs(residual.back()); }
};

// Replay the identity along a stored trajectory: stochastic terms use
// left-point evaluation with the very increments the integrator consumed
// (aggregated per snapshot interval), ds terms use the trapezoid rule.
ItoLedger ito_replay(const Trajectory& traj, const NoiseModel& model, Functional which);

void write_ledger_csv(const ItoLedger& ledger, const std::string& path,
                      const std::string& header_comment);

} // namespace sns
