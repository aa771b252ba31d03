#pragma once

#include <vector>

#include "common.hpp"
#include "grid.hpp"

namespace sns {

// Complex-to-complex DFTs on the grid, forward unnormalized,
// inverse carrying the 1/n^d factor. Backed by FFTW with
// FFTW_ESTIMATE plans so the kernel choice is deterministic run to run;
// plan creation is serialized, execution is thread-safe.
namespace fft {

void forward(const Grid& g, std::vector<cplx>& data);  // in place
void inverse(const Grid& g, std::vector<cplx>& data);  // in place

// Fraction of spectral L2 mass carried by modes with |m| >= n/3 on any axis
// (the top third of the resolvable band).
double high_mode_mass_fraction(const Grid& g, const std::vector<cplx>& values);

// Evaluate the trigonometric interpolant of `values` on the tensor grid of
// per-axis target points (points[a] has size n). Cost d*n^(d+1).
std::vector<cplx> interpolate_tensor(const Grid& g, const std::vector<cplx>& values,
                                     const std::vector<std::vector<double>>& points);

} // namespace fft

} // namespace sns
