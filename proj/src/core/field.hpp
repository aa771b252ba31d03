#pragma once

#include <string>
#include <vector>

#include "common.hpp"
#include "grid.hpp"

namespace sns {

// Complex scalar field sampled on a Grid. Values are treated as immutable
// by every public operation; operations return fresh fields.
struct Field {
    Field() = default;
    Field(const Grid& g, cplx fill = cplx(0.0, 0.0))
        : grid(g), values(g.size(), fill) {}
    Field(const Grid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.size()) throw Error("field: value count must equal n^d");
    }

    Grid grid{1, 8, 1.0};
    std::vector<cplx> values;

    std::size_t size() const { return values.size(); }
};

// Time-indexed sequence of fields on a shared grid, strictly increasing times.
struct SpaceTimeSeries {
    std::vector<double> times;
    std::vector<Field> fields;

    void push(double t, Field f);
    const Grid& grid() const;
};

void check_finite(const Field& f, const char* what);

// --- pointwise construction helpers -------------------------------------

Field constant_field(const Grid& g, cplx c);
Field gaussian_field(const Grid& g, cplx amplitude, double width);
Field sech_field(const Grid& g, cplx amplitude, double width);
Field plane_wave_field(const Grid& g, cplx amplitude, const std::vector<int>& mode);

// --- norms and calculus ---------------------------------------------------

// (sum |f|^p dx^d)^(1/p); p = inf gives the sup norm. Requires p >= 1.
double norm_lp(const Field& f, double p);
double norm_h1(const Field& f);
// H1 norm plus | |x| f |_2, x from the box center.
double norm_sigma(const Field& f);

std::vector<Field> gradient(const Field& f);   // spectral, one field per axis
Field laplacian(const Field& f);

double inner_l2_real(const Field& a, const Field& b); // Re sum conj(a) b dx^d
double rel_l2_distance(const Field& a, const Field& b);

// Trapezoid-in-time of norm_lp(.,p)^q, then the 1/q power; q = inf takes the
// max over snapshots. Needs at least 2 snapshots unless q = inf.
double spacetime_norm(const SpaceTimeSeries& s, double p, double q);

// W^{1,p}-in-space version: ((|f|_p)^p + sum_j (|d_j f|_p)^p)^(1/p) per slice.
double spacetime_norm_w1p(const SpaceTimeSeries& s, double p, double q);

// --- local smoothing (dyadic frequency bands x spatial shells) ------------

struct LocalSmoothingBreakdown {
    double value = 0.0;
    std::vector<int> band_index;
    std::vector<double> band_value; // contribution 2^k |S_k u|^2 per band
};

// Truncated local smoothing norm over frequency bands k in [-K, K] with
// raised-cosine dyadic cutoffs; shells limited to those meeting the box.
LocalSmoothingBreakdown local_smoothing_norm(const SpaceTimeSeries& s, int K);
// Dual-weight variant: identical bands/shells with 2^(-k) weights.
LocalSmoothingBreakdown local_smoothing_dual_norm(const SpaceTimeSeries& s, int K);

// Littlewood-Paley projection onto band k (raised-cosine on |xi|).
Field band_project(const Field& f, int k);

// --- serialization ---------------------------------------------------------

// Flat binary layout: little-endian u64 d, u64 n, f64 L, then re/im f64
// pairs in row-major order.
void write_field(const Field& f, const std::string& path);
Field read_field(const std::string& path);
// 1-d slice through the box center along axis 0, CSV columns x,re,im.
void write_field_slice_csv(const Field& f, const std::string& path,
                           const std::string& header_comment);

} // namespace sns
