#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "common.hpp"

namespace sns {

// Uniform periodic box [-L/2, L/2)^d, position origin at the box center.
// n must be a power of two; wavenumbers are the exact DFT duals
// k_m = (2*pi/L) * m with m in {-n/2, ..., n/2-1} per axis.
class Grid {
public:
    Grid(int d, int n, double L);

    int d() const { return d_; }
    int n() const { return n_; }
    double L() const { return L_; }
    double dx() const { return dx_; }
    std::size_t size() const { return size_; }
    double cell_volume() const { return cell_vol_; }

    const std::vector<double>& axis_positions() const { return pos_; }
    const std::vector<double>& axis_wavenumbers() const { return wav_; }

    // Decompose a flat row-major index (axis 0 slowest) into per-axis indices.
    std::array<int, 3> unflatten(std::size_t idx) const {
        std::array<int, 3> out{0, 0, 0};
        for (int a = d_ - 1; a >= 0; --a) {
            out[static_cast<std::size_t>(a)] = static_cast<int>(idx % static_cast<std::size_t>(n_));
            idx /= static_cast<std::size_t>(n_);
        }
        return out;
    }

    double position(int axis_index) const { return pos_[static_cast<std::size_t>(axis_index)]; }
    double wavenumber(int axis_index) const { return wav_[static_cast<std::size_t>(axis_index)]; }

    // |x|^2 at a flat index, measured from the box center.
    double radius_sq(std::size_t idx) const {
        auto ii = unflatten(idx);
        double r2 = 0.0;
        for (int a = 0; a < d_; ++a) {
            double x = pos_[static_cast<std::size_t>(ii[static_cast<std::size_t>(a)])];
            r2 += x * x;
        }
        return r2;
    }

    bool same_as(const Grid& o) const { return d_ == o.d_ && n_ == o.n_ && L_ == o.L_; }

private:
    int d_;
    int n_;
    double L_;
    double dx_;
    std::size_t size_;
    double cell_vol_;
    std::vector<double> pos_;
    std::vector<double> wav_;
};

} // namespace sns
