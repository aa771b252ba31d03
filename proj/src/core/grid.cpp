#include "grid.hpp"

#include <cmath>

namespace sns {

namespace {
bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }
}

Grid::Grid(int d, int n, double L) : d_(d), n_(n), L_(L) {
    if (d < 1 || d > 3) throw ConfigError("grid: dimension must be 1, 2 or 3");
    if (n < 8 || !is_pow2(n)) throw ConfigError("grid: n must be a power of two >= 8");
    if (!(L > 0.0)) throw ConfigError("grid: L must be positive");
    dx_ = L_ / n_;
    size_ = 1;
    for (int a = 0; a < d_; ++a) size_ *= static_cast<std::size_t>(n_);
    cell_vol_ = std::pow(dx_, d_);
    pos_.resize(static_cast<std::size_t>(n_));
    wav_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
        pos_[static_cast<std::size_t>(i)] = -0.5 * L_ + dx_ * i;
        int m = (i < n_ / 2) ? i : i - n_; // FFTW mode ordering
        wav_[static_cast<std::size_t>(i)] = (2.0 * kPi / L_) * m;
    }
}

} // namespace sns
