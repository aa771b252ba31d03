#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace sns {
namespace fft {

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

// Plans are created once per (d, n) with FFTW_UNALIGNED so they can execute
// on any caller buffer.
PlanPair& plans_for(const Grid& g) {
    static std::map<std::pair<int, int>, PlanPair> cache;
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto key = std::make_pair(g.d(), g.n());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<cplx> scratch(g.size());
    auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
    int dims[3] = {g.n(), g.n(), g.n()};
    PlanPair pp;
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    pp.fwd = fftw_plan_dft(g.d(), dims, ptr, ptr, FFTW_FORWARD, flags);
    pp.bwd = fftw_plan_dft(g.d(), dims, ptr, ptr, FFTW_BACKWARD, flags);
    if (!pp.fwd || !pp.bwd) throw Error("fftw plan creation failed");
    auto res = cache.emplace(key, pp);
    return res.first->second;
}

} // namespace

void forward(const Grid& g, std::vector<cplx>& data) {
    PlanPair& pp = plans_for(g);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(pp.fwd, ptr, ptr);
}

void inverse(const Grid& g, std::vector<cplx>& data) {
    PlanPair& pp = plans_for(g);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(pp.bwd, ptr, ptr);
    double scale = 1.0 / static_cast<double>(g.size());
    for (auto& v : data) v *= scale;
}

double high_mode_mass_fraction(const Grid& g, const std::vector<cplx>& values) {
    std::vector<cplx> spec = values;
    forward(g, spec);
    const int n = g.n();
    const int cutoff = n / 3;
    double total = 0.0, high = 0.0;
    for (std::size_t idx = 0; idx < spec.size(); ++idx) {
        auto ii = g.unflatten(idx);
        bool is_high = false;
        for (int a = 0; a < g.d(); ++a) {
            int m = ii[static_cast<std::size_t>(a)];
            int mm = (m < n / 2) ? m : m - n;
            if (std::abs(mm) >= cutoff) { is_high = true; break; }
        }
        double e = std::norm(spec[idx]);
        total += e;
        if (is_high) high += e;
    }
    return total > 0.0 ? high / total : 0.0;
}

std::vector<cplx> interpolate_tensor(const Grid& g, const std::vector<cplx>& values,
                                     const std::vector<std::vector<double>>& points) {
    const int d = g.d();
    const int n = g.n();
    if (static_cast<int>(points.size()) != d) throw Error("interpolate_tensor: need one point set per axis");
    for (const auto& p : points)
        if (static_cast<int>(p.size()) != n) throw Error("interpolate_tensor: point set size mismatch");

    // Fourier coefficients against box-centered positions:
    // f(y) = sum_m c_m exp(i k_m . y), c_m = (-1)^(sum m_a) F_m / n^d.
    std::vector<cplx> coef = values;
    forward(g, coef);
    double scale = 1.0 / static_cast<double>(g.size());
    for (std::size_t idx = 0; idx < coef.size(); ++idx) {
        auto ii = g.unflatten(idx);
        int parity = 0;
        for (int a = 0; a < d; ++a) parity += ii[static_cast<std::size_t>(a)];
        coef[idx] *= ((parity & 1) ? -scale : scale);
    }

    // Contract one axis at a time with E[t][m] = exp(i k_m y_t).
    std::vector<cplx> cur = std::move(coef);
    std::vector<cplx> kernel(static_cast<std::size_t>(n) * n);
    std::vector<cplx> next(cur.size());
    std::size_t stride_outer = 1; // product of axes already processed (target space)
    for (int axis = 0; axis < d; ++axis) {
        for (int t = 0; t < n; ++t) {
            double y = points[static_cast<std::size_t>(axis)][static_cast<std::size_t>(t)];
            for (int m = 0; m < n; ++m) {
                double km = g.wavenumber(m);
                kernel[static_cast<std::size_t>(t) * n + m] = std::polar(1.0, km * y);
            }
        }
        // cur has layout [done_axes..., m_axis, remaining_modes...]; the axis
        // being transformed always sits right after the processed block.
        std::size_t inner = cur.size() / (stride_outer * static_cast<std::size_t>(n));
        for (std::size_t o = 0; o < stride_outer; ++o) {
            const cplx* src = cur.data() + o * static_cast<std::size_t>(n) * inner;
            cplx* dst = next.data() + o * static_cast<std::size_t>(n) * inner;
            for (int t = 0; t < n; ++t) {
                const cplx* krow = kernel.data() + static_cast<std::size_t>(t) * n;
                for (std::size_t in = 0; in < inner; ++in) {
                    cplx acc(0.0, 0.0);
                    for (int m = 0; m < n; ++m) acc += krow[m] * src[static_cast<std::size_t>(m) * inner + in];
                    dst[static_cast<std::size_t>(t) * inner + in] = acc;
                }
            }
        }
        cur.swap(next);
        stride_outer *= static_cast<std::size_t>(n);
    }
    return cur;
}

} // namespace fft
} // namespace sns
