#include "field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include "fft.hpp"

namespace sns {

void SpaceTimeSeries::push(double t, Field f) {
    if (!times.empty()) {
        if (!(t > times.back())) throw Error("series: times must be strictly increasing");
        if (!fields.back().grid.same_as(f.grid)) throw Error("series: all fields share one grid");
    }
    times.push_back(t);
    fields.push_back(std::move(f));
}

const Grid& SpaceTimeSeries::grid() const {
    if (fields.empty()) throw Error("series: empty");
    return fields.front().grid;
}

void check_finite(const Field& f, const char* what) {
    for (const auto& v : f.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw BlowUpError(std::string(what) + ": non-finite field entry", 0.0);
}

Field constant_field(const Grid& g, cplx c) { return Field(g, c); }

Field gaussian_field(const Grid& g, cplx amplitude, double width) {
    Field f(g);
    double q = -0.5 / (width * width);
    for (std::size_t i = 0; i < f.size(); ++i) f.values[i] = amplitude * std::exp(q * g.radius_sq(i));
    return f;
}

Field sech_field(const Grid& g, cplx amplitude, double width) {
    Field f(g);
    for (std::size_t i = 0; i < f.size(); ++i) {
        double r = std::sqrt(g.radius_sq(i)) / width;
        f.values[i] = amplitude / std::cosh(r);
    }
    return f;
}

Field plane_wave_field(const Grid& g, cplx amplitude, const std::vector<int>& mode) {
    if (static_cast<int>(mode.size()) != g.d()) throw Error("plane_wave: mode index per axis");
    Field f(g);
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto ii = g.unflatten(i);
        double phase = 0.0;
        for (int a = 0; a < g.d(); ++a)
            phase += (2.0 * kPi / g.L()) * mode[static_cast<std::size_t>(a)] *
                     g.position(ii[static_cast<std::size_t>(a)]);
        f.values[i] = amplitude * std::polar(1.0, phase);
    }
    return f;
}

double norm_lp(const Field& f, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    if (!(p >= 1.0)) throw Error("norm_lp: exponent must satisfy p >= 1");
    double acc = 0.0;
    if (p == 2.0) {
        for (const auto& v : f.values) acc += std::norm(v);
    } else {
        for (const auto& v : f.values) acc += std::pow(std::abs(v), p);
    }
    return std::pow(acc * f.grid.cell_volume(), 1.0 / p);
}

std::vector<Field> gradient(const Field& f) {
    const Grid& g = f.grid;
    std::vector<cplx> spec = f.values;
    fft::forward(g, spec);
    std::vector<Field> out;
    out.reserve(static_cast<std::size_t>(g.d()));
    const int n = g.n();
    for (int a = 0; a < g.d(); ++a) {
        Field da(g);
        std::vector<cplx> s = spec;
        for (std::size_t i = 0; i < s.size(); ++i) {
            auto ii = g.unflatten(i);
            int m = ii[static_cast<std::size_t>(a)];
            double k = (m == n / 2) ? 0.0 : g.wavenumber(m); // drop the odd Nyquist mode
            s[i] *= cplx(0.0, k);
        }
        fft::inverse(g, s);
        da.values = std::move(s);
        out.push_back(std::move(da));
    }
    return out;
}

Field laplacian(const Field& f) {
    const Grid& g = f.grid;
    std::vector<cplx> spec = f.values;
    fft::forward(g, spec);
    for (std::size_t i = 0; i < spec.size(); ++i) {
        auto ii = g.unflatten(i);
        double k2 = 0.0;
        for (int a = 0; a < g.d(); ++a) {
            double k = g.wavenumber(ii[static_cast<std::size_t>(a)]);
            k2 += k * k;
        }
        spec[i] *= -k2;
    }
    fft::inverse(g, spec);
    return Field(g, std::move(spec));
}

double norm_h1(const Field& f) {
    double acc = 0.0;
    for (const auto& v : f.values) acc += std::norm(v);
    auto grad = gradient(f);
    for (const auto& gfield : grad)
        for (const auto& v : gfield.values) acc += std::norm(v);
    return std::sqrt(acc * f.grid.cell_volume());
}

double norm_sigma(const Field& f) {
    double w = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) w += f.grid.radius_sq(i) * std::norm(f.values[i]);
    return norm_h1(f) + std::sqrt(w * f.grid.cell_volume());
}

double inner_l2_real(const Field& a, const Field& b) {
    if (!a.grid.same_as(b.grid)) throw Error("inner_l2: grid mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += std::real(std::conj(a.values[i]) * b.values[i]);
    return acc * a.grid.cell_volume();
}

double rel_l2_distance(const Field& a, const Field& b) {
    if (!a.grid.same_as(b.grid)) throw Error("rel_l2: grid mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a.values[i] - b.values[i]);
        den += std::norm(a.values[i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double spacetime_norm(const SpaceTimeSeries& s, double p, double q) {
    if (!(q >= 1.0) && !std::isinf(q)) throw Error("spacetime_norm: q must satisfy q >= 1");
    if (std::isinf(q)) {
        double m = 0.0;
        for (const auto& f : s.fields) m = std::max(m, norm_lp(f, p));
        return m;
    }
    if (s.times.size() < 2) throw Error("spacetime_norm: need at least 2 snapshots");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < s.times.size(); ++i) {
        double a = std::pow(norm_lp(s.fields[i], p), q);
        double b = std::pow(norm_lp(s.fields[i + 1], p), q);
        acc += 0.5 * (a + b) * (s.times[i + 1] - s.times[i]);
    }
    return std::pow(acc, 1.0 / q);
}

namespace {
double w1p_slice(const Field& f, double p) {
    double acc = std::pow(norm_lp(f, p), p);
    for (const auto& gfield : gradient(f)) acc += std::pow(norm_lp(gfield, p), p);
    return std::pow(acc, 1.0 / p);
}
} // namespace

double spacetime_norm_w1p(const SpaceTimeSeries& s, double p, double q) {
    if (std::isinf(q)) {
        double m = 0.0;
        for (const auto& f : s.fields) m = std::max(m, w1p_slice(f, p));
        return m;
    }
    if (s.times.size() < 2) throw Error("spacetime_norm: need at least 2 snapshots");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < s.times.size(); ++i) {
        double a = std::pow(w1p_slice(s.fields[i], p), q);
        double b = std::pow(w1p_slice(s.fields[i + 1], p), q);
        acc += 0.5 * (a + b) * (s.times[i + 1] - s.times[i]);
    }
    return std::pow(acc, 1.0 / q);
}

// --- local smoothing -------------------------------------------------------

namespace {

// Raised-cosine dyadic partition of unity on |xi|:
// psi_k(rho) = cos^2((pi/2) log2(rho / 2^k)) on [2^(k-1), 2^(k+1)], else 0.
// The zero mode falls outside every finite band.
double lp_cutoff(double rho, int k) {
    if (rho <= 0.0) return 0.0;
    double s = std::log2(rho) - k;
    if (s <= -1.0 || s >= 1.0) return 0.0;
    double c = std::cos(0.5 * kPi * s);
    return c * c;
}

// Space-time L2 over one shell with a pointwise weight, trapezoid in time.
double shell_l2_sq(const std::vector<Field>& proj, const std::vector<double>& times,
                   double rlo, double rhi, double (*weight)(double, double), double wpar) {
    const Grid& g = proj.front().grid;
    std::vector<double> slice(times.size(), 0.0);
    for (std::size_t ti = 0; ti < proj.size(); ++ti) {
        double acc = 0.0;
        for (std::size_t i = 0; i < proj[ti].size(); ++i) {
            double r = std::sqrt(g.radius_sq(i));
            if (r < rlo || r >= rhi) continue;
            acc += weight(r, wpar) * std::norm(proj[ti].values[i]);
        }
        slice[ti] = acc * g.cell_volume();
    }
    double out = 0.0;
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        out += 0.5 * (slice[i] + slice[i + 1]) * (times[i + 1] - times[i]);
    return out;
}

double w_one(double, double) { return 1.0; }
double w_jap(double r, double) { return 1.0 / std::sqrt(1.0 + r * r); }        // <x>^-1
double w_shift(double r, double c) { return 1.0 / (r + c); }                    // (|x|+2^-k)^-1

// |S_k u|_{LS_k} per Section-5 shell norms, truncated to shells meeting the box.
double ls_band_norm(const std::vector<Field>& proj, const std::vector<double>& times, int k) {
    const Grid& g = proj.front().grid;
    double rmax = 0.5 * g.L() * std::sqrt(static_cast<double>(g.d()));
    int jmax = std::max(0, static_cast<int>(std::ceil(std::log2(std::max(2.0, rmax)))));
    if (k >= 0) {
        double v = std::sqrt(shell_l2_sq(proj, times, 0.0, 2.0, w_one, 0.0));
        double sup = 0.0;
        for (int j = 1; j <= jmax; ++j) {
            double s = std::sqrt(shell_l2_sq(proj, times, std::pow(2.0, j), std::pow(2.0, j + 1), w_jap, 0.0));
            sup = std::max(sup, s);
        }
        return v + sup;
    }
    double r0 = std::pow(2.0, -k); // 2^(-k) with k < 0, so >= 2
    double v = std::pow(2.0, 0.5 * k) * std::sqrt(shell_l2_sq(proj, times, 0.0, r0, w_one, 0.0));
    double sup = 0.0;
    for (int j = -k; j <= jmax; ++j) {
        double s = std::sqrt(shell_l2_sq(proj, times, std::pow(2.0, j), std::pow(2.0, j + 1), w_shift, std::pow(2.0, k)));
        sup = std::max(sup, s);
    }
    return v + sup;
}

LocalSmoothingBreakdown ls_impl(const SpaceTimeSeries& s, int K, bool dual) {
    if (K < 1) throw Error("local_smoothing_norm: K >= 1");
    if (s.fields.empty()) return {};
    LocalSmoothingBreakdown out;
    double total = 0.0;
    for (int k = -K; k <= K; ++k) {
        std::vector<Field> proj;
        proj.reserve(s.fields.size());
        bool band_empty = true;
        for (const auto& f : s.fields) {
            Field pf = band_project(f, k);
            for (const auto& v : pf.values)
                if (v != cplx(0.0, 0.0)) { band_empty = false; break; }
            proj.push_back(std::move(pf));
        }
        double contrib = 0.0;
        if (!band_empty) {
            double bn = ls_band_norm(proj, s.times, k);
            contrib = std::pow(2.0, dual ? -k : k) * bn * bn;
        }
        out.band_index.push_back(k);
        out.band_value.push_back(contrib);
        total += contrib;
    }
    out.value = std::sqrt(total);
    return out;
}

} // namespace

Field band_project(const Field& f, int k) {
    const Grid& g = f.grid;
    std::vector<cplx> spec = f.values;
    fft::forward(g, spec);
    for (std::size_t i = 0; i < spec.size(); ++i) {
        auto ii = g.unflatten(i);
        double k2 = 0.0;
        for (int a = 0; a < g.d(); ++a) {
            double kk = g.wavenumber(ii[static_cast<std::size_t>(a)]);
            k2 += kk * kk;
        }
        spec[i] *= lp_cutoff(std::sqrt(k2), k);
    }
    fft::inverse(g, spec);
    return Field(g, std::move(spec));
}

LocalSmoothingBreakdown local_smoothing_norm(const SpaceTimeSeries& s, int K) {
    return ls_impl(s, K, false);
}

LocalSmoothingBreakdown local_smoothing_dual_norm(const SpaceTimeSeries& s, int K) {
    return ls_impl(s, K, true);
}

// --- serialization -----------------------------------------------------------

namespace {
void put_u64(std::ofstream& os, uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}
uint64_t get_u64(std::ifstream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
}
void put_f64(std::ofstream& os, double v) {
    uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}
double get_f64(std::ifstream& is) {
    uint64_t u = get_u64(is);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}
} // namespace

void write_field(const Field& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("write_field: cannot open " + path);
    put_u64(os, static_cast<uint64_t>(f.grid.d()));
    put_u64(os, static_cast<uint64_t>(f.grid.n()));
    put_f64(os, f.grid.L());
    for (const auto& v : f.values) {
        put_f64(os, v.real());
        put_f64(os, v.imag());
    }
    if (!os) throw Error("write_field: write failed for " + path);
}

Field read_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("read_field: cannot open " + path);
    int d = static_cast<int>(get_u64(is));
    int n = static_cast<int>(get_u64(is));
    double L = get_f64(is);
    Grid g(d, n, L);
    Field f(g);
    for (auto& v : f.values) {
        double re = get_f64(is);
        double im = get_f64(is);
        v = cplx(re, im);
    }
    if (!is) throw Error("read_field: truncated file " + path);
    return f;
}

void write_field_slice_csv(const Field& f, const std::string& path,
                           const std::string& header_comment) {
    std::ofstream os(path);
    if (!os) throw Error("write_field_slice_csv: cannot open " + path);
    if (!header_comment.empty()) os << "# " << header_comment << "\n";
    os << "x,re,im\n";
    const Grid& g = f.grid;
    std::size_t stride = 1;
    for (int a = 1; a < g.d(); ++a) stride *= static_cast<std::size_t>(g.n());
    std::size_t offset = 0;
    // pass through the box center on the trailing axes
    std::size_t sub = stride;
    for (int a = 1; a < g.d(); ++a) {
        sub /= static_cast<std::size_t>(g.n());
        offset += sub * static_cast<std::size_t>(g.n() / 2);
    }
    char buf[96];
    for (int i = 0; i < g.n(); ++i) {
        const cplx v = f.values[static_cast<std::size_t>(i) * stride + offset];
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", g.position(i), v.real(), v.imag());
        os << buf;
    }
}

} // namespace sns
