#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>

#include "core/dynamics.hpp"
#include "core/field.hpp"
#include "core/fft.hpp"
#include "core/rng.hpp"

using namespace sns;

namespace {

Field random_band_limited(const Grid& g, uint64_t seed, int max_mode) {
    // a handful of low modes with seeded coefficients
    Field f(g);
    int nm = 0;
    for (int m = -max_mode; m <= max_mode; ++m) {
        std::vector<int> mode(static_cast<std::size_t>(g.d()), 0);
        mode[0] = m;
        double cr = gaussian_draw(seed, 7, 0, static_cast<uint64_t>(nm * 2));
        double ci = gaussian_draw(seed, 7, 0, static_cast<uint64_t>(nm * 2 + 1));
        Field pw = plane_wave_field(g, cplx(cr, ci), mode);
        for (std::size_t i = 0; i < f.size(); ++i) f.values[i] += pw.values[i];
        ++nm;
    }
    return f;
}

} // namespace

TEST_CASE("norm_lp basics") {
    Grid g(1, 256, 40.0);
    Field zero(g);
    CHECK(norm_lp(zero, 2.0) == doctest::Approx(0.0));
    CHECK(norm_lp(zero, std::numeric_limits<double>::infinity()) == 0.0);

    // constant c on the box: |c| L^(d/2) at p = 2
    Field c = constant_field(g, cplx(1.5, -2.0));
    double expect = std::abs(cplx(1.5, -2.0)) * std::sqrt(40.0);
    CHECK(norm_lp(c, 2.0) == doctest::Approx(expect).epsilon(1e-13));

    // Gaussian e^{-x^2/2}: |f|_2 = pi^(1/4), tails < machine eps at L = 40
    Field gau = gaussian_field(g, 1.0, 1.0);
    CHECK(std::abs(norm_lp(gau, 2.0) - std::pow(kPi, 0.25)) < 1e-10);

    CHECK_THROWS(norm_lp(c, 0.5));
}

TEST_CASE("norm_lp homogeneity and domination") {
    Grid g(1, 64, 10.0);
    Field f = random_band_limited(g, 11, 5);
    for (double p : {1.0, 2.0, 3.5, 7.0}) {
        double n1 = norm_lp(f, p);
        Field cf(g);
        for (std::size_t i = 0; i < f.size(); ++i) cf.values[i] = cplx(-2.5, 1.0) * f.values[i];
        CHECK(norm_lp(cf, p) == doctest::Approx(std::abs(cplx(-2.5, 1.0)) * n1).epsilon(1e-12));
    }
    // |f| <= |g| pointwise implies norm ordering
    Field dom(g);
    for (std::size_t i = 0; i < f.size(); ++i) dom.values[i] = f.values[i] * 1.7;
    CHECK(norm_lp(f, 3.0) <= norm_lp(dom, 3.0));
}

TEST_CASE("H1 and Sigma norms") {
    Grid g(1, 256, 40.0);
    CHECK(norm_h1(Field(g)) == 0.0);
    CHECK(norm_sigma(Field(g)) == 0.0);

    // plane wave A e^{ikx}: H1 = |A| L^(1/2) (1+k^2)^(1/2)
    std::vector<int> mode = {3};
    cplx A(0.7, 0.4);
    Field pw = plane_wave_field(g, A, mode);
    double k = 2.0 * kPi / 40.0 * 3;
    double expect = std::abs(A) * std::sqrt(40.0) * std::sqrt(1.0 + k * k);
    CHECK(norm_h1(pw) == doctest::Approx(expect).epsilon(1e-12));

    // Gaussian moments: |f|_2^2 = sqrt(pi), |f'|_2^2 = sqrt(pi)/2, | |x| f|_2^2 = sqrt(pi)/2
    Field gau = gaussian_field(g, 1.0, 1.0);
    double sp = std::sqrt(kPi);
    double h1 = std::sqrt(sp + sp / 2.0);
    double sig = h1 + std::sqrt(sp / 2.0);
    CHECK(std::abs(norm_h1(gau) - h1) < 1e-10);
    CHECK(std::abs(norm_sigma(gau) - sig) < 1e-10);
}

TEST_CASE("spectral gradient and laplacian") {
    Grid g(1, 256, 40.0);
    Field c = constant_field(g, cplx(2.0, 1.0));
    auto gc = gradient(c);
    CHECK(norm_lp(gc[0], 2.0) < 1e-12);

    // d/dx e^{ikx} = ik e^{ikx} exactly on resolvable modes
    Field pw = plane_wave_field(g, 1.0, {5});
    double k = 2.0 * kPi / 40.0 * 5;
    auto dpw = gradient(pw);
    double worst = 0.0;
    for (std::size_t i = 0; i < pw.size(); ++i)
        worst = std::max(worst, std::abs(dpw[0].values[i] - cplx(0.0, k) * pw.values[i]));
    CHECK(worst < 1e-12);

    // laplacian of the Gaussian against (x^2 - 1) e^{-x^2/2}
    Field gau = gaussian_field(g, 1.0, 1.0);
    Field lap = laplacian(gau);
    worst = 0.0;
    for (std::size_t i = 0; i < gau.size(); ++i) {
        double x2 = g.radius_sq(i);
        worst = std::max(worst, std::abs(lap.values[i] - (x2 - 1.0) * gau.values[i]));
    }
    CHECK(worst < 1e-8);

    // laplacian of e^{ikx} = -k^2 e^{ikx}
    Field lpw = laplacian(pw);
    worst = 0.0;
    for (std::size_t i = 0; i < pw.size(); ++i)
        worst = std::max(worst, std::abs(lpw.values[i] + k * k * pw.values[i]));
    CHECK(worst < 1e-10);
}

TEST_CASE("Parseval") {
    Grid g(2, 32, 12.0);
    Field f = random_band_limited(g, 23, 6);
    double pos = norm_lp(f, 2.0);
    std::vector<cplx> spec = f.values;
    fft::forward(g, spec);
    double acc = 0.0;
    for (const auto& v : spec) acc += std::norm(v);
    // unnormalized DFT: |f|_2^2 = sum |F|^2 / n^d * dx^d
    double k_side = std::sqrt(acc / static_cast<double>(g.size()) * g.cell_volume());
    CHECK(std::abs(pos - k_side) / pos < 1e-12);
}

TEST_CASE("spacetime norms") {
    Grid g(1, 256, 40.0);
    SpaceTimeSeries zero;
    zero.push(0.0, Field(g));
    zero.push(1.0, Field(g));
    CHECK(spacetime_norm(zero, 2.0, 2.0) == 0.0);

    // q = inf on a time-constant series
    Field gau = gaussian_field(g, 1.0, 1.0);
    SpaceTimeSeries cs;
    cs.push(0.0, gau);
    cs.push(1.0, gau);
    double inf = std::numeric_limits<double>::infinity();
    CHECK(spacetime_norm(cs, 2.0, inf) == doctest::Approx(norm_lp(gau, 2.0)));

    SpaceTimeSeries one;
    one.push(0.0, gau);
    CHECK_THROWS(spacetime_norm(one, 2.0, 2.0));

    // free-flow Gaussian in L^6_t L^6_x over [0, 10] against the closed form
    // |u(t)|_6 = (2 pi / 6)^(1/12) (1+4t^2)^(-1/6) for u0 = e^{-x^2/2}
    SpaceTimeSeries flow;
    int steps = 200;
    double T = 10.0;
    for (int i = 0; i <= steps; ++i) {
        double t = T * i / steps;
        flow.push(i == 0 ? 0.0 : t, free_propagate(gau, t));
    }
    double numeric = spacetime_norm(flow, 6.0, 6.0);
    // oracle: int_0^10 |u(t)|_6^6 dt with |u(t)|_6^6 = (2pi/6)^(1/2) (1+4t^2)^-1,
    // closed form (pi/12)^(1/2)... evaluate by dense quadrature of the formula
    double acc = 0.0;
    int fine = 200000;
    for (int i = 0; i < fine; ++i) {
        double t0 = T * i / fine, t1 = T * (i + 1) / fine;
        auto f6 = [](double t) { return std::sqrt(2.0 * kPi / 6.0) / (1.0 + 4.0 * t * t); };
        acc += 0.5 * (f6(t0) + f6(t1)) * (t1 - t0);
    }
    double oracle = std::pow(acc, 1.0 / 6.0);
    CHECK(std::abs(numeric - oracle) / oracle < 0.01);
}

TEST_CASE("local smoothing norm") {
    Grid g(1, 128, 32.0);
    SpaceTimeSeries zero;
    zero.push(0.0, Field(g));
    zero.push(1.0, Field(g));
    CHECK(local_smoothing_norm(zero, 4).value == 0.0);

    SpaceTimeSeries rnd;
    rnd.push(0.0, random_band_limited(g, 3, 20));
    rnd.push(0.5, random_band_limited(g, 4, 20));
    rnd.push(1.0, random_band_limited(g, 5, 20));
    double v4 = local_smoothing_norm(rnd, 4).value;
    double v8 = local_smoothing_norm(rnd, 8).value;
    CHECK(v4 <= v8 + 1e-15);

    // single-band signal: bands k0-1..k0+1 carry essentially everything
    // modes near |xi| = 2 -> k0 = 1
    Field band(g);
    for (int m = 9; m <= 11; ++m) { // |xi| = 2 pi m / 32 in [1.77, 2.16]
        Field pw = plane_wave_field(g, cplx(1.0, 0.3), {m});
        for (std::size_t i = 0; i < band.size(); ++i) band.values[i] += pw.values[i];
    }
    SpaceTimeSeries bs;
    bs.push(0.0, band);
    bs.push(1.0, band);
    auto breakdown = local_smoothing_norm(bs, 6);
    double total = 0.0, near = 0.0;
    for (std::size_t i = 0; i < breakdown.band_index.size(); ++i) {
        total += breakdown.band_value[i];
        if (std::abs(breakdown.band_index[i] - 1) <= 1) near += breakdown.band_value[i];
    }
    CHECK(near >= 0.95 * total);

    // dual norm computes with the same truncation
    CHECK(local_smoothing_dual_norm(rnd, 4).value > 0.0);
}

TEST_CASE("field serialization round trip") {
    Grid g(2, 16, 8.0);
    Field f = random_band_limited(g, 31, 4);
    auto tmp = std::filesystem::temp_directory_path() / "sns_test_field.bin";
    write_field(f, tmp.string());
    Field r = read_field(tmp.string());
    CHECK(r.grid.d() == 2);
    CHECK(r.grid.n() == 16);
    CHECK(r.grid.L() == 8.0);
    bool same = true;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f.values[i] != r.values[i]) same = false;
    CHECK(same);
    std::filesystem::remove(tmp);
}

TEST_CASE("interaction norms of Lemma-3.1 type stay finite") {
    // the three norms in the |f|^(alpha-1) g product estimate, d = 3
    Grid g(3, 16, 12.0);
    double alpha = 7.0 / 3.0; // inside [1+4/d, 1+4/(d-2)]
    Field f = random_band_limited(g, 41, 3);
    Field h = random_band_limited(g, 43, 3);
    SpaceTimeSeries fs, hs, prod;
    for (int i = 0; i <= 4; ++i) {
        double t = 0.25 * i;
        Field ft = free_propagate(f, t);
        Field ht = free_propagate(h, t);
        Field p(g);
        for (std::size_t j = 0; j < p.size(); ++j)
            p.values[j] = std::pow(std::abs(ft.values[j]), alpha - 1.0) * ht.values[j];
        fs.push(t, ft);
        hs.push(t, ht);
        prod.push(t, p);
    }
    double d = 3.0;
    double p1 = 2.0 + 4.0 / d;
    double p1p = p1 / (p1 - 1.0);
    double q2 = 2.0 * (d + 2.0) / (d - 2.0);
    double p2 = 2.0 * d * (d + 2.0) / (d * d + 4.0);
    double lhs = spacetime_norm(prod, p1p, p1p);
    double r1 = spacetime_norm(fs, p1, p1);
    double r2 = spacetime_norm_w1p(fs, p2, q2);
    double r3 = spacetime_norm(hs, p1, p1);
    CHECK(std::isfinite(lhs));
    CHECK(std::isfinite(r1));
    CHECK(std::isfinite(r2));
    CHECK(std::isfinite(r3));
    double denom = std::pow(r1, 2.0 - (alpha - 1.0) * (d - 2.0) / 2.0) *
                   std::pow(r2, d * (alpha - 1.0) / 2.0 - 2.0) * r3;
    double measured_constant = lhs / denom;
    CHECK(std::isfinite(measured_constant));
    // recorded, not asserted: the constant is implementation-measured
    MESSAGE("lemma-3.1 measured constant: ", measured_constant);
}
