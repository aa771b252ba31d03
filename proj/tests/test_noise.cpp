#include <doctest.h>

#include <cmath>

#include "core/noise.hpp"
#include "core/rng.hpp"

using namespace sns;

namespace {

NoiseModel one_channel(SpatialProfile sp, TemporalProfile tp, double horizon, int cells,
                       uint64_t seed, int lambda = -1) {
    std::vector<std::pair<SpatialProfile, TemporalProfile>> ch{{sp, tp}};
    return NoiseModel(ch, lambda, horizon, cells, seed);
}

} // namespace

TEST_CASE("brownian path determinism and bridge consistency") {
    BrownianPath p1(2.0, 64, 99, 0);
    BrownianPath p2(2.0, 64, 99, 0);
    CHECK(p1.increments() == p2.increments());
    BrownianPath q(2.0, 64, 100, 0);
    CHECK(p1.increments() != q.increments());

    BrownianPath fine = p1.refined();
    CHECK(fine.cells() == 128);
    BrownianPath back = fine.coarsened();
    for (int i = 0; i < 64; ++i)
        CHECK(back.increments()[static_cast<std::size_t>(i)] ==
              p1.increments()[static_cast<std::size_t>(i)]);

    // refined_to demands a power-of-two ratio
    CHECK_THROWS(p1.refined_to(2.0 / 64 / 3.0));
}

TEST_CASE("increment statistics") {
    // sample mean of dB/sqrt(dt) over 1e5 cells within the 4-sigma CLT band
    BrownianPath p(100.0, 100000, 2024, 1);
    double sd = std::sqrt(p.dt());
    double mean = 0.0;
    for (double x : p.increments()) mean += x / sd;
    mean /= p.cells();
    CHECK(std::abs(mean) <= 4.0 / std::sqrt(1e5));
}

TEST_CASE("ito quadrature is refinement-consistent for mesh-constant g") {
    // g compact and constant over the whole support: left-point sums telescope
    auto tp = TemporalProfile::compact(0.7, 2.0);
    auto sp = SpatialProfile::constant(cplx(0.0, 1.0));
    NoiseModel coarse = one_channel(sp, tp, 2.0, 16, 5);
    NoiseModel fine = coarse.refined_to(2.0 / 64);
    for (double t : {0.5, 1.0, 2.0}) {
        CHECK(coarse.ito_integral(0, t) == doctest::Approx(fine.ito_integral(0, t)).epsilon(1e-14));
    }
}

TEST_CASE("phi basics") {
    Grid g(1, 64, 20.0);
    // N = 0: zero field
    NoiseModel none({}, -1, 1.0, 8, 1);
    Field z = none.phi(0.5, g);
    for (const auto& v : z.values) CHECK(v == cplx(0.0, 0.0));

    // compact g with support ending before t: phi frozen, phi_star vanishes
    auto tp = TemporalProfile::compact(1.0, 0.5);
    auto sp = SpatialProfile::gaussian_decay(cplx(0.4, 0.2), 2.0);
    NoiseModel m = one_channel(sp, tp, 2.0, 32, 7);
    Field ps = m.phi_star(1.0, g);
    for (const auto& v : ps.values) CHECK(std::abs(v) < 1e-14);

    // conservative channel: Re phi identically zero
    auto spc = SpatialProfile::gaussian_decay(cplx(0.0, 0.8), 2.0);
    NoiseModel mc = one_channel(spc, TemporalProfile::exp_decay(1.0, 1.0), 2.0, 32, 9);
    CHECK(mc.conservative());
    Field pc = mc.phi(1.5, g);
    for (const auto& v : pc.values) CHECK(std::abs(v.real()) < 1e-14);
}

TEST_CASE("phi_star consistency with phi at the horizon") {
    Grid g(1, 32, 10.0);
    auto sp = SpatialProfile::gaussian_decay(cplx(0.3, -0.1), 1.5);
    auto tp = TemporalProfile::exp_decay(0.8, 1.2);
    NoiseModel m = one_channel(sp, tp, 3.0, 48, 17);
    for (double t : {0.0, 1.0, 2.5}) {
        Field ps = m.phi_star(t, g);
        Field p = m.phi(t, g);
        Field ph = m.phi(3.0, g);
        for (std::size_t i = 0; i < ps.size(); ++i)
            CHECK(std::abs(ps.values[i] - (p.values[i] - ph.values[i])) < 1e-14);
    }
}

TEST_CASE("mu and mu_hat") {
    Grid g(1, 32, 10.0);
    NoiseModel none({}, -1, 1.0, 8, 1);
    for (const auto& v : none.mu(0.5, g).values) CHECK(v == cplx(0.0, 0.0));
    for (const auto& v : none.mu_hat(0.5, g).values) CHECK(v == cplx(0.0, 0.0));

    // G = (1+i) g with constant profile: mu = g^2, mu_hat = g^2 (1+i)
    auto sp = SpatialProfile::constant(cplx(1.0, 1.0));
    auto tp = TemporalProfile::exp_decay(0.5, 1.0);
    NoiseModel m = one_channel(sp, tp, 2.0, 16, 3);
    double t = 0.7;
    double gval = 0.5 * std::exp(-t);
    Field mu = m.mu(t, g);
    Field mh = m.mu_hat(t, g);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        CHECK(std::abs(mu.values[i] - cplx(gval * gval, 0.0)) < 1e-15);
        CHECK(std::abs(mh.values[i] - gval * gval * cplx(1.0, 1.0)) < 1e-15);
    }

    // conservative model: mu_hat identically zero
    auto spc = SpatialProfile::inverse_poly(cplx(0.0, 0.6), 3.0);
    NoiseModel mc = one_channel(spc, tp, 2.0, 16, 3);
    for (const auto& v : mc.mu_hat(t, g).values) CHECK(std::abs(v) < 1e-16);

    // identity mu_hat = 1/2 sum (|G|^2 + G^2) pointwise on a generic profile
    auto spg = SpatialProfile::gaussian_decay(cplx(0.3, 0.7), 1.7);
    NoiseModel mg = one_channel(spg, tp, 2.0, 16, 3);
    Field pk = spg.evaluate(g);
    Field mh2 = mg.mu_hat(t, g);
    for (std::size_t i = 0; i < pk.size(); ++i) {
        cplx G = gval * pk.values[i];
        cplx expect = 0.5 * (std::norm(G) + G * G);
        CHECK(std::abs(mh2.values[i] - expect) <= 1e-14 * (1.0 + std::abs(expect)));
    }
}

TEST_CASE("coefficient fields vanish for (H2) constants and g = 0") {
    Grid g(1, 32, 10.0);
    auto sp = SpatialProfile::constant(cplx(2.0, 1.0));
    auto tp = TemporalProfile::constant(1.0);
    NoiseModel m = one_channel(sp, tp, 2.0, 16, 3);
    for (double t : {0.0, 1.0, 2.0}) {
        auto b = m.coeff_b(t, g);
        Field c = m.coeff_c(t, g);
        auto bs = m.coeff_b_star(t, g);
        Field cs = m.coeff_c_star(t, g);
        for (const auto& v : b[0].values) CHECK(v == cplx(0.0, 0.0));
        for (const auto& v : c.values) CHECK(v == cplx(0.0, 0.0));
        for (const auto& v : bs[0].values) CHECK(v == cplx(0.0, 0.0));
        for (const auto& v : cs.values) CHECK(v == cplx(0.0, 0.0));
    }

    auto tp0 = TemporalProfile::compact(0.0, 1.0); // g identically zero
    auto spg = SpatialProfile::gaussian_decay(cplx(0.5, 0.2), 1.0);
    NoiseModel m0 = one_channel(spg, tp0, 2.0, 16, 3);
    auto b0 = m0.coeff_b(1.0, g);
    for (const auto& v : b0[0].values) CHECK(v == cplx(0.0, 0.0));
    Field c0 = m0.coeff_c(1.0, g);
    for (const auto& v : c0.values) CHECK(v == cplx(0.0, 0.0));
}

TEST_CASE("coeff_b against an independent scalar quadrature oracle") {
    // single real gaussian-decay channel, frozen path; the oracle recomputes
    // b(t, x0) = 2 [ d_x phi(x0) I(t) - d_x rho(x0) J(t) ] with a central
    // finite difference for the profile derivatives and raw path sums.
    Grid g(1, 64, 16.0);
    double width = 1.3, amp = 0.7;
    auto sp = SpatialProfile::gaussian_decay(cplx(amp, 0.0), width);
    auto tp = TemporalProfile::exp_decay(0.9, 0.8);
    double horizon = 2.0;
    int cells = 32;
    NoiseModel m = one_channel(sp, tp, horizon, cells, 77);
    double t = 1.25;

    // raw sums from the path itself
    const BrownianPath& path = m.channel(0).path;
    double dtm = path.dt();
    double I = 0.0, J = 0.0;
    int full = static_cast<int>(t / dtm + 1e-9);
    for (int i = 0; i < full; ++i) {
        double tl = i * dtm;
        I += tp(tl) * path.increments()[static_cast<std::size_t>(i)];
        J += 0.5 * (tp(tl) * tp(tl) + tp(tl + dtm) * tp(tl + dtm)) * dtm;
    }

    auto b = m.coeff_b(t, g);
    auto phi_fn = [&](double x) { return amp * std::exp(-0.5 * x * x / (width * width)); };
    auto rho_fn = [&](double x) { double p = phi_fn(x); return p * p; }; // (Re phi) phi, real amp
    double h = 1e-6;
    for (int idx : {10, 32, 50}) {
        double x = g.position(idx);
        double dphi = (phi_fn(x + h) - phi_fn(x - h)) / (2.0 * h);
        double drho = (rho_fn(x + h) - rho_fn(x - h)) / (2.0 * h);
        double oracle = 2.0 * (dphi * I - drho * J);
        CHECK(b[0].values[static_cast<std::size_t>(idx)].real() ==
              doctest::Approx(oracle).epsilon(1e-6));
        CHECK(std::abs(b[0].values[static_cast<std::size_t>(idx)].imag()) < 1e-14);
    }
}

TEST_CASE("flatness report") {
    Grid g(1, 64, 20.0);
    // zero model and constant profiles give all-zero tables
    NoiseModel none({}, -1, 1.0, 8, 1);
    auto rep0 = none.flatness_report({0.0, 0.5}, g);
    for (const auto& row : rep0.rows) CHECK(row.sup == 0.0);

    auto spc = SpatialProfile::constant(cplx(1.0, 2.0));
    NoiseModel mc = one_channel(spc, TemporalProfile::constant(1.0), 1.0, 8, 2);
    for (const auto& row : mc.flatness_report({0.5}, g).rows) CHECK(row.sup == 0.0);

    // b_star tail statistic non-increasing in t for decaying g on a frozen path
    auto sp = SpatialProfile::gaussian_decay(cplx(0.5, 0.0), 1.5);
    auto tp = TemporalProfile::exp_decay(1.0, 2.0);
    NoiseModel m = one_channel(sp, tp, 8.0, 256, 4);
    auto rep = m.flatness_report({2.0, 4.0}, g, /*star=*/true);
    double sup_t = 0.0, sup_2t = 0.0;
    for (const auto& row : rep.rows) {
        if (row.coefficient == 'b' && row.order == 0) {
            if (row.t == 2.0) sup_t = row.sup;
            if (row.t == 4.0) sup_2t = row.sup;
        }
    }
    CHECK(sup_2t <= sup_t);
}

TEST_CASE("epsilon_theta") {
    Grid g(1, 32, 10.0);
    // no noise, alpha = 2, theta = 2, horizon 10: the integrand is 1
    NoiseModel none({}, 1, 10.0, 100, 1);
    CHECK(none.epsilon_theta(1.0, 2.0, 10.0, false, 1, 2.0) == doctest::Approx(10.0).epsilon(1e-12));

    // lensed with no noise: int (1+s)^(-(d(a-1)-4) theta/2 - 2) over [0,T],
    // d=3 alpha=3 theta=2 -> (1+s)^-4, closed form (1-(1+T)^-3)/3
    double T = 10.0;
    double closed = (1.0 - std::pow(1.0 + T, -3.0)) / 3.0;
    CHECK(none.epsilon_theta(1.0, 2.0, T, true, 3, 3.0) == doctest::Approx(closed).epsilon(1e-4));

    // doubling Re v1 on the same frozen path shrinks the damping integral
    auto sp = SpatialProfile::constant(cplx(2.0, 0.0));
    auto tp = TemporalProfile::constant(1.0);
    NoiseModel m = one_channel(sp, tp, 10.0, 1000, 123, 1);
    double e1 = m.epsilon_theta(1.0, 2.0, 10.0, false, 3, 1.5);
    double e2 = m.epsilon_theta(2.0, 2.0, 10.0, false, 3, 1.5);
    CHECK(e2 < e1);

    // non-constant profiles rejected
    NoiseModel bad = one_channel(SpatialProfile::gaussian_decay(cplx(1, 0), 1.0), tp, 1.0, 8, 5);
    CHECK_THROWS(bad.epsilon_theta(1.0, 2.0, 1.0, false, 3, 2.0));
}

TEST_CASE("tail bounds and ilog diagnostic") {
    auto sp = SpatialProfile::constant(cplx(0.0, 1.0));
    std::vector<std::pair<SpatialProfile, TemporalProfile>> chans{
        {sp, TemporalProfile::compact(1.0, 0.5)},
        {sp, TemporalProfile::exp_decay(1.0, 2.0)},
        {sp, TemporalProfile::poly_decay(1.0, 3.0)},
    };
    NoiseModel m(chans, -1, 4.0, 64, 9);
    auto tails = m.tail_bounds();
    CHECK(tails[0] == 0.0);
    CHECK(tails[1] == doctest::Approx(std::exp(-16.0) / 4.0));
    CHECK(tails[2] == doctest::Approx(std::pow(5.0, -5.0) / 5.0));

    auto diag = m.ilog_diagnostic({0.0, 0.5, 0.7});
    for (double v : diag) CHECK(std::isfinite(v));

    // constant g has an infinite tail
    NoiseModel mc({{sp, TemporalProfile::constant(1.0)}}, -1, 4.0, 64, 9);
    CHECK(std::isinf(mc.tail_bounds()[0]));
}
