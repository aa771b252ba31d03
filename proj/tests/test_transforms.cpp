#include <doctest.h>

#include <cmath>

#include "core/transforms.hpp"

using namespace sns;

TEST_CASE("gauge") {
    Grid g(1, 128, 20.0);
    Field f = gaussian_field(g, cplx(0.9, 0.3), 1.0);
    Field zero_psi(g);
    CHECK(rel_l2_distance(f, gauge(f, zero_psi, +1)) == 0.0);

    Field psi = gaussian_field(g, cplx(0.4, 1.1), 2.0);
    Field round = gauge(gauge(f, psi, +1), psi, -1);
    CHECK(rel_l2_distance(f, round) < 1e-14);

    // purely imaginary psi preserves the modulus pointwise
    Field ipsi(g);
    for (std::size_t i = 0; i < ipsi.size(); ++i)
        ipsi.values[i] = cplx(0.0, 0.5 * std::cos(0.3 * g.radius_sq(i)));
    Field gf = gauge(f, ipsi, +1);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        worst = std::max(worst, std::abs(std::abs(gf.values[i]) - std::abs(f.values[i])));
    CHECK(worst < 1e-15);
}

TEST_CASE("pct forward/inverse") {
    Grid g(1, 512, 40.0);
    Field v = gaussian_field(g, cplx(1.0, -0.2), 1.0);

    // t = 0: pure chirp
    Field w0 = pct_forward(v, 0.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        cplx expect = v.values[i] * std::polar(1.0, 0.25 * g.radius_sq(i));
        worst = std::max(worst, std::abs(w0.values[i] - expect));
    }
    CHECK(worst < 1e-14);

    // round trip at t = 0.5
    Field w = pct_forward(v, 0.5);
    Field back = pct_inverse(w, 0.5);
    CHECK(rel_l2_distance(v, back) <= 1e-8);

    // L2 isometry and the L^(alpha+1) scaling identity
    double alpha = 3.0, t = 0.4;
    Field wt = pct_forward(v, t);
    CHECK(std::abs(norm_lp(wt, 2.0) - norm_lp(v, 2.0)) / norm_lp(v, 2.0) <= 1e-8);
    double lhs = std::pow(norm_lp(wt, alpha + 1.0), alpha + 1.0);
    double rhs = std::pow(1.0 - t, -0.5 * g.d() * (alpha - 1.0)) *
                 std::pow(norm_lp(v, alpha + 1.0), alpha + 1.0);
    CHECK(std::abs(lhs - rhs) / rhs <= 1e-6);

    CHECK_THROWS(pct_forward(v, 0.95));
}

TEST_CASE("dilation and modulation") {
    Grid g(1, 512, 40.0);
    Field v = gaussian_field(g, cplx(0.8, 0.1), 1.0);

    CHECK(rel_l2_distance(v, dilation(v, 1.0)) < 1e-12);
    CHECK(rel_l2_distance(v, modulation(v, 0.0)) == 0.0);

    // isometry and the group laws
    CHECK(std::abs(norm_lp(dilation(v, 1.7), 2.0) - norm_lp(v, 2.0)) / norm_lp(v, 2.0) <= 1e-8);
    Field d2 = dilation(dilation(v, 1.2), 1.25);
    CHECK(rel_l2_distance(dilation(v, 1.5), d2) <= 1e-8);
    Field m2 = modulation(modulation(v, 0.9), -0.4);
    CHECK(rel_l2_distance(modulation(v, 0.5), m2) < 1e-14);

    // operator identities on a Gaussian
    double t = 0.1, beta = 2.0;
    Field lhs = free_propagate(dilation(v, beta), t);
    Field rhs = dilation(free_propagate(v, beta * beta * t), beta);
    CHECK(rel_l2_distance(rhs, lhs) <= 1e-8);

    double sigma = 1.0;
    double den = 1.0 + sigma * t;
    Field lhs2 = free_propagate(modulation(v, sigma), t);
    Field rhs2 = modulation(dilation(free_propagate(v, t / den), 1.0 / den), sigma / den);
    CHECK(rel_l2_distance(rhs2, lhs2) <= 1e-7);

    // spectral concentration guard fires on a high-frequency field
    Field spike(g);
    for (std::size_t i = 0; i < spike.size(); ++i)
        spike.values[i] = ((i % 2) == 0) ? cplx(1.0, 0.0) : cplx(-1.0, 0.0);
    CHECK_THROWS_AS(dilation(spike, 1.1), AliasingError);
}

TEST_CASE("scattering pullback") {
    Grid g(1, 256, 40.0);
    Field X0 = gaussian_field(g, 0.7, 1.0);

    // lambda = 0, N = 0: the pullback is constant in t
    StepPlan plan;
    plan.dt = 1e-3;
    plan.snapshot_stride = 100;
    Trajectory traj = evolve_deterministic(X0, plan, 0.0, 0.5, 2.0, 0.0);
    NoiseModel none(std::vector<std::pair<SpatialProfile, TemporalProfile>>{}, 0, 1.0, 10, 1);
    Field p0 = free_propagate(traj.series.fields.front(), traj.series.times.front());
    Field p1 = free_propagate(traj.final_field(), traj.final_time());
    CHECK(rel_l2_distance(p0, p1) <= 1e-12);

    // g = 0 noise: pullback reduces to e^{it Delta} X(t)
    std::vector<std::pair<SpatialProfile, TemporalProfile>> off{
        {SpatialProfile::gaussian_decay(cplx(0.3, 0.2), 2.0), TemporalProfile::compact(0.0, 1.0)}};
    NoiseModel moff(off, -1, 1.0, 100, 3);
    Field pb = scattering_pullback(X0, 0.5, moff, true);
    CHECK(rel_l2_distance(free_propagate(X0, 0.5), pb) < 1e-13);
}

TEST_CASE("asymptotic equivalence of the lens at the linear level") {
    Grid g(1, 512, 40.0);
    Field v = gaussian_field(g, 1.0, 1.0);
    SpaceTimeSeries zs, ws;
    for (double s : {0.0, 0.25, 0.5, 1.0}) {
        Field z = free_propagate(v, -s);
        double t = s / (1.0 + s);
        zs.push(s, z);
        ws.push(t, pct_forward(z, t));
    }
    double dev = asymptotic_equivalence_check(zs, ws);
    CHECK(dev <= 1e-8);

    // s = 0 sample alone is the chirp-cancellation identity
    SpaceTimeSeries z0, w0;
    z0.push(0.0, v);
    w0.push(0.0, pct_forward(v, 0.0));
    CHECK(asymptotic_equivalence_check(z0, w0) < 1e-14);

    // global phase invariance
    SpaceTimeSeries zp, wp;
    cplx phase = std::polar(1.0, 1.234);
    for (std::size_t j = 0; j < zs.times.size(); ++j) {
        Field z = zs.fields[j];
        Field w = ws.fields[j];
        for (auto& x : z.values) x *= phase;
        for (auto& x : w.values) x *= phase;
        zp.push(zs.times[j] , std::move(z));
        wp.push(ws.times[j], std::move(w));
    }
    CHECK(std::abs(asymptotic_equivalence_check(zp, wp) - dev) < 1e-12);

    // mismatched grids rejected
    SpaceTimeSeries bad;
    bad.push(0.0, v);
    bad.push(0.3, v);
    SpaceTimeSeries bad2;
    bad2.push(0.0, v);
    bad2.push(0.5, v);
    CHECK_THROWS(asymptotic_equivalence_check(bad, bad2));
}

TEST_CASE("pullback via the homogeneous flow agrees with the gauge route") {
    // with compact noise switched off beyond T0, V(0,t) z*(t) freezes as well
    Grid g(1, 128, 30.0);
    Field X0 = gaussian_field(g, 0.6, 1.2);
    std::vector<std::pair<SpatialProfile, TemporalProfile>> ch{
        {SpatialProfile::gaussian_decay(cplx(0.0, 0.8), 2.0), TemporalProfile::compact(0.9, 0.25)}};
    NoiseModel model(ch, 0, 1.0, 100, 17);
    StepPlan plan;
    plan.dt = 1e-2;
    plan.snapshot_stride = 25;
    Trajectory traj = evolve_X(X0, model, plan, 1.0, 2.0);
    const NoiseModel& m = *traj.model_used;
    Field a = scattering_pullback_V(traj.series.fields[2], traj.series.times[2], m, plan, true);
    Field b = scattering_pullback_V(traj.final_field(), traj.final_time(), m, plan, true);
    // lambda = 0 run: V(0,t) e^{-phi*} X(t) = z*(0) exactly for every t
    CHECK(rel_l2_distance(a, b) < 1e-10);
}
