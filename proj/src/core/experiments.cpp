#include "experiments.hpp"

#include <algorithm>
#include <cmath>

#include "exponents.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace sns {

namespace {

std::size_t nearest_snapshot(const std::vector<double>& times, double t) {
    std::size_t best = 0;
    double err = std::abs(times[0] - t);
    for (std::size_t i = 1; i < times.size(); ++i) {
        double e = std::abs(times[i] - t);
        if (e < err) { err = e; best = i; }
    }
    return best;
}

double verdict_norm(const Field& f, ScatterNorm n) {
    return n == ScatterNorm::H1 ? norm_h1(f) : norm_sigma(f);
}

} // namespace

ScatterVerdict detect_scattering(const Trajectory& traj, const NoiseModel& model,
                                 ScatterNorm norm, int windows, double ratio, bool star) {
    if (windows < 1) throw Error("detect_scattering: need at least one window");
    ScatterVerdict v;
    v.windows = windows;
    if (traj.blew_up) {
        v.blow_up = true;
        v.flag = false;
        return v;
    }
    const NoiseModel& m = traj.model_used ? *traj.model_used : model;
    double T = traj.final_time();
    if (!(T > 0.0)) throw Error("detect_scattering: trajectory horizon too short");

    std::vector<Field> pullbacks;
    std::vector<std::size_t> used;
    for (int w = 0; w <= windows; ++w) {
        double t_target = T * std::exp2(0.5 * (w - windows));
        std::size_t j = nearest_snapshot(traj.series.times, t_target);
        if (!used.empty() && j == used.back())
            throw Error("detect_scattering: snapshot stride too coarse for the dyadic windows");
        used.push_back(j);
        double t = traj.series.times[j];
        v.window_times.push_back(t);
        if (m.N() > 0) {
            pullbacks.push_back(scattering_pullback(traj.series.fields[j], t, m, star));
        } else {
            pullbacks.push_back(free_propagate(traj.series.fields[j], t));
        }
    }
    for (int w = 0; w < windows; ++w) {
        Field diff(pullbacks[0].grid);
        for (std::size_t i = 0; i < diff.size(); ++i)
            diff.values[i] = pullbacks[static_cast<std::size_t>(w) + 1].values[i] -
                             pullbacks[static_cast<std::size_t>(w)].values[i];
        v.deltas.push_back(verdict_norm(diff, norm));
    }
    double dmax = *std::max_element(v.deltas.begin(), v.deltas.end());
    if (dmax <= 1e-12) {
        v.flag = true;
    } else {
        v.flag = v.deltas.back() < ratio * v.deltas.front();
    }
    return v;
}

SweepResult regularization_sweep(const SweepOptions& opt) {
    if (opt.v1_values.empty()) throw ConfigError("sweep: empty v1 grid");
    if (opt.channels.empty()) throw ConfigError("sweep: need at least one channel");
    for (const auto& ch : opt.channels) {
        if (!ch.first.is_constant())
            throw ConfigError("sweep: (H2) requires constant spatial profiles");
        if (!ch.second.h2_lower_bounded())
            throw ConfigError("sweep: (H2) requires inf_t g >= c0 > 0 (constant temporal profile)");
    }
    int cells = static_cast<int>(std::llround(opt.horizon / opt.plan.dt));
    if (std::abs(cells * opt.plan.dt - opt.horizon) > 1e-9 * opt.horizon)
        throw ConfigError("sweep: horizon must be a whole number of mesh cells");

    const int d = opt.X0.grid.d();
    auto table = exponents(d, opt.alpha, opt.lambda);
    double theta = opt.theta > 1.0 ? opt.theta : table.theta;
    if (!(theta > 1.0) || std::isinf(theta))
        throw ConfigError("sweep: no finite theta available for these exponents");

    const int P = opt.paths;
    const int V = static_cast<int>(opt.v1_values.size());
    SweepResult res;
    res.master_seed = opt.master_seed;
    res.points.assign(static_cast<std::size_t>(V), SweepPoint{});
    res.flags.assign(static_cast<std::size_t>(V), std::vector<int>(static_cast<std::size_t>(P), 0));

    std::vector<std::vector<double>> eps(static_cast<std::size_t>(V),
                                         std::vector<double>(static_cast<std::size_t>(P), 0.0));
    std::vector<std::vector<double>> eps_lensed = eps;
    std::vector<std::vector<int>> blew(static_cast<std::size_t>(V),
                                       std::vector<int>(static_cast<std::size_t>(P), 0));

    int threads = resolve_threads(opt.threads);
    parallel_for(V * P, threads, [&](int idx) {
        int vi = idx / P;
        int p = idx % P;
        double re_v1 = opt.v1_values[static_cast<std::size_t>(vi)];
        auto channels = opt.channels;
        cplx base = channels[0].first.amplitude();
        channels[0].first = SpatialProfile::constant(cplx(re_v1, base.imag()));
        uint64_t seed = derive_seed(opt.master_seed, static_cast<uint64_t>(p));
        NoiseModel model(channels, opt.lambda, opt.horizon, cells, seed);
        Trajectory traj = evolve_X(opt.X0, model, opt.plan, opt.T, opt.alpha);
        ScatterVerdict verdict = detect_scattering(traj, model, opt.norm, opt.windows,
                                                   opt.ratio, /*star=*/false);
        res.flags[static_cast<std::size_t>(vi)][static_cast<std::size_t>(p)] = verdict.flag ? 1 : 0;
        blew[static_cast<std::size_t>(vi)][static_cast<std::size_t>(p)] = traj.blew_up ? 1 : 0;
        eps[static_cast<std::size_t>(vi)][static_cast<std::size_t>(p)] =
            model.epsilon_theta(1.0, theta, opt.T, false, d, opt.alpha);
        eps_lensed[static_cast<std::size_t>(vi)][static_cast<std::size_t>(p)] =
            model.epsilon_theta(1.0, theta, opt.T, true, d, opt.alpha);
    });

    // Proxy criterion 2^alpha C^alpha |X0|^(alpha-1) eps^(1/theta) <= 1 with C
    // calibrated once so the baseline proxy count matches the detector count.
    double x0n = (opt.norm == ScatterNorm::Sigma) ? norm_sigma(opt.X0) : norm_h1(opt.X0);
    std::vector<double> q0(static_cast<std::size_t>(P));
    for (int p = 0; p < P; ++p)
        q0[static_cast<std::size_t>(p)] = std::pow(eps[0][static_cast<std::size_t>(p)], 1.0 / theta);
    int k = 0;
    for (int p = 0; p < P; ++p) k += res.flags[0][static_cast<std::size_t>(p)];
    std::vector<double> sorted = q0;
    std::sort(sorted.begin(), sorted.end());
    double tau;
    if (k <= 0) tau = 0.5 * sorted.front();
    else if (k >= P) tau = 2.0 * sorted.back();
    else tau = 0.5 * (sorted[static_cast<std::size_t>(k - 1)] + sorted[static_cast<std::size_t>(k)]);
    // 2^alpha C^alpha x0^(alpha-1) tau = 1
    res.calibrated_C = 0.5 * std::pow(tau * std::pow(x0n, opt.alpha - 1.0), -1.0 / opt.alpha);

    for (int vi = 0; vi < V; ++vi) {
        SweepPoint pt;
        pt.re_v1 = opt.v1_values[static_cast<std::size_t>(vi)];
        pt.paths = P;
        double fsum = 0.0, esum = 0.0, elsum = 0.0;
        int proxy = 0, bl = 0;
        for (int p = 0; p < P; ++p) {
            fsum += res.flags[static_cast<std::size_t>(vi)][static_cast<std::size_t>(p)];
            double e = eps[static_cast<std::size_t>(vi)][static_cast<std::size_t>(p)];
            esum += e;
            elsum += eps_lensed[static_cast<std::size_t>(vi)][static_cast<std::size_t>(p)];
            if (std::pow(e, 1.0 / theta) <= tau) ++proxy;
            bl += blew[static_cast<std::size_t>(vi)][static_cast<std::size_t>(p)];
        }
        pt.fraction_detector = fsum / P;
        pt.fraction_proxy = static_cast<double>(proxy) / P;
        pt.mean_eps = esum / P;
        pt.mean_eps_lensed = elsum / P;
        pt.blowups = bl;
        res.points[static_cast<std::size_t>(vi)] = pt;
    }
    return res;
}

namespace {

double fit_log2_slope(const std::vector<double>& dts, const std::vector<double>& residuals) {
    // least squares of log2(residual) against log2(dt)
    std::size_t n = dts.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = std::log2(dts[i]);
        double y = std::log2(std::max(residuals[i], 1e-300));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    double den = n * sxx - sx * sx;
    return den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
}

} // namespace

ItoSuiteReport ito_suite(const ItoSuiteOptions& opt) {
    ItoSuiteReport rep;
    int cells = static_cast<int>(std::llround(opt.horizon / opt.base_dt));
    if (std::abs(cells * opt.base_dt - opt.horizon) > 1e-9 * opt.horizon)
        throw ConfigError("ito_suite: horizon must be a whole number of base cells");

    NoiseModel model(opt.channels, opt.lambda, opt.horizon, cells,
                     derive_seed(opt.master_seed, 0));

    for (Functional which : opt.functionals) {
        ItoSuiteRow row;
        row.functional = functional_name(which);
        double floor_scale = 0.0;
        for (int lev = 0; lev < opt.levels; ++lev) {
            StepPlan plan;
            plan.dt = opt.base_dt / std::exp2(lev);
            plan.snapshot_stride = 1;
            Trajectory traj = evolve_X(opt.X0, model, plan, opt.T, opt.alpha);
            if (traj.blew_up) throw Error("ito_suite: trajectory blew up");
            ItoLedger led = ito_replay(traj, model, which);
            row.dts.push_back(plan.dt);
            row.residuals.push_back(led.final_abs_residual());
            double scale = 0.0;
            for (double vv : led.value) scale = std::max(scale, std::abs(vv));
            floor_scale = std::max(floor_scale, scale);
        }
        row.saturated = row.residuals.front() <= 1e-12 * std::max(1.0, floor_scale);
        row.slope = row.saturated ? 0.0 : fit_log2_slope(row.dts, row.residuals);
        rep.rows.push_back(std::move(row));
    }

    if (opt.martingale_paths > 1) {
        int M = opt.martingale_paths;
        std::vector<double> dev(static_cast<std::size_t>(M), 0.0);
        StepPlan plan;
        plan.dt = opt.base_dt;
        plan.snapshot_stride = 1 << 20; // endpoints only
        int threads = resolve_threads(opt.threads);
        parallel_for(M, threads, [&](int p) {
            NoiseModel m(opt.channels, opt.lambda, opt.horizon, cells,
                         derive_seed(opt.master_seed, 1000 + static_cast<uint64_t>(p)));
            Trajectory traj = evolve_X(opt.X0, m, plan, opt.T, opt.alpha);
            dev[static_cast<std::size_t>(p)] = mass(traj.final_field()) - mass(opt.X0);
        });
        double mean = 0.0;
        for (double x : dev) mean += x;
        mean /= M;
        double var = 0.0;
        for (double x : dev) var += (x - mean) * (x - mean);
        var /= (M - 1);
        rep.martingale.paths = M;
        rep.martingale.mean_deviation = mean;
        rep.martingale.standard_error = std::sqrt(var / M);
        rep.martingale.within_3se = std::abs(mean) <= 3.0 * rep.martingale.standard_error;
    }
    return rep;
}

ConvergenceReport convergence_study(const ConvergenceOptions& opt) {
    ConvergenceReport rep;
    int cells = static_cast<int>(std::llround(opt.horizon / opt.base_dt));
    if (std::abs(cells * opt.base_dt - opt.horizon) > 1e-9 * opt.horizon)
        throw ConfigError("convergence: horizon must be a whole number of base cells");

    // pathwise strong differences under bridge refinement
    if (!opt.channels.empty()) {
        NoiseModel model(opt.channels, opt.lambda, opt.horizon, cells,
                         derive_seed(opt.master_seed, 0));
        std::vector<Field> finals;
        std::vector<double> dts;
        for (int lev = 0; lev <= opt.levels; ++lev) {
            StepPlan plan;
            plan.dt = opt.base_dt / std::exp2(lev);
            plan.snapshot_stride = 1 << 20;
            Trajectory t = evolve_X(opt.X0, model, plan, opt.T, opt.alpha);
            if (t.blew_up) throw Error("convergence: trajectory blew up");
            finals.push_back(t.final_field());
            dts.push_back(plan.dt);
        }
        ConvergenceRow row;
        row.label = "pathwise_strong";
        for (std::size_t i = 0; i + 1 < finals.size(); ++i) {
            double e = 0.0;
            for (std::size_t j = 0; j < finals[i].size(); ++j)
                e += std::norm(finals[i].values[j] - finals[i + 1].values[j]);
            row.errors.push_back(std::sqrt(e * opt.X0.grid.cell_volume()));
            row.dts.push_back(dts[i]);
        }
        row.order = fit_log2_slope(row.dts, row.errors);
        rep.rows.push_back(std::move(row));
    }

    if (opt.soliton_reference) {
        // relative L2 error at T against sqrt(2) sech(x) e^{-iT}
        ConvergenceRow row;
        row.label = "soliton_strang";
        const Grid& g = opt.X0.grid;
        Field exact(g);
        for (std::size_t i = 0; i < exact.size(); ++i) {
            double x = std::sqrt(g.radius_sq(i));
            exact.values[i] = std::sqrt(2.0) / std::cosh(x) * std::polar(1.0, -opt.T);
        }
        for (int lev = 0; lev < opt.levels; ++lev) {
            StepPlan plan;
            plan.dt = opt.base_dt / std::exp2(lev);
            plan.snapshot_stride = 1 << 20;
            Trajectory t = evolve_deterministic(opt.X0, plan, 0.0, opt.T, opt.alpha, opt.lambda);
            row.dts.push_back(plan.dt);
            row.errors.push_back(rel_l2_distance(exact, t.final_field()));
        }
        row.order = fit_log2_slope(row.dts, row.errors);
        rep.rows.push_back(std::move(row));
    }

    if (opt.clt_paths > 1 && !opt.channels.empty()) {
        auto ci_width = [&](int M, uint64_t salt) {
            std::vector<double> vals(static_cast<std::size_t>(M), 0.0);
            StepPlan plan;
            plan.dt = opt.base_dt;
            plan.snapshot_stride = 1 << 20;
            int threads = resolve_threads(opt.threads);
            parallel_for(M, threads, [&](int p) {
                NoiseModel m(opt.channels, opt.lambda, opt.horizon, cells,
                             derive_seed(opt.master_seed, salt + static_cast<uint64_t>(p)));
                Trajectory t = evolve_X(opt.X0, m, plan, opt.T, opt.alpha);
                vals[static_cast<std::size_t>(p)] = mass(t.final_field());
            });
            double mean = 0.0;
            for (double x : vals) mean += x;
            mean /= M;
            double var = 0.0;
            for (double x : vals) var += (x - mean) * (x - mean);
            var /= (M - 1);
            return 2.0 * 1.96 * std::sqrt(var / M);
        };
        double w1 = ci_width(opt.clt_paths, 5000);
        double w2 = ci_width(2 * opt.clt_paths, 5000); // first M paths shared
        rep.ci_ratio = w2 / w1;
        double expected = 1.0 / std::sqrt(2.0);
        rep.ci_ok = std::abs(rep.ci_ratio - expected) <= 0.3 * expected;
    }
    return rep;
}

} // namespace sns
