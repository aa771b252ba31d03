#include "runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "exponents.hpp"
#include "experiments.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "transforms.hpp"

namespace sns {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

std::string stamp(const RunConfig& cfg) {
    std::ostringstream os;
    os << "config_hash=" << cfg.config_hash() << " master_seed=" << cfg.master_seed
       << " version=" << version_string();
    return os.str();
}

void write_text_file(const fs::path& p, const std::string& content) {
    std::ofstream os(p);
    if (!os) throw Error("cannot open output file " + p.string());
    os << content;
}

json summary_base(const RunConfig& cfg, const std::string& sub) {
    json j;
    j["subcommand"] = sub;
    j["config_hash"] = cfg.config_hash();
    j["master_seed"] = cfg.master_seed;
    j["version"] = version_string();
    return j;
}

NoiseModel build_model(const RunConfig& cfg, uint64_t seed) {
    double horizon = cfg.horizon > 0.0 ? cfg.horizon : cfg.T;
    return NoiseModel(cfg.make_channels(), cfg.lambda, horizon, cfg.mesh_cells(), seed);
}

int run_simulate(const RunConfig& cfg, const fs::path& out, json& summary) {
    Grid grid = cfg.make_grid();
    Field X0 = cfg.make_initial(grid);
    NoiseModel model = build_model(cfg, derive_seed(cfg.master_seed, 0));
    StepPlan plan = cfg.make_plan();
    Trajectory traj = evolve_X(X0, model, plan, cfg.T, cfg.alpha);

    // snapshots + manifest
    json manifest;
    manifest["config_hash"] = cfg.config_hash();
    manifest["master_seed"] = cfg.master_seed;
    manifest["version"] = version_string();
    manifest["dt"] = traj.dt;
    manifest["times"] = traj.series.times;
    json files = json::array();
    for (std::size_t j = 0; j < traj.series.fields.size(); ++j) {
        char name[48];
        std::snprintf(name, sizeof(name), "snapshot_%04zu.field", j);
        write_field(traj.series.fields[j], (out / name).string());
        files.push_back(name);
    }
    manifest["snapshots"] = files;
    json seeds = json::array();
    for (int k = 0; k < model.N(); ++k) seeds.push_back(model.channel(k).path.seed());
    manifest["path_seeds"] = seeds;
    write_text_file(out / "manifest.json", manifest.dump(2) + "\n");

    // noise paths for external audit
    {
        std::ostringstream os;
        os << "# " << stamp(cfg) << "\n";
        os << "t";
        for (int k = 0; k < model.N(); ++k) os << ",dbeta_" << k + 1;
        os << "\n";
        for (int i = 0; i < traj.steps; ++i) {
            if (!traj.increments.empty() &&
                static_cast<std::size_t>(i) >= traj.increments[0].size())
                break;
            os << fmt17(traj.t0 + i * traj.dt);
            for (int k = 0; k < model.N(); ++k)
                os << "," << fmt17(traj.increments[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]);
            os << "\n";
        }
        write_text_file(out / "paths.csv", os.str());
    }

    // Ito ledgers along the run
    std::vector<Functional> which = {Functional::Mass, Functional::Hamiltonian,
                                     Functional::Virial, Functional::Momentum};
    if (cfg.lambda == -1) which.push_back(Functional::PcEnergy);
    for (Functional w : which) {
        if (traj.series.times.size() < 2) break;
        ItoLedger led = ito_replay(traj, model, w);
        write_ledger_csv(led, (out / (std::string("ledger_") + functional_name(w) + ".csv")).string(),
                         stamp(cfg));
        summary["ledger_final_residual"][functional_name(w)] = led.final_abs_residual();
    }
    write_field_slice_csv(traj.final_field(), (out / "final_slice.csv").string(), stamp(cfg));

    summary["blow_up"] = traj.blew_up;
    if (traj.blew_up) summary["blowup_time"] = traj.blowup_time;
    summary["final_time"] = traj.final_time();
    summary["final_mass"] = mass(traj.final_field());
    return traj.blew_up ? 3 : 0;
}

int run_scatter(const RunConfig& cfg, const fs::path& out, json& summary) {
    Grid grid = cfg.make_grid();
    Field X0 = cfg.make_initial(grid);
    StepPlan plan = cfg.make_plan();
    const int M = cfg.experiment.paths;
    bool star = cfg.experiment.pullback == "phi_star";
    ScatterNorm norm = cfg.experiment.norm == "Sigma" ? ScatterNorm::Sigma : ScatterNorm::H1;

    std::vector<ScatterVerdict> verdicts(static_cast<std::size_t>(M));
    int threads = resolve_threads(cfg.threads);
    parallel_for(M, threads, [&](int p) {
        NoiseModel model = build_model(cfg, derive_seed(cfg.master_seed, static_cast<uint64_t>(p)));
        Trajectory traj = evolve_X(X0, model, plan, cfg.T, cfg.alpha);
        verdicts[static_cast<std::size_t>(p)] =
            detect_scattering(traj, model, norm, cfg.experiment.windows, cfg.experiment.ratio, star);
    });

    std::ostringstream os;
    os << "# " << stamp(cfg) << "\n";
    os << "path,flag,blow_up";
    for (int w = 0; w < cfg.experiment.windows; ++w) os << ",delta_" << w;
    os << "\n";
    int flagged = 0, blown = 0;
    for (int p = 0; p < M; ++p) {
        const auto& v = verdicts[static_cast<std::size_t>(p)];
        flagged += v.flag ? 1 : 0;
        blown += v.blow_up ? 1 : 0;
        os << p << "," << (v.flag ? 1 : 0) << "," << (v.blow_up ? 1 : 0);
        for (int w = 0; w < cfg.experiment.windows; ++w)
            os << "," << (static_cast<std::size_t>(w) < v.deltas.size() ? fmt17(v.deltas[static_cast<std::size_t>(w)]) : "nan");
        os << "\n";
    }
    write_text_file(out / "verdicts.csv", os.str());
    summary["paths"] = M;
    summary["flagged"] = flagged;
    summary["blowups"] = blown;
    summary["fraction"] = static_cast<double>(flagged) / M;
    return 0;
}

int run_sweep(const RunConfig& cfg, const fs::path& out, json& summary) {
    Grid grid = cfg.make_grid();
    SweepOptions opt;
    opt.X0 = cfg.make_initial(grid);
    opt.alpha = cfg.alpha;
    opt.lambda = cfg.lambda;
    opt.channels = cfg.make_channels();
    opt.horizon = cfg.horizon > 0.0 ? cfg.horizon : cfg.T;
    opt.T = cfg.T;
    opt.plan = cfg.make_plan();
    opt.v1_values = cfg.experiment.v1_grid;
    opt.paths = cfg.experiment.paths;
    opt.windows = cfg.experiment.windows;
    opt.ratio = cfg.experiment.ratio;
    opt.theta = cfg.experiment.theta;
    opt.master_seed = cfg.master_seed;
    opt.threads = cfg.threads;
    opt.norm = cfg.experiment.norm == "Sigma" ? ScatterNorm::Sigma : ScatterNorm::H1;
    SweepResult res = regularization_sweep(opt);

    std::ostringstream os;
    os << "# " << stamp(cfg) << "\n";
    os << "re_v1,paths,fraction_detector,fraction_proxy,mean_eps,mean_eps_lensed,blowups\n";
    for (const auto& pt : res.points) {
        os << fmt17(pt.re_v1) << "," << pt.paths << "," << fmt17(pt.fraction_detector) << ","
           << fmt17(pt.fraction_proxy) << "," << fmt17(pt.mean_eps) << ","
           << fmt17(pt.mean_eps_lensed) << "," << pt.blowups << "\n";
    }
    write_text_file(out / "sweep.csv", os.str());

    json pts = json::array();
    for (const auto& pt : res.points)
        pts.push_back({{"re_v1", pt.re_v1},
                       {"fraction_detector", pt.fraction_detector},
                       {"fraction_proxy", pt.fraction_proxy},
                       {"mean_eps", pt.mean_eps},
                       {"mean_eps_lensed", pt.mean_eps_lensed},
                       {"blowups", pt.blowups}});
    summary["points"] = pts;
    summary["calibrated_C"] = res.calibrated_C;
    return 0;
}

int run_ito_check(const RunConfig& cfg, const fs::path& out, json& summary) {
    Grid grid = cfg.make_grid();
    ItoSuiteOptions opt;
    opt.X0 = cfg.make_initial(grid);
    opt.alpha = cfg.alpha;
    opt.lambda = cfg.lambda;
    opt.channels = cfg.make_channels();
    opt.horizon = cfg.horizon > 0.0 ? cfg.horizon : cfg.T;
    opt.T = cfg.T;
    opt.base_dt = cfg.dt;
    opt.levels = cfg.experiment.levels;
    opt.master_seed = cfg.master_seed;
    opt.martingale_paths = cfg.experiment.martingale_paths;
    opt.threads = cfg.threads;
    opt.functionals = {Functional::Mass, Functional::Hamiltonian, Functional::Virial,
                       Functional::Momentum};
    if (cfg.lambda == -1) opt.functionals.push_back(Functional::PcEnergy);
    ItoSuiteReport rep = ito_suite(opt);

    std::ostringstream os;
    os << "# " << stamp(cfg) << "\n";
    os << "functional,dt,residual,slope,saturated\n";
    for (const auto& row : rep.rows)
        for (std::size_t l = 0; l < row.dts.size(); ++l)
            os << row.functional << "," << fmt17(row.dts[l]) << "," << fmt17(row.residuals[l])
               << "," << fmt17(row.slope) << "," << (row.saturated ? 1 : 0) << "\n";
    write_text_file(out / "ito_report.csv", os.str());

    for (const auto& row : rep.rows) {
        summary["slopes"][row.functional] = row.slope;
        summary["saturated"][row.functional] = row.saturated;
    }
    if (rep.martingale.paths > 0) {
        summary["martingale"] = {{"paths", rep.martingale.paths},
                                 {"mean_deviation", rep.martingale.mean_deviation},
                                 {"standard_error", rep.martingale.standard_error},
                                 {"within_3se", rep.martingale.within_3se}};
    }
    return 0;
}

int run_converge(const RunConfig& cfg, const fs::path& out, json& summary) {
    Grid grid = cfg.make_grid();
    ConvergenceOptions opt;
    opt.X0 = cfg.make_initial(grid);
    opt.alpha = cfg.alpha;
    opt.lambda = cfg.lambda;
    opt.channels = cfg.make_channels();
    opt.horizon = cfg.horizon > 0.0 ? cfg.horizon : cfg.T;
    opt.T = cfg.T;
    opt.base_dt = cfg.dt;
    opt.levels = cfg.experiment.levels;
    opt.master_seed = cfg.master_seed;
    opt.clt_paths = cfg.experiment.clt_paths;
    opt.threads = cfg.threads;
    opt.soliton_reference = (cfg.initial.kind == "sech" && cfg.d == 1 && cfg.alpha == 3.0 &&
                             cfg.lambda == 1 && cfg.channels.empty());
    ConvergenceReport rep = convergence_study(opt);

    std::ostringstream os;
    os << "# " << stamp(cfg) << "\n";
    os << "label,dt,error,order\n";
    for (const auto& row : rep.rows)
        for (std::size_t l = 0; l < row.dts.size(); ++l)
            os << row.label << "," << fmt17(row.dts[l]) << "," << fmt17(row.errors[l]) << ","
               << fmt17(row.order) << "\n";
    write_text_file(out / "convergence.csv", os.str());

    for (const auto& row : rep.rows) summary["orders"][row.label] = row.order;
    if (rep.ci_ratio > 0.0) {
        summary["clt"] = {{"ci_ratio", rep.ci_ratio}, {"ok", rep.ci_ok}};
    }
    return 0;
}

struct BatteryRow {
    std::string name;
    double residual;
    double tolerance;
    bool pass;
};

std::vector<BatteryRow> transform_battery(const RunConfig& cfg) {
    Grid grid = cfg.make_grid();
    Field v = cfg.make_initial(grid);
    std::vector<BatteryRow> rows;
    auto add = [&](const std::string& name, double res, double tol) {
        rows.push_back({name, res, tol, res <= tol});
    };

    // gauge round trip with a complex gaussian phase field
    {
        Field psi = gaussian_field(grid, cplx(0.3, 0.7), 2.0);
        Field back = gauge(gauge(v, psi, +1), psi, -1);
        add("gauge_roundtrip", rel_l2_distance(v, back), 1e-14);
    }
    // lens round trip and isometry at t = 0.4
    {
        double t = 0.4;
        Field w = pct_forward(v, t);
        Field back = pct_inverse(w, t);
        add("pct_roundtrip", rel_l2_distance(v, back), 1e-8);
        double l2v = norm_lp(v, 2.0), l2w = norm_lp(w, 2.0);
        add("pct_l2_isometry", std::abs(l2w - l2v) / l2v, 1e-8);
        double a1 = cfg.alpha + 1.0;
        double lhs = std::pow(norm_lp(w, a1), a1);
        double rhs = std::pow(1.0 - t, -0.5 * grid.d() * (cfg.alpha - 1.0)) *
                     std::pow(norm_lp(v, a1), a1);
        add("pct_lp_scaling", std::abs(lhs - rhs) / std::abs(rhs), 1e-6);
    }
    // dilation group law and modulation additivity
    {
        Field lhs = dilation(dilation(v, 1.2), 1.25);
        Field rhs = dilation(v, 1.5);
        add("dilation_group", rel_l2_distance(rhs, lhs), 1e-8);
        Field m = modulation(modulation(v, 0.7), -0.2);
        Field m2 = modulation(v, 0.5);
        add("modulation_additivity", rel_l2_distance(m2, m), 1e-14);
        add("dilation_isometry", std::abs(norm_lp(dilation(v, 1.3), 2.0) - norm_lp(v, 2.0)) /
                                     norm_lp(v, 2.0),
            1e-8);
    }
    // T(t) D_beta = D_beta T(beta^2 t)
    {
        double t = 0.1, beta = 1.5;
        Field lhs = free_propagate(dilation(v, beta), t);
        Field rhs = dilation(free_propagate(v, beta * beta * t), beta);
        add("op_identity_dilation", rel_l2_distance(rhs, lhs), 1e-8);
    }
    // T(t) M_sigma = M_{sigma/(1+sigma t)} D_{1/(1+sigma t)} T(t/(1+sigma t))
    {
        double t = 0.1, sigma = 1.0;
        double den = 1.0 + sigma * t;
        Field lhs = free_propagate(modulation(v, sigma), t);
        Field rhs = modulation(dilation(free_propagate(v, t / den), 1.0 / den), sigma / den);
        add("op_identity_modulation", rel_l2_distance(rhs, lhs), 1e-7);
    }
    // linear asymptotic equivalence through the lens
    {
        SpaceTimeSeries zs, ws;
        for (double s : {0.0, 0.25, 0.5, 1.0}) {
            Field z = free_propagate(v, -s);
            double t = s / (1.0 + s);
            zs.push(s, z);
            ws.push(t, pct_forward(z, t));
        }
        add("asymptotic_equivalence_linear", asymptotic_equivalence_check(zs, ws), 1e-8);
    }
    // free pullback is constant in t
    {
        Field z1 = free_propagate(free_propagate(v, -0.5), 0.5);
        add("linear_pullback_constancy", rel_l2_distance(v, z1), 1e-12);
    }
    return rows;
}

int run_transforms(const RunConfig& cfg, const fs::path& out, json& summary) {
    auto rows = transform_battery(cfg);
    std::ostringstream os;
    os << "# " << stamp(cfg) << "\n";
    os << "identity,residual,tolerance,pass\n";
    bool all = true;
    for (const auto& r : rows) {
        os << r.name << "," << fmt17(r.residual) << "," << fmt17(r.tolerance) << ","
           << (r.pass ? 1 : 0) << "\n";
        summary["identities"][r.name] = {{"residual", r.residual}, {"pass", r.pass}};
        all = all && r.pass;
    }
    write_text_file(out / "transforms.csv", os.str());
    summary["all_pass"] = all;
    return all ? 0 : 4;
}

} // namespace

std::string format_exponent_table(int d, double alpha, int lambda) {
    ExponentTable t = exponents(d, alpha, lambda);
    std::ostringstream os;
    os << "d=" << t.d << " alpha=" << t.alpha << " lambda=" << t.lambda << "\n";
    os << "strauss=" << t.strauss << "\n";
    os << "q_tilde=" << (t.q_tilde_finite ? fmt17(t.q_tilde) : std::string("inf")) << "\n";
    os << "h_power=" << t.h_power << "\n";
    os << "theta=" << (std::isinf(t.theta) ? std::string("inf") : fmt17(t.theta)) << "\n";
    os << "p1=" << t.p1 << " p2=" << t.p2 << " q2="
       << (std::isinf(t.q2) ? std::string("inf") : fmt17(t.q2)) << "\n";
    os << "class=" << criticality_name(t.cls) << "\n";
    os << "admissible_p1_pair=" << (strichartz_admissible(t.p1, t.p1, d) ? "yes" : "no") << "\n";
    return os.str();
}

int run_subcommand(const std::string& sub, RunConfig cfg, const RunOverrides& ov,
                   std::string& message) {
    try {
        if (ov.seed) cfg.master_seed = *ov.seed;
        if (ov.output_dir) cfg.output_dir = *ov.output_dir;
        if (ov.threads > 0) cfg.threads = ov.threads;
        validate_for_study(cfg, sub);

        fs::path out(cfg.output_dir);
        fs::create_directories(out);
        json summary = summary_base(cfg, sub);

        int code = 0;
        if (sub == "simulate") code = run_simulate(cfg, out, summary);
        else if (sub == "scatter") code = run_scatter(cfg, out, summary);
        else if (sub == "sweep") code = run_sweep(cfg, out, summary);
        else if (sub == "ito-check") code = run_ito_check(cfg, out, summary);
        else if (sub == "converge") code = run_converge(cfg, out, summary);
        else if (sub == "transforms") code = run_transforms(cfg, out, summary);
        else if (sub == "exponents") {
            message = format_exponent_table(cfg.d, cfg.alpha, cfg.lambda);
            ExponentTable t = exponents(cfg.d, cfg.alpha, cfg.lambda);
            summary["exponents"] = {{"strauss", t.strauss},
                                    {"q_tilde", t.q_tilde_finite ? json(t.q_tilde) : json("inf")},
                                    {"h_power", t.h_power},
                                    {"theta", std::isinf(t.theta) ? json("inf") : json(t.theta)},
                                    {"p1", t.p1},
                                    {"p2", t.p2},
                                    {"q2", std::isinf(t.q2) ? json("inf") : json(t.q2)},
                                    {"class", criticality_name(t.cls)}};
        } else {
            message = "unknown subcommand '" + sub + "'";
            return 2;
        }
        write_text_file(out / "summary.json", summary.dump(2) + "\n");
        return code;
    } catch (const ConfigError& e) {
        message = e.what();
        return 2;
    } catch (const BlowUpError& e) {
        message = e.what();
        return 3;
    } catch (const ConsistencyError& e) {
        message = e.what();
        return 4;
    } catch (const std::exception& e) {
        message = e.what();
        return 1;
    }
}

int run_subcommand_file(const std::string& subcommand, const std::string& config_path,
                        const RunOverrides& ov, std::string& message) {
    try {
        RunConfig cfg = load_config_file(config_path);
        return run_subcommand(subcommand, std::move(cfg), ov, message);
    } catch (const ConfigError& e) {
        message = e.what();
        return 2;
    } catch (const std::exception& e) {
        message = e.what();
        return 1;
    }
}

} // namespace sns
