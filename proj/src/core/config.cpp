#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sns {

using json = nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& why) {
    throw ConfigError(path + ": " + why);
}

void expect_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) bad(path, "must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) bad(path + "." + it.key(), "unknown key");
}

double num(const json& obj, const std::string& path, const std::string& key, double dflt,
           bool required = false) {
    if (!obj.contains(key)) {
        if (required) bad(path + "." + key, "missing");
        return dflt;
    }
    if (!obj[key].is_number()) bad(path + "." + key, "must be a number");
    return obj[key].get<double>();
}

int integer(const json& obj, const std::string& path, const std::string& key, int dflt,
            bool required = false) {
    if (!obj.contains(key)) {
        if (required) bad(path + "." + key, "missing");
        return dflt;
    }
    if (!obj[key].is_number_integer()) bad(path + "." + key, "must be an integer");
    return obj[key].get<int>();
}

std::string str(const json& obj, const std::string& path, const std::string& key,
                const std::string& dflt, bool required = false) {
    if (!obj.contains(key)) {
        if (required) bad(path + "." + key, "missing");
        return dflt;
    }
    if (!obj[key].is_string()) bad(path + "." + key, "must be a string");
    return obj[key].get<std::string>();
}

} // namespace

SpatialProfile ChannelSpec::spatial() const {
    if (spatial_kind == "constant") return SpatialProfile::constant(amplitude);
    if (spatial_kind == "gaussian_decay") return SpatialProfile::gaussian_decay(amplitude, spatial_param);
    if (spatial_kind == "inverse_poly") return SpatialProfile::inverse_poly(amplitude, spatial_param);
    throw ConfigError("noise.channels.spatial.kind: unknown kind '" + spatial_kind + "'");
}

TemporalProfile ChannelSpec::temporal() const {
    if (temporal_kind == "constant") return TemporalProfile::constant(temporal_scale);
    if (temporal_kind == "compact") return TemporalProfile::compact(temporal_scale, temporal_param);
    if (temporal_kind == "poly_decay") return TemporalProfile::poly_decay(temporal_scale, temporal_param);
    if (temporal_kind == "exp_decay") return TemporalProfile::exp_decay(temporal_scale, temporal_param);
    throw ConfigError("noise.channels.temporal.kind: unknown kind '" + temporal_kind + "'");
}

Grid RunConfig::make_grid() const { return Grid(d, n, L); }

Field RunConfig::make_initial(const Grid& g) const {
    if (initial.kind == "gaussian") return gaussian_field(g, initial.amplitude, initial.width);
    if (initial.kind == "sech") return sech_field(g, initial.amplitude, initial.width);
    if (initial.kind == "plane_wave") return plane_wave_field(g, initial.amplitude, initial.mode);
    if (initial.kind == "file") {
        Field f = read_field(initial.path);
        if (!f.grid.same_as(g)) throw ConfigError("problem.initial.path: field grid mismatch");
        return f;
    }
    throw ConfigError("problem.initial.kind: unknown kind '" + initial.kind + "'");
}

std::vector<std::pair<SpatialProfile, TemporalProfile>> RunConfig::make_channels() const {
    std::vector<std::pair<SpatialProfile, TemporalProfile>> out;
    for (const auto& c : channels) out.emplace_back(c.spatial(), c.temporal());
    return out;
}

StepPlan RunConfig::make_plan() const {
    StepPlan p;
    p.dt = dt;
    p.snapshot_stride = snapshot_stride;
    p.blowup_cap = experiment.blowup_cap;
    return p;
}

int RunConfig::mesh_cells() const {
    double h = horizon > 0.0 ? horizon : T;
    int cells = static_cast<int>(std::llround(h / dt));
    if (cells < 1 || std::abs(cells * dt - h) > 1e-9 * h)
        throw ConfigError("time.horizon: must be a whole number of dt cells");
    return cells;
}

RunConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: JSON parse failure: ") + e.what());
    }
    expect_keys(root, "config",
                {"problem", "grid", "time", "noise", "experiment", "master_seed", "output",
                 "threads"});
    RunConfig cfg;

    if (!root.contains("problem")) bad("config.problem", "missing");
    const json& prob = root["problem"];
    expect_keys(prob, "problem", {"d", "alpha", "lambda", "initial"});
    cfg.d = integer(prob, "problem", "d", 1, true);
    cfg.alpha = num(prob, "problem", "alpha", 3.0, true);
    cfg.lambda = integer(prob, "problem", "lambda", -1, true);
    if (cfg.d < 1 || cfg.d > 3) bad("problem.d", "must be 1, 2 or 3");
    if (!(cfg.alpha > 1.0)) bad("problem.alpha", "must exceed 1");
    if (cfg.lambda < -1 || cfg.lambda > 1) bad("problem.lambda", "must be -1, 0 or +1");
    if (prob.contains("initial")) {
        const json& ini = prob["initial"];
        expect_keys(ini, "problem.initial",
                    {"kind", "amplitude_re", "amplitude_im", "width", "mode", "path"});
        cfg.initial.kind = str(ini, "problem.initial", "kind", "gaussian", true);
        cfg.initial.amplitude = cplx(num(ini, "problem.initial", "amplitude_re", 1.0),
                                     num(ini, "problem.initial", "amplitude_im", 0.0));
        cfg.initial.width = num(ini, "problem.initial", "width", 1.0);
        if (!(cfg.initial.width > 0.0)) bad("problem.initial.width", "must be positive");
        if (ini.contains("mode")) {
            if (!ini["mode"].is_array()) bad("problem.initial.mode", "must be an array of integers");
            for (const auto& m : ini["mode"]) {
                if (!m.is_number_integer()) bad("problem.initial.mode", "must be an array of integers");
                cfg.initial.mode.push_back(m.get<int>());
            }
        }
        cfg.initial.path = str(ini, "problem.initial", "path", "");
    } else {
        bad("problem.initial", "missing");
    }

    if (!root.contains("grid")) bad("config.grid", "missing");
    const json& grid = root["grid"];
    expect_keys(grid, "grid", {"n", "L"});
    cfg.n = integer(grid, "grid", "n", 256, true);
    cfg.L = num(grid, "grid", "L", 40.0, true);

    if (!root.contains("time")) bad("config.time", "missing");
    const json& time = root["time"];
    expect_keys(time, "time", {"T", "dt", "snapshot_stride", "horizon"});
    cfg.T = num(time, "time", "T", 1.0, true);
    cfg.dt = num(time, "time", "dt", 1e-3, true);
    cfg.snapshot_stride = integer(time, "time", "snapshot_stride", 1);
    cfg.horizon = num(time, "time", "horizon", 0.0);
    if (!(cfg.T > 0.0)) bad("time.T", "must be positive");
    if (!(cfg.dt > 0.0)) bad("time.dt", "must be positive");
    if (cfg.snapshot_stride < 1) bad("time.snapshot_stride", "must be >= 1");
    if (cfg.horizon != 0.0 && cfg.horizon < cfg.T) bad("time.horizon", "must cover T");

    if (root.contains("noise")) {
        const json& noise = root["noise"];
        expect_keys(noise, "noise", {"channels"});
        if (noise.contains("channels")) {
            if (!noise["channels"].is_array()) bad("noise.channels", "must be an array");
            int idx = 0;
            for (const auto& chj : noise["channels"]) {
                std::string path = "noise.channels[" + std::to_string(idx) + "]";
                expect_keys(chj, path, {"spatial", "temporal"});
                ChannelSpec spec;
                if (!chj.contains("spatial")) bad(path + ".spatial", "missing");
                const json& sp = chj["spatial"];
                expect_keys(sp, path + ".spatial", {"kind", "amp_re", "amp_im", "width", "power"});
                spec.spatial_kind = str(sp, path + ".spatial", "kind", "constant", true);
                spec.amplitude = cplx(num(sp, path + ".spatial", "amp_re", 0.0),
                                      num(sp, path + ".spatial", "amp_im", 0.0));
                if (spec.spatial_kind == "gaussian_decay")
                    spec.spatial_param = num(sp, path + ".spatial", "width", 1.0, true);
                else if (spec.spatial_kind == "inverse_poly")
                    spec.spatial_param = num(sp, path + ".spatial", "power", 3.0, true);
                if (!chj.contains("temporal")) bad(path + ".temporal", "missing");
                const json& tp = chj["temporal"];
                expect_keys(tp, path + ".temporal", {"kind", "scale", "rate", "support"});
                spec.temporal_kind = str(tp, path + ".temporal", "kind", "exp_decay", true);
                spec.temporal_scale = num(tp, path + ".temporal", "scale", 1.0, true);
                if (spec.temporal_kind == "compact")
                    spec.temporal_param = num(tp, path + ".temporal", "support", 0.0, true);
                else if (spec.temporal_kind != "constant")
                    spec.temporal_param = num(tp, path + ".temporal", "rate", 1.0, true);
                (void)spec.spatial();   // kind/parameter validation
                (void)spec.temporal();
                cfg.channels.push_back(std::move(spec));
                ++idx;
            }
        }
    }

    if (root.contains("experiment")) {
        const json& ex = root["experiment"];
        expect_keys(ex, "experiment",
                    {"study", "windows", "ratio", "norm", "pullback", "paths", "v1_grid", "theta",
                     "levels", "blowup_cap", "martingale_paths", "clt_paths", "lens_t1"});
        cfg.experiment.study = str(ex, "experiment", "study", "simulate");
        cfg.experiment.windows = integer(ex, "experiment", "windows", 4);
        cfg.experiment.ratio = num(ex, "experiment", "ratio", 0.5);
        cfg.experiment.norm = str(ex, "experiment", "norm", "H1");
        cfg.experiment.pullback = str(ex, "experiment", "pullback", "phi_star");
        cfg.experiment.paths = integer(ex, "experiment", "paths", 20);
        cfg.experiment.theta = num(ex, "experiment", "theta", 0.0);
        cfg.experiment.levels = integer(ex, "experiment", "levels", 3);
        cfg.experiment.blowup_cap = num(ex, "experiment", "blowup_cap", 1e6);
        cfg.experiment.martingale_paths = integer(ex, "experiment", "martingale_paths", 0);
        cfg.experiment.clt_paths = integer(ex, "experiment", "clt_paths", 0);
        cfg.experiment.lens_t1 = num(ex, "experiment", "lens_t1", 0.9);
        if (ex.contains("v1_grid")) {
            if (!ex["v1_grid"].is_array()) bad("experiment.v1_grid", "must be an array of numbers");
            for (const auto& v : ex["v1_grid"]) {
                if (!v.is_number()) bad("experiment.v1_grid", "must be an array of numbers");
                cfg.experiment.v1_grid.push_back(v.get<double>());
            }
        }
        if (cfg.experiment.windows < 1) bad("experiment.windows", "must be >= 1");
        if (!(cfg.experiment.ratio > 0.0 && cfg.experiment.ratio < 1.0))
            bad("experiment.ratio", "must lie in (0,1)");
        if (cfg.experiment.norm != "H1" && cfg.experiment.norm != "Sigma")
            bad("experiment.norm", "must be H1 or Sigma");
        if (cfg.experiment.pullback != "phi_star" && cfg.experiment.pullback != "phi")
            bad("experiment.pullback", "must be phi_star or phi");
        if (cfg.experiment.paths < 1) bad("experiment.paths", "must be >= 1");
        if (cfg.experiment.levels < 2) bad("experiment.levels", "must be >= 2");
        if (!(cfg.experiment.lens_t1 > 0.0 && cfg.experiment.lens_t1 < 1.0))
            bad("experiment.lens_t1", "must lie in (0,1)");
    }

    if (!root.contains("master_seed")) bad("config.master_seed", "missing");
    if (!root["master_seed"].is_number_unsigned() && !root["master_seed"].is_number_integer())
        bad("config.master_seed", "must be an integer");
    cfg.master_seed = root["master_seed"].get<uint64_t>();
    cfg.output_dir = str(root, "config", "output", "out");
    cfg.threads = integer(root, "config", "threads", 0);

    // eager structural validation
    (void)cfg.make_grid();
    (void)cfg.mesh_cells();
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot read " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

namespace {
json to_json(const RunConfig& c) {
    json j;
    j["problem"] = {{"d", c.d}, {"alpha", c.alpha}, {"lambda", c.lambda}};
    j["problem"]["initial"] = {{"kind", c.initial.kind},
                               {"amplitude_re", c.initial.amplitude.real()},
                               {"amplitude_im", c.initial.amplitude.imag()},
                               {"width", c.initial.width},
                               {"mode", c.initial.mode},
                               {"path", c.initial.path}};
    j["grid"] = {{"n", c.n}, {"L", c.L}};
    j["time"] = {{"T", c.T}, {"dt", c.dt}, {"snapshot_stride", c.snapshot_stride},
                 {"horizon", c.horizon}};
    json chans = json::array();
    for (const auto& ch : c.channels)
        chans.push_back({{"spatial_kind", ch.spatial_kind},
                         {"amp_re", ch.amplitude.real()},
                         {"amp_im", ch.amplitude.imag()},
                         {"spatial_param", ch.spatial_param},
                         {"temporal_kind", ch.temporal_kind},
                         {"temporal_scale", ch.temporal_scale},
                         {"temporal_param", ch.temporal_param}});
    j["noise"] = {{"channels", chans}};
    j["experiment"] = {{"study", c.experiment.study},
                       {"windows", c.experiment.windows},
                       {"ratio", c.experiment.ratio},
                       {"norm", c.experiment.norm},
                       {"pullback", c.experiment.pullback},
                       {"paths", c.experiment.paths},
                       {"v1_grid", c.experiment.v1_grid},
                       {"theta", c.experiment.theta},
                       {"levels", c.experiment.levels},
                       {"blowup_cap", c.experiment.blowup_cap},
                       {"martingale_paths", c.experiment.martingale_paths},
                       {"clt_paths", c.experiment.clt_paths},
                       {"lens_t1", c.experiment.lens_t1}};
    j["master_seed"] = c.master_seed;
    j["output"] = c.output_dir;
    return j;
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}
} // namespace

std::string RunConfig::canonical_json() const { return to_json(*this).dump(); }

std::string RunConfig::config_hash() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(canonical_json())));
    return std::string(buf);
}

void validate_for_study(const RunConfig& cfg, const std::string& sub) {
    if (sub == "sweep") {
        if (cfg.channels.empty()) throw ConfigError("noise.channels: sweep needs (H2) noise");
        for (std::size_t i = 0; i < cfg.channels.size(); ++i) {
            const auto& ch = cfg.channels[i];
            std::string path = "noise.channels[" + std::to_string(i) + "]";
            if (ch.spatial_kind != "constant")
                throw ConfigError(path + ".spatial.kind: (H2) requires constant profiles");
            if (ch.temporal_kind != "constant")
                throw ConfigError(path + ".temporal.kind: (H2) requires inf_t g >= c0 > 0");
        }
        if (cfg.experiment.v1_grid.empty())
            throw ConfigError("experiment.v1_grid: sweep needs at least one Re v1 value");
    }
    if (sub == "scatter" && cfg.experiment.pullback == "phi_star") {
        for (std::size_t i = 0; i < cfg.channels.size(); ++i) {
            const auto& ch = cfg.channels[i];
            std::string path = "noise.channels[" + std::to_string(i) + "]";
            double tail = ch.temporal().sq_tail(cfg.horizon > 0.0 ? cfg.horizon : cfg.T);
            if (!(tail <= 1e-8))
                throw ConfigError(path + ".temporal: tail of int g^2 beyond the horizon is " +
                                  std::to_string(tail) + ", need <= 1e-8 for phi_star studies");
        }
    }
    if (sub == "ito-check" || sub == "converge") {
        if (cfg.experiment.levels < 2) throw ConfigError("experiment.levels: need >= 2");
    }
}

} // namespace sns
