#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "dynamics.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "profiles.hpp"

namespace sns {

struct InitialData {
    std::string kind = "gaussian";  // gaussian | sech | plane_wave | file
    cplx amplitude{1.0, 0.0};
    double width = 1.0;
    std::vector<int> mode;          // plane_wave
    std::string path;               // file
};

struct ChannelSpec {
    std::string spatial_kind = "constant";  // constant | gaussian_decay | inverse_poly
    cplx amplitude{0.0, 1.0};
    double spatial_param = 1.0;             // width or power
    std::string temporal_kind = "exp_decay"; // constant | compact | poly_decay | exp_decay
    double temporal_scale = 1.0;
    double temporal_param = 1.0;            // T0 or rate

    SpatialProfile spatial() const;
    TemporalProfile temporal() const;
};

struct ExperimentBlock {
    std::string study = "simulate";
    int windows = 4;
    double ratio = 0.5;
    std::string norm = "H1";          // H1 | Sigma
    std::string pullback = "phi_star"; // phi_star | phi
    int paths = 20;
    std::vector<double> v1_grid;
    double theta = 0.0;               // <= 0: exponent-table value
    int levels = 3;
    double blowup_cap = 1e6;
    int martingale_paths = 0;
    int clt_paths = 0;
    double lens_t1 = 0.9;
};

// Parsed, validated run configuration. Unknown keys anywhere are errors.
struct RunConfig {
    int d = 1;
    double alpha = 3.0;
    int lambda = -1;
    InitialData initial;

    int n = 256;
    double L = 40.0;

    double T = 1.0;
    double dt = 1e-3;
    int snapshot_stride = 1;
    double horizon = 0.0;             // defaults to T

    std::vector<ChannelSpec> channels;
    ExperimentBlock experiment;

    uint64_t master_seed = 1;
    std::string output_dir = "out";
    int threads = 0;                  // 0: env/hardware

    Grid make_grid() const;
    Field make_initial(const Grid& g) const;
    std::vector<std::pair<SpatialProfile, TemporalProfile>> make_channels() const;
    StepPlan make_plan() const;
    int mesh_cells() const;

    // canonical JSON (sorted keys) and its FNV-1a hash; both stable across reruns
    std::string canonical_json() const;
    std::string config_hash() const;
};

RunConfig parse_config_text(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

// Study-specific validation gate; throws ConfigError with a field-level message.
void validate_for_study(const RunConfig& cfg, const std::string& subcommand);

} // namespace sns
