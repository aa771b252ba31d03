#include "sns/sns.h"

#include <cstring>
#include <string>

#include "../core/config.hpp"
#include "../core/exponents.hpp"
#include "../core/field.hpp"
#include "../core/runner.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

void copy_out(const std::string& s, char* buf, size_t len) {
    if (!buf || len == 0) return;
    size_t n = std::min(len - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
}

sns_status map_exception() {
    try {
        throw;
    } catch (const sns::ConfigError& e) {
        set_error(e.what());
        return SNS_ERR_CONFIG;
    } catch (const sns::BlowUpError& e) {
        set_error(e.what());
        return SNS_ERR_BLOWUP;
    } catch (const sns::ConsistencyError& e) {
        set_error(e.what());
        return SNS_ERR_CONSISTENCY;
    } catch (const std::exception& e) {
        set_error(e.what());
        return SNS_ERR_RUNTIME;
    } catch (...) {
        set_error("unknown error");
        return SNS_ERR_RUNTIME;
    }
}

} // namespace

struct sns_config {
    sns::RunConfig cfg;
};

extern "C" {

const char* sns_version(void) { return sns::version_string(); }

const char* sns_last_error(void) { return g_last_error.c_str(); }

sns_status sns_config_load(const char* path, sns_config** out) {
    if (!path || !out) {
        set_error("null argument");
        return SNS_ERR_RUNTIME;
    }
    try {
        auto* h = new sns_config{sns::load_config_file(path)};
        *out = h;
        return SNS_OK;
    } catch (...) {
        *out = nullptr;
        return map_exception();
    }
}

sns_status sns_config_parse(const char* json_text, sns_config** out) {
    if (!json_text || !out) {
        set_error("null argument");
        return SNS_ERR_RUNTIME;
    }
    try {
        auto* h = new sns_config{sns::parse_config_text(json_text)};
        *out = h;
        return SNS_OK;
    } catch (...) {
        *out = nullptr;
        return map_exception();
    }
}

void sns_config_free(sns_config* cfg) { delete cfg; }

sns_status sns_config_set_seed(sns_config* cfg, uint64_t seed) {
    if (!cfg) {
        set_error("null config");
        return SNS_ERR_RUNTIME;
    }
    cfg->cfg.master_seed = seed;
    return SNS_OK;
}

sns_status sns_config_set_output_dir(sns_config* cfg, const char* dir) {
    if (!cfg || !dir) {
        set_error("null argument");
        return SNS_ERR_RUNTIME;
    }
    cfg->cfg.output_dir = dir;
    return SNS_OK;
}

sns_status sns_config_set_threads(sns_config* cfg, int threads) {
    if (!cfg) {
        set_error("null config");
        return SNS_ERR_RUNTIME;
    }
    cfg->cfg.threads = threads;
    return SNS_OK;
}

sns_status sns_config_hash(const sns_config* cfg, char* buf, size_t len) {
    if (!cfg) {
        set_error("null config");
        return SNS_ERR_RUNTIME;
    }
    try {
        copy_out(cfg->cfg.config_hash(), buf, len);
        return SNS_OK;
    } catch (...) {
        return map_exception();
    }
}

sns_status sns_run(const sns_config* cfg, const char* subcommand, char* message, size_t len) {
    if (!cfg || !subcommand) {
        set_error("null argument");
        return SNS_ERR_RUNTIME;
    }
    try {
        std::string msg;
        int code = sns::run_subcommand(subcommand, cfg->cfg, sns::RunOverrides{}, msg);
        copy_out(msg, message, len);
        if (code != 0) set_error(msg);
        return static_cast<sns_status>(code);
    } catch (...) {
        return map_exception();
    }
}

sns_status sns_exponent_table(int d, double alpha, int lambda, sns_exponents* out) {
    if (!out) {
        set_error("null output");
        return SNS_ERR_RUNTIME;
    }
    try {
        sns::ExponentTable t = sns::exponents(d, alpha, lambda);
        out->strauss = t.strauss;
        out->h_power = t.h_power;
        out->q_tilde = t.q_tilde;
        out->q_tilde_finite = t.q_tilde_finite ? 1 : 0;
        out->theta = t.theta;
        out->p1 = t.p1;
        out->p2 = t.p2;
        out->q2 = t.q2;
        std::snprintf(out->criticality, sizeof(out->criticality), "%s",
                      sns::criticality_name(t.cls));
        return SNS_OK;
    } catch (...) {
        return map_exception();
    }
}

int sns_strichartz_admissible(int64_t p_num, int64_t p_den, int64_t q_num, int64_t q_den,
                              int d) {
    try {
        sns::Rational p = p_den == 0 ? sns::Rational::infinity()
                                     : sns::Rational::make(p_num, p_den);
        sns::Rational q = q_den == 0 ? sns::Rational::infinity()
                                     : sns::Rational::make(q_num, q_den);
        return sns::strichartz_admissible(p, q, d) ? 1 : 0;
    } catch (...) {
        (void)map_exception();
        return 0;
    }
}

sns_status sns_field_file_info(const char* path, uint64_t* d, uint64_t* n, double* L) {
    if (!path) {
        set_error("null path");
        return SNS_ERR_RUNTIME;
    }
    try {
        sns::Field f = sns::read_field(path);
        if (d) *d = static_cast<uint64_t>(f.grid.d());
        if (n) *n = static_cast<uint64_t>(f.grid.n());
        if (L) *L = f.grid.L();
        return SNS_OK;
    } catch (...) {
        return map_exception();
    }
}

sns_status sns_field_file_read(const char* path, double* values, size_t count) {
    if (!path || !values) {
        set_error("null argument");
        return SNS_ERR_RUNTIME;
    }
    try {
        sns::Field f = sns::read_field(path);
        if (count < 2 * f.size()) {
            set_error("buffer too small");
            return SNS_ERR_RUNTIME;
        }
        for (std::size_t i = 0; i < f.size(); ++i) {
            values[2 * i] = f.values[i].real();
            values[2 * i + 1] = f.values[i].imag();
        }
        return SNS_OK;
    } catch (...) {
        return map_exception();
    }
}

} // extern "C"
