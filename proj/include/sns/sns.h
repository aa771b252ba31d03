/* Public C API for the stochastic NLS simulation core.
 *
 * All entry points return an sns_status; non-zero values match the CLI exit
 * codes (2 config, 3 blow-up, 4 internal consistency, 1 other). Handles are
 * opaque; every object must be released with its matching _free call.
 * Error text for the calling thread is available via sns_last_error().
 */

#ifndef SNS_H
#define SNS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SNS_API __declspec(dllexport)
#else
#define SNS_API __attribute__((visibility("default")))
#endif

typedef enum sns_status {
    SNS_OK = 0,
    SNS_ERR_RUNTIME = 1,
    SNS_ERR_CONFIG = 2,
    SNS_ERR_BLOWUP = 3,
    SNS_ERR_CONSISTENCY = 4
} sns_status;

typedef struct sns_config sns_config;

SNS_API const char* sns_version(void);
SNS_API const char* sns_last_error(void);

/* --- configuration ------------------------------------------------------ */

SNS_API sns_status sns_config_load(const char* path, sns_config** out);
SNS_API sns_status sns_config_parse(const char* json_text, sns_config** out);
SNS_API void sns_config_free(sns_config* cfg);

SNS_API sns_status sns_config_set_seed(sns_config* cfg, uint64_t seed);
SNS_API sns_status sns_config_set_output_dir(sns_config* cfg, const char* dir);
SNS_API sns_status sns_config_set_threads(sns_config* cfg, int threads);
/* 16-hex-digit hash of the canonical configuration; buf needs >= 17 bytes. */
SNS_API sns_status sns_config_hash(const sns_config* cfg, char* buf, size_t len);

/* --- runs ----------------------------------------------------------------
 * subcommand: simulate | ito-check | converge | scatter | sweep |
 *             transforms | exponents.
 * Artifacts are written under the configured output directory. When
 * message/len is provided, human-readable output (the exponent table, error
 * text) is copied there.
 */
SNS_API sns_status sns_run(const sns_config* cfg, const char* subcommand, char* message,
                           size_t len);

/* --- derived exponents --------------------------------------------------- */

typedef struct sns_exponents {
    double strauss;
    double h_power;
    double q_tilde;       /* +inf at the energy-critical endpoint */
    int q_tilde_finite;
    double theta;
    double p1, p2, q2;
    char criticality[24];
} sns_exponents;

SNS_API sns_status sns_exponent_table(int d, double alpha, int lambda, sns_exponents* out);

/* Exact admissibility of 2/q = d(1/2 - 1/p); denominators 0 encode infinity. */
SNS_API int sns_strichartz_admissible(int64_t p_num, int64_t p_den, int64_t q_num,
                                      int64_t q_den, int d);

/* --- field files ----------------------------------------------------------
 * Flat binary layout: u64 d, u64 n (little endian), f64 L, then re/im f64
 * pairs in row-major order.
 */
SNS_API sns_status sns_field_file_info(const char* path, uint64_t* d, uint64_t* n, double* L);
/* values must hold 2*n^d doubles (interleaved re/im). */
SNS_API sns_status sns_field_file_read(const char* path, double* values, size_t count);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SNS_H */
