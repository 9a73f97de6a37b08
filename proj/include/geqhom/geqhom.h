/* C interface of libgeqhom. Every function reports failure through a status
 * code; the message of the last failure on the calling thread is available
 * from geqhom_last_error(). Handles are opaque and owned by the caller. */
#ifndef GEQHOM_H
#define GEQHOM_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define GEQHOM_API __attribute__((visibility("default")))
#else
#define GEQHOM_API
#endif

/* Status codes double as CLI exit codes. */
typedef enum geqhom_status {
  GEQHOM_OK = 0,
  GEQHOM_ACCEPTANCE_FAILED = 1,
  GEQHOM_INVALID_CONFIG = 2,
  GEQHOM_NUMERICAL_FAILURE = 3,
  GEQHOM_IO_ERROR = 4,
  GEQHOM_INTERNAL_ERROR = 5
} geqhom_status;

typedef struct geqhom_config geqhom_config;
typedef struct geqhom_field geqhom_field;

GEQHOM_API const char* geqhom_version(void);

/* Message of the last failed call on this thread ("" if none). Valid until
 * the next call on the same thread. */
GEQHOM_API const char* geqhom_last_error(void);

/* Strings returned through char** are released with geqhom_string_free. */
GEQHOM_API void geqhom_string_free(char* s);

/* Parses a JSON document; syntax errors report the line and column. The
 * document is validated only by geqhom_config_check and geqhom_run. */
GEQHOM_API geqhom_status geqhom_config_parse(const char* json_text, geqhom_config** out);
GEQHOM_API geqhom_status geqhom_config_load(const char* path, geqhom_config** out);
/* Applies a JSON merge patch (RFC 7386), e.g. command-line overrides. */
GEQHOM_API geqhom_status geqhom_config_merge(geqhom_config* config, const char* patch_json);
/* Validates and returns the effective configuration (defaults filled in)
 * and its 16-hex-digit hash. Either output may be NULL. */
GEQHOM_API geqhom_status geqhom_config_check(const geqhom_config* config, char** effective_json, char hash[17]);
GEQHOM_API void geqhom_config_free(geqhom_config* config);

/* Runs the configured experiment. Artifacts go to out_dir, or to the
 * config's "out" when out_dir is NULL. The summary JSON is returned even on
 * failure when summary_json is not NULL. */
GEQHOM_API geqhom_status geqhom_run(const geqhom_config* config, const char* out_dir, char** summary_json);

/* A sampled drift field. `spec` is a JSON field object or a compact spec
 * such as "shear:A=2" or "constant:v1=0.5,v2=0". */
GEQHOM_API geqhom_status geqhom_field_create(const char* spec, uint64_t seed, geqhom_field** out);
GEQHOM_API void geqhom_field_free(geqhom_field* field);
/* Stream function and velocity at x. Either output may be NULL. */
GEQHOM_API geqhom_status geqhom_field_eval(const geqhom_field* field, const double x[2], double* psi, double v[2]);
GEQHOM_API geqhom_status geqhom_field_vinf(const geqhom_field* field, double* v_inf);
/* First-arrival time from source to target (+inf when unreachable) on a
 * lattice of spacing h grown until the value is certified. */
GEQHOM_API geqhom_status geqhom_tau(const geqhom_field* field, const double source[2], const double target[2],
                                    double h, int stencil, int drift_sign, double* tau);

/* Worker threads for later calls; 0 means hardware concurrency. */
GEQHOM_API void geqhom_set_jobs(unsigned jobs);

#ifdef __cplusplus
}
#endif

#endif /* GEQHOM_H */
