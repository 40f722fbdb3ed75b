/* echolab C interface: opaque handles, integer status codes, thread-local error text. */
#ifndef ECHOLAB_H
#define ECHOLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(ECHOLAB_BUILDING)
#define ECHOLAB_API __attribute__((visibility("default")))
#else
#define ECHOLAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum echolab_status
{
    ECHOLAB_OK = 0,
    ECHOLAB_E_PARSE = 1,
    ECHOLAB_E_RANGE = 2,
    ECHOLAB_E_UNKNOWN_KEY = 3,
    ECHOLAB_E_DIMENSION = 4,
    ECHOLAB_E_BASIS = 5,
    ECHOLAB_E_MISSING_DATA = 6,
    ECHOLAB_E_NUMERICAL = 7,
    ECHOLAB_E_IO = 8,
    ECHOLAB_E_INTERNAL = 9,
    ECHOLAB_E_ARGUMENT = 10 /* null handle or pointer */
} echolab_status;

typedef struct echolab_config echolab_config;
typedef struct echolab_table echolab_table;
typedef struct echolab_state echolab_state;
typedef struct echolab_floquet echolab_floquet;

ECHOLAB_API const char* echolab_version(void);
/* "E_PARSE", "E_RANGE", ... */
ECHOLAB_API const char* echolab_status_name(int status);
/* Message of the last failed call on this thread; "" after success. */
ECHOLAB_API const char* echolab_last_error(void);
/* Releases buffers returned by echolab_table_emit. */
ECHOLAB_API void echolab_free(void* p);

/* Configuration. overrides is an array of n_overrides "key=value" strings applied on top of the text. */
ECHOLAB_API int echolab_config_parse(const char* text, const char* const* overrides, size_t n_overrides,
                                     echolab_config** out);
ECHOLAB_API int echolab_config_load(const char* path, const char* const* overrides, size_t n_overrides,
                                    echolab_config** out);
ECHOLAB_API const char* echolab_config_experiment(const echolab_config* cfg);
ECHOLAB_API const char* echolab_config_output(const echolab_config* cfg);
ECHOLAB_API const char* echolab_config_format(const echolab_config* cfg);
ECHOLAB_API void echolab_config_free(echolab_config* cfg);

/* Experiment names and the key = value text of a bundled recipe. */
ECHOLAB_API size_t echolab_experiment_count(void);
ECHOLAB_API const char* echolab_experiment_name(size_t i);
ECHOLAB_API size_t echolab_recipe_count(void);
ECHOLAB_API const char* echolab_recipe_name(size_t i);
ECHOLAB_API const char* echolab_recipe_summary(size_t i);
ECHOLAB_API int echolab_recipe_config(const char* name, const char** text);

/* Execution. jobs <= 0 falls back to ECHOLAB_JOBS, then the core count. */
ECHOLAB_API int echolab_run(const echolab_config* cfg, int jobs, int deterministic, echolab_table** out);
ECHOLAB_API size_t echolab_table_rows(const echolab_table* t);
ECHOLAB_API size_t echolab_table_cols(const echolab_table* t);
ECHOLAB_API const char* echolab_table_column(const echolab_table* t, size_t col);
ECHOLAB_API double echolab_table_value(const echolab_table* t, size_t row, size_t col);
/* format is "csv" or "json"; *bytes is NUL-terminated and released with echolab_free. */
ECHOLAB_API int echolab_table_emit(const echolab_table* t, const char* format, char** bytes, size_t* len);
ECHOLAB_API int echolab_table_write(const echolab_table* t, const char* format, const char* path);
ECHOLAB_API int echolab_table_parse_csv(const char* text, echolab_table** out);
ECHOLAB_API void echolab_table_free(echolab_table* t);

/* Engines and states for direct use. */
ECHOLAB_API int echolab_floquet_rotator(size_t N, double K, echolab_floquet** out);
ECHOLAB_API int echolab_floquet_top(int two_spin, double K, double phi, echolab_floquet** out);
ECHOLAB_API size_t echolab_floquet_dim(const echolab_floquet* f);
ECHOLAB_API void echolab_floquet_free(echolab_floquet* f);

ECHOLAB_API int echolab_state_torus_packet(size_t N, double x0, double p0, double width, echolab_state** out);
ECHOLAB_API int echolab_state_spin_coherent(int two_spin, double theta, double phi, echolab_state** out);
ECHOLAB_API size_t echolab_state_dim(const echolab_state* s);
/* Interleaved (re, im) pairs, 2 * dim doubles. */
ECHOLAB_API int echolab_state_amplitudes(const echolab_state* s, double* out, size_t n_doubles);
ECHOLAB_API int echolab_state_evolve(echolab_state* s, const echolab_floquet* f, long n);
ECHOLAB_API void echolab_state_free(echolab_state* s);

/* values receives n_max + 1 entries. */
ECHOLAB_API int echolab_loschmidt(const echolab_state* psi0, const echolab_floquet* f0, const echolab_floquet* f,
                                  long n_max, double* values);

#ifdef __cplusplus
}
#endif

#endif
