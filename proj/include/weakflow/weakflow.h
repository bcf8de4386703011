/* weakflow: weak-value / weak-quantum-evolution laboratory, C API.
 *
 * All state lives behind opaque handles. Functions return wf_status; on any
 * failure wf_last_error() / wf_last_error_kind() describe the most recent
 * error on the calling thread. Strings returned by the API are owned by the
 * handle they came from and stay valid until that handle is freed.
 */
#ifndef WEAKFLOW_H
#define WEAKFLOW_H

#include <stddef.h>

#ifdef _WIN32
#define WEAKFLOW_API __declspec(dllexport)
#else
#define WEAKFLOW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wf_status {
    WF_OK = 0,
    WF_ERR_CONFIG = 1,  /* bad key, value, command or file */
    WF_ERR_DOMAIN = 2,  /* orthogonal selection, starved post-selection, ... */
    WF_ERR_NUMERIC = 3  /* numerical failure */
} wf_status;

typedef struct wf_config wf_config;
typedef struct wf_result wf_result;

WEAKFLOW_API const char* wf_version(void);

/* Configuration: flat "section.key" string pairs. wf_config_load_file reads
 * the key = value / [section] format; later sets override earlier ones. */
WEAKFLOW_API wf_config* wf_config_new(void);
WEAKFLOW_API void wf_config_free(wf_config* config);
WEAKFLOW_API wf_status wf_config_set(wf_config* config, const char* key, const char* value);
WEAKFLOW_API wf_status wf_config_load_file(wf_config* config, const char* path);

/* Runs one command: "weak-value", "series-compare", "aav", "regimes" or
 * "transition". On WF_OK the caller owns *out_result. */
WEAKFLOW_API wf_status wf_run(const wf_config* config, const char* command,
                              wf_result** out_result);

WEAKFLOW_API size_t wf_result_rows(const wf_result* result);
WEAKFLOW_API size_t wf_result_cols(const wf_result* result);
WEAKFLOW_API const char* wf_result_column(const wf_result* result, size_t index);

/* Full rendered document in "csv" or "json"; NULL on unknown format. */
WEAKFLOW_API const char* wf_result_render(wf_result* result, const char* format);
WEAKFLOW_API void wf_result_free(wf_result* result);

/* Most recent error on this thread: human-readable message and short kind
 * tag (e.g. "OrthogonalSelection"). */
WEAKFLOW_API const char* wf_last_error(void);
WEAKFLOW_API const char* wf_last_error_kind(void);

#ifdef __cplusplus
}
#endif

#endif /* WEAKFLOW_H */
