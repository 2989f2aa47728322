/* C interface to the fimform formation-design library.
 *
 * Every call returns an ff_status. On failure a thread-local message is
 * available from ff_last_error() until the next call on the same thread.
 * Strings returned through char** out-parameters are owned by the caller and
 * released with ff_string_free().
 */
#ifndef FIMFORM_H
#define FIMFORM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FF_API __declspec(dllexport)
#else
#define FF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ff_status {
  FF_OK = 0,
  FF_ERR_INVALID_ARGUMENT = 1, /* null handle, bad enum value, bad option */
  FF_ERR_CONFIG = 2,           /* unreadable, malformed or invalid input document */
  FF_ERR_IO = 3,               /* output could not be written */
  FF_ERR_DEGENERATE = 4,       /* degenerate geometry (e.g. UAV above the target) */
  FF_ERR_NUMERIC = 5,          /* factorization failure, non-finite state */
  FF_ERR_INTERNAL = 6
} ff_status;

typedef enum ff_stage {
  FF_STAGE_ALLOCATE = 0,
  FF_STAGE_FORMATION = 1,
  FF_STAGE_FLY = 2
} ff_stage;

typedef struct ff_scenario ff_scenario;
typedef struct ff_report ff_report;

FF_API const char* ff_version(void);
FF_API const char* ff_last_error(void);
FF_API const char* ff_status_name(ff_status status);
FF_API void ff_string_free(char* s);

FF_API ff_status ff_scenario_load(const char* path, ff_scenario** out);
FF_API ff_status ff_scenario_parse(const char* json_text, ff_scenario** out);
/* Canonical JSON of the scenario (sorted keys). */
FF_API ff_status ff_scenario_to_json(const ff_scenario* s, char** out);
FF_API void ff_scenario_free(ff_scenario* s);

/* Run options are held on the scenario handle. controller: "log", "quad",
 * "apf", or NULL to use the scenario's own controller list. */
FF_API ff_status ff_scenario_set_seed(ff_scenario* s, uint64_t seed);
FF_API ff_status ff_scenario_set_controller(ff_scenario* s, const char* controller);

FF_API ff_status ff_run(const ff_scenario* s, ff_stage stage, ff_report** out);
FF_API ff_status ff_report_json(const ff_report* r, char** out);
FF_API ff_status ff_report_file_count(const ff_report* r, size_t* out);
FF_API ff_status ff_report_file_name(const ff_report* r, size_t index, const char** out);
/* Writes report.json and the CSV traces into dir (created if missing). */
FF_API ff_status ff_report_write(const ff_report* r, const char* dir);
FF_API void ff_report_free(ff_report* r);

/* Regularized log det of the total FIM for an explicit pose list. report may
 * be NULL; otherwise it receives a JSON document. */
FF_API ff_status ff_eval_fim(const char* formation_path, double* log_det, char** report);

/* Atomically writes content to dir/name, creating dir if missing. */
FF_API ff_status ff_write_text(const char* dir, const char* name, const char* content);

#ifdef __cplusplus
}
#endif

#endif /* FIMFORM_H */
