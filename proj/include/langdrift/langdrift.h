/*
 * langdrift C API.
 *
 * Every fallible call returns an ld_status; on failure a message is
 * available from ld_last_error() on the calling thread until its next
 * failing call. Objects are opaque handles released with the matching
 * *_free function. Strings returned through char** are heap copies owned by
 * the caller and released with ld_string_free. All text is UTF-8.
 */
#ifndef LANGDRIFT_H
#define LANGDRIFT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(LANGDRIFT_BUILDING)
#    define LD_API __declspec(dllexport)
#  else
#    define LD_API __declspec(dllimport)
#  endif
#else
#  define LD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ld_status {
    LD_OK = 0,
    LD_ERR_INVALID_ARGUMENT = 1,
    LD_ERR_PARSE = 2,
    LD_ERR_IO = 3,
    LD_ERR_FORMAT = 4,
    LD_ERR_INSUFFICIENT_DATA = 5,
    LD_ERR_NUMERIC = 6,
    LD_ERR_INTERNAL = 99
} ld_status;

typedef enum ld_script {
    LD_SCRIPT_HANGUL = 0,
    LD_SCRIPT_LATIN = 1,
    LD_SCRIPT_CJK = 2,
    LD_SCRIPT_CYRILLIC = 3,
    LD_SCRIPT_CODE_SWITCH = 4,
    LD_SCRIPT_DISCARDED = 5,
    LD_SCRIPT_OTHER = 6
} ld_script;

typedef struct ld_composition ld_composition;
typedef struct ld_experiment ld_experiment;
typedef struct ld_trace_log ld_trace_log;
typedef struct ld_analysis ld_analysis;
typedef struct ld_server ld_server;

LD_API const char* ld_version(void);
LD_API const char* ld_last_error(void);
LD_API void ld_string_free(char* s);

/* ---- script metrics ---------------------------------------------------- */

LD_API ld_status ld_script_from_name(const char* name, ld_script* out);
LD_API const char* ld_script_name(ld_script script);

LD_API ld_status ld_composition_compute(const char* text, size_t len, ld_composition** out);
LD_API void ld_composition_free(ld_composition* comp);
LD_API double ld_composition_word_ratio(const ld_composition* comp, ld_script script);
LD_API double ld_composition_char_ratio(const ld_composition* comp, ld_script script);
LD_API double ld_composition_code_switch_ratio(const ld_composition* comp);
LD_API size_t ld_composition_counted_tokens(const ld_composition* comp);
LD_API size_t ld_composition_discarded_tokens(const ld_composition* comp);
/* Same JSON object the reward server returns per text. */
LD_API ld_status ld_composition_to_json(const ld_composition* comp, char** out);

/* ---- answers and rewards ----------------------------------------------- */

/* *out is set to NULL when the completion holds no answer. */
LD_API ld_status ld_extract_answer(const char* completion, size_t len, char** out);
LD_API ld_status ld_is_correct(const char* completion, size_t len, const char* gold, int* out);
/* gold may be NULL, in which case only lambda * consistency is returned. */
LD_API ld_status ld_combined_reward(const char* completion, size_t len, const char* gold, ld_script target,
                                    double lambda, double* out);

/* ---- simulation --------------------------------------------------------- */

/* preset: collapse | mitigation | difficulty | recovery */
LD_API ld_status ld_experiment_run(const char* preset, uint64_t seed, ld_experiment** out);
LD_API ld_status ld_experiment_write(const ld_experiment* exp, const char* dir);
LD_API ld_status ld_experiment_summary(const ld_experiment* exp, char** out);
LD_API void ld_experiment_free(ld_experiment* exp);

/* ---- rollout-log analysis ---------------------------------------------- */

typedef struct ld_analyze_options {
    ld_script target;
    uint64_t bucket;
    uint64_t window_steps;
    double min_drop;
} ld_analyze_options;

LD_API void ld_analyze_options_default(ld_analyze_options* opts);

LD_API ld_status ld_trace_load(const char* path, ld_trace_log** out);
LD_API size_t ld_trace_record_count(const ld_trace_log* log);
LD_API size_t ld_trace_skipped_count(const ld_trace_log* log);
LD_API void ld_trace_free(ld_trace_log* log);

LD_API ld_status ld_analyze(const ld_trace_log* log, const ld_analyze_options* opts, ld_analysis** out);
LD_API int ld_analysis_has_onset(const ld_analysis* analysis);
LD_API ld_status ld_analysis_onset(const ld_analysis* analysis, uint64_t* start_step, uint64_t* end_step,
                                   double* drop);
LD_API ld_status ld_analysis_write(const ld_analysis* analysis, const char* dir);
LD_API ld_status ld_analysis_summary(const ld_analysis* analysis, char** out);
LD_API void ld_analysis_free(ld_analysis* analysis);

/* ---- reward server ------------------------------------------------------ */

typedef struct ld_server_options {
    double default_lambda;
    double accuracy_weight;
    size_t max_body_bytes;
} ld_server_options;

LD_API void ld_server_options_default(ld_server_options* opts);

/* bind is "host:port"; NULL falls back to $LANGDRIFT_BIND, then
 * 127.0.0.1:8080. Port 0 picks a free port. */
LD_API ld_status ld_server_create(const char* bind, const ld_server_options* opts, ld_server** out);
LD_API int ld_server_port(const ld_server* server);
/* Blocks until ld_server_stop is called from another thread. */
LD_API ld_status ld_server_run(ld_server* server);
LD_API void ld_server_stop(ld_server* server);
LD_API void ld_server_free(ld_server* server);

#ifdef __cplusplus
}
#endif

#endif /* LANGDRIFT_H */
