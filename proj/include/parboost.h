/* C interface to the parboost shared library.
 *
 * All functionality is reached through opaque handles and integer status
 * codes. Strings returned by pb_* accessors are owned by the handle they
 * came from and stay valid until that handle is freed. pb_last_error_message
 * returns a thread-local description of the most recent failure.
 */
#ifndef PARBOOST_H
#define PARBOOST_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PB_API __declspec(dllexport)
#else
#define PB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pb_status {
  PB_OK = 0,
  PB_ERR_INVALID_ARGUMENT = 1,
  PB_ERR_PARSE = 2,
  PB_ERR_IO = 3,
  PB_ERR_CONSTRUCTION = 4,
  PB_ERR_PROTOCOL = 5,
  PB_ERR_ASSERTION = 6,
  PB_ERR_INTERNAL = 7
} pb_status;

typedef struct pb_config pb_config;
typedef struct pb_result pb_result;

PB_API const char* pb_version_string(void);
PB_API const char* pb_status_name(pb_status status);
PB_API const char* pb_last_error_message(void);

/* Configuration handles ----------------------------------------------- */

PB_API pb_status pb_config_create(pb_config** out);
PB_API pb_status pb_config_load(const char* path, pb_config** out);
/* Keys are "section.key" as in the config file format. */
PB_API pb_status pb_config_set(pb_config* config, const char* key, const char* value);
PB_API pb_status pb_config_get(const pb_config* config, const char* key,
                               char* buffer, size_t buffer_len);
PB_API void pb_config_free(pb_config* config);

/* Execution ------------------------------------------------------------ */

/* Runs the mode named in the config (boost, adaboost-baseline, adversary,
 * oracle, verify). */
PB_API pb_status pb_run(const pb_config* config, pb_result** out);

/* Runs the (p, R, t) tradeoff grid described by the config's [grid] block. */
PB_API pb_status pb_grid(const pb_config* config, pb_result** out);

/* Identity suite on seeded micro-instances. */
PB_API pb_status pb_verify(uint64_t seed, pb_result** out);

/* Exact majority-vote error for an n-flip coin biased by beta. */
PB_API pb_status pb_coin_oracle(uint64_t n, double beta, double* out_error);

/* Results ---------------------------------------------------------------- */

/* 1 when every hard assertion of the run held. */
PB_API int pb_result_passed(const pb_result* result);
/* The run's JSON record (one JSON-lines row, no trailing newline). */
PB_API const char* pb_result_json(const pb_result* result);
/* Path of the metrics or grid CSV written by the run; empty when none. */
PB_API const char* pb_result_csv_path(const pb_result* result);
PB_API void pb_result_free(pb_result* result);

#ifdef __cplusplus
}
#endif

#endif /* PARBOOST_H */
