/**
 * Copyright 2026 The IPL Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef IPL_IPL_H_
#define IPL_IPL_H_

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define IPL_API __declspec(dllexport)
#else
#define IPL_API __attribute__((visibility("default")))
#endif

/* Status codes double as process exit codes for the command-line tool. */
typedef enum {
  IPL_OK = 0,
  IPL_ERR_CONFIG = 1,   /* bad argument, unknown key, invalid value */
  IPL_ERR_DATA = 2,     /* unreadable or malformed input, schedule violations */
  IPL_ERR_INTERNAL = 3  /* numeric failure (NaN/Inf) or other internal error */
} ipl_status;

typedef struct ipl_config ipl_config;
typedef struct ipl_report ipl_report;

/* Message of the last failing call on this thread; "" if none. Valid until
 * the next call into the library on the same thread. */
IPL_API const char *ipl_last_error(void);
IPL_API const char *ipl_version(void);

/* "quiet", "info" or "debug". NULL reads IPL_LOG (default "info"). */
IPL_API ipl_status ipl_set_log_level(const char *level);

/* Configuration: defaults, then files and key=value overrides in call order. */
IPL_API ipl_status ipl_config_create(ipl_config **out);
IPL_API void ipl_config_destroy(ipl_config *cfg);
IPL_API ipl_status ipl_config_load_file(ipl_config *cfg, const char *path);
IPL_API ipl_status ipl_config_set(ipl_config *cfg, const char *key, const char *value);
/* "key=value" form. */
IPL_API ipl_status ipl_config_assign(ipl_config *cfg, const char *assignment);
/* Copies the value (NUL-terminated) into buf when it fits; *needed receives
 * the required size including the terminator. buf may be NULL when cap is 0. */
IPL_API ipl_status ipl_config_get(const ipl_config *cfg, const char *key, char *buf, size_t cap, size_t *needed);
/* Whole configuration as "key = value" lines; same buffer protocol. */
IPL_API ipl_status ipl_config_dump(const ipl_config *cfg, char *buf, size_t cap, size_t *needed);
IPL_API ipl_status ipl_config_validate(const ipl_config *cfg);

/* Trains and evaluates; writes report.json, report.csv and checkpoint.bin to
 * the configured output directory. *out may be NULL if the report is not
 * needed; otherwise release it with ipl_report_destroy. */
IPL_API ipl_status ipl_run(const ipl_config *cfg, ipl_report **out);
/* Runs the ablation grid and writes ablation.csv. */
IPL_API ipl_status ipl_ablate(const ipl_config *cfg);
/* Writes the configured dataset (generated or loaded) as CSV. */
IPL_API ipl_status ipl_generate_data(const ipl_config *cfg, const char *path);

/* Reads a JSON report written by ipl_run. */
IPL_API ipl_status ipl_report_load(const char *path, ipl_report **out);
IPL_API void ipl_report_destroy(ipl_report *report);
IPL_API size_t ipl_report_session_count(const ipl_report *report);
IPL_API size_t ipl_report_trial_count(const ipl_report *report);
IPL_API ipl_status ipl_report_accuracy(const ipl_report *report, size_t session, double *mean, double *stddev);
IPL_API double ipl_report_average(const ipl_report *report);
/* Per-session table text; same buffer protocol as ipl_config_get. */
IPL_API ipl_status ipl_report_table(const ipl_report *report, char *buf, size_t cap, size_t *needed);
/* Two-column "session accuracy" data for plotting. */
IPL_API ipl_status ipl_report_write_plot(const ipl_report *report, const char *path);

#ifdef __cplusplus
}
#endif

#endif /* IPL_IPL_H_ */
