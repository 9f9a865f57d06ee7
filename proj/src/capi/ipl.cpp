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
#include "ipl/ipl.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "cli/commands.hpp"
#include "cli/experiment_config.hpp"
#include "cli/report_io.hpp"

struct ipl_config {
  ipl::ExperimentConfig cfg;
};

struct ipl_report {
  ipl::ReportSummary summary;
};

namespace {

thread_local std::string g_last_error;

ipl_status fail(ipl_status code, const std::string &message) {
  g_last_error = message;
  return code;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
ipl_status guarded(Fn &&fn) {
  g_last_error.clear();
  try {
    fn();
    return IPL_OK;
  } catch (const ipl::Error &e) {
    return fail(static_cast<ipl_status>(ipl::exit_code_for(e.kind())), e.what());
  } catch (const std::bad_alloc &) {
    return fail(IPL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception &e) {
    return fail(IPL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(IPL_ERR_INTERNAL, "unknown error");
  }
}

ipl_status copy_out(const std::string &text, char *buf, size_t cap, size_t *needed) {
  if (needed) *needed = text.size() + 1;
  if (cap == 0) return IPL_OK;
  if (!buf) return fail(IPL_ERR_CONFIG, "null buffer with nonzero capacity");
  if (cap < text.size() + 1) return fail(IPL_ERR_CONFIG, "buffer too small");
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return IPL_OK;
}

#define IPL_REQUIRE(ptr) \
  if (!(ptr)) return fail(IPL_ERR_CONFIG, #ptr " must not be null")

}  // namespace

extern "C" {

const char *ipl_last_error(void) { return g_last_error.c_str(); }

const char *ipl_version(void) { return "1.0.0"; }

ipl_status ipl_set_log_level(const char *level) {
  return guarded([&] {
    std::string value;
    if (level) {
      value = level;
    } else if (const char *env = std::getenv("IPL_LOG")) {
      value = env;
    }
    ipl::set_log_level(value);
  });
}

ipl_status ipl_config_create(ipl_config **out) {
  IPL_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new ipl_config(); });
}

void ipl_config_destroy(ipl_config *cfg) { delete cfg; }

ipl_status ipl_config_load_file(ipl_config *cfg, const char *path) {
  IPL_REQUIRE(cfg);
  IPL_REQUIRE(path);
  return guarded([&] { ipl::apply_config_file(cfg->cfg, path); });
}

ipl_status ipl_config_set(ipl_config *cfg, const char *key, const char *value) {
  IPL_REQUIRE(cfg);
  IPL_REQUIRE(key);
  IPL_REQUIRE(value);
  return guarded([&] { cfg->cfg.set(key, value); });
}

ipl_status ipl_config_assign(ipl_config *cfg, const char *assignment) {
  IPL_REQUIRE(cfg);
  IPL_REQUIRE(assignment);
  return guarded([&] {
    const auto [key, value] = ipl::split_assignment(assignment);
    cfg->cfg.set(key, value);
  });
}

ipl_status ipl_config_get(const ipl_config *cfg, const char *key, char *buf, size_t cap, size_t *needed) {
  IPL_REQUIRE(cfg);
  IPL_REQUIRE(key);
  std::string value;
  const ipl_status st = guarded([&] { value = cfg->cfg.get(key); });
  if (st != IPL_OK) return st;
  return copy_out(value, buf, cap, needed);
}

ipl_status ipl_config_dump(const ipl_config *cfg, char *buf, size_t cap, size_t *needed) {
  IPL_REQUIRE(cfg);
  g_last_error.clear();
  return copy_out(ipl::config_to_text(cfg->cfg), buf, cap, needed);
}

ipl_status ipl_config_validate(const ipl_config *cfg) {
  IPL_REQUIRE(cfg);
  return guarded([&] { cfg->cfg.validate(); });
}

ipl_status ipl_run(const ipl_config *cfg, ipl_report **out) {
  IPL_REQUIRE(cfg);
  if (out) *out = nullptr;
  return guarded([&] {
    const ipl::RunResult result = ipl::cmd_run(cfg->cfg);
    if (out) {
      auto *r = new ipl_report();
      r->summary = ipl::parse_report_json(ipl::report_to_json(result));
      *out = r;
    }
  });
}

ipl_status ipl_ablate(const ipl_config *cfg) {
  IPL_REQUIRE(cfg);
  return guarded([&] { ipl::cmd_ablate(cfg->cfg); });
}

ipl_status ipl_generate_data(const ipl_config *cfg, const char *path) {
  IPL_REQUIRE(cfg);
  IPL_REQUIRE(path);
  return guarded([&] { ipl::cmd_generate_data(cfg->cfg, path); });
}

ipl_status ipl_report_load(const char *path, ipl_report **out) {
  IPL_REQUIRE(path);
  IPL_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto *r = new ipl_report();
    try {
      std::FILE *f = std::fopen(path, "rb");
      if (!f) throw ipl::IoError(std::string("cannot read report ") + path);
      std::string text;
      char chunk[4096];
      std::size_t n;
      while ((n = std::fread(chunk, 1, sizeof(chunk), f)) > 0) text.append(chunk, n);
      std::fclose(f);
      r->summary = ipl::parse_report_json(text);
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

void ipl_report_destroy(ipl_report *report) { delete report; }

size_t ipl_report_session_count(const ipl_report *report) { return report ? report->summary.accuracy.size() : 0; }

size_t ipl_report_trial_count(const ipl_report *report) { return report ? report->summary.trials : 0; }

ipl_status ipl_report_accuracy(const ipl_report *report, size_t session, double *mean, double *stddev) {
  IPL_REQUIRE(report);
  g_last_error.clear();
  if (session == 0 || session > report->summary.accuracy.size()) {
    return fail(IPL_ERR_CONFIG, "session " + std::to_string(session) + " out of range");
  }
  if (mean) *mean = report->summary.accuracy[session - 1];
  if (stddev) *stddev = report->summary.stddev[session - 1];
  return IPL_OK;
}

double ipl_report_average(const ipl_report *report) { return report ? report->summary.average : 0.0; }

ipl_status ipl_report_table(const ipl_report *report, char *buf, size_t cap, size_t *needed) {
  IPL_REQUIRE(report);
  g_last_error.clear();
  return copy_out(ipl::format_report_table(report->summary), buf, cap, needed);
}

ipl_status ipl_report_write_plot(const ipl_report *report, const char *path) {
  IPL_REQUIRE(report);
  IPL_REQUIRE(path);
  return guarded([&] { ipl::write_files_atomically({{path, ipl::format_plot_data(report->summary)}}); });
}

}  // extern "C"
