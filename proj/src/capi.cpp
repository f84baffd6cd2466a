#include "parboost.h"

#include <cstring>
#include <string>

#include "parboost/config.hpp"
#include "parboost/adversary.hpp"
#include "parboost/harness.hpp"

namespace {

thread_local std::string g_last_error;

pb_status status_of(const parboost::Error& e) {
  using parboost::ErrorKind;
  switch (e.kind()) {
    case ErrorKind::InvalidArgument: return PB_ERR_INVALID_ARGUMENT;
    case ErrorKind::Parse: return PB_ERR_PARSE;
    case ErrorKind::Io: return PB_ERR_IO;
    case ErrorKind::Construction: return PB_ERR_CONSTRUCTION;
    case ErrorKind::Protocol: return PB_ERR_PROTOCOL;
    case ErrorKind::Assertion: return PB_ERR_ASSERTION;
    case ErrorKind::Internal: return PB_ERR_INTERNAL;
  }
  return PB_ERR_INTERNAL;
}

template <typename Fn>
pb_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return PB_OK;
  } catch (const parboost::Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return PB_ERR_INTERNAL;
  }
}

} // namespace

struct pb_config {
  parboost::KvConfig kv;
};

struct pb_result {
  parboost::harness::RunRecord record;
};

extern "C" {

const char* pb_version_string(void) { return parboost::harness::kCodeVersion; }

const char* pb_status_name(pb_status status) {
  switch (status) {
    case PB_OK: return "ok";
    case PB_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case PB_ERR_PARSE: return "parse";
    case PB_ERR_IO: return "io";
    case PB_ERR_CONSTRUCTION: return "construction";
    case PB_ERR_PROTOCOL: return "protocol";
    case PB_ERR_ASSERTION: return "assertion";
    case PB_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* pb_last_error_message(void) { return g_last_error.c_str(); }

pb_status pb_config_create(pb_config** out) {
  if (!out) {
    g_last_error = "out must not be null";
    return PB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { *out = new pb_config(); });
}

pb_status pb_config_load(const char* path, pb_config** out) {
  if (!path || !out) {
    g_last_error = "path and out must not be null";
    return PB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    auto config = std::make_unique<pb_config>();
    config->kv = parboost::KvConfig::parse_file(path);
    *out = config.release();
  });
}

pb_status pb_config_set(pb_config* config, const char* key, const char* value) {
  if (!config || !key || !value) {
    g_last_error = "config, key, and value must not be null";
    return PB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { config->kv.set(key, value); });
}

pb_status pb_config_get(const pb_config* config, const char* key, char* buffer,
                        size_t buffer_len) {
  if (!config || !key || !buffer || buffer_len == 0) {
    g_last_error = "config, key, and a non-empty buffer are required";
    return PB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const std::string value = config->kv.get_string(key);
    parboost::require(value.size() + 1 <= buffer_len,
                      parboost::ErrorKind::InvalidArgument,
                      "buffer too small for config value");
    std::memcpy(buffer, value.c_str(), value.size() + 1);
  });
}

void pb_config_free(pb_config* config) { delete config; }

pb_status pb_run(const pb_config* config, pb_result** out) {
  if (!config || !out) {
    g_last_error = "config and out must not be null";
    return PB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const parboost::ExperimentConfig experiment =
        parboost::ExperimentConfig::from_kv(config->kv);
    auto result = std::make_unique<pb_result>();
    result->record = parboost::harness::run_experiment(experiment);
    *out = result.release();
  });
}

pb_status pb_grid(const pb_config* config, pb_result** out) {
  if (!config || !out) {
    g_last_error = "config and out must not be null";
    return PB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const parboost::ExperimentConfig experiment =
        parboost::ExperimentConfig::from_kv(config->kv);
    auto result = std::make_unique<pb_result>();
    result->record = parboost::harness::tradeoff_grid(experiment);
    *out = result.release();
  });
}

pb_status pb_verify(uint64_t seed, pb_result** out) {
  if (!out) {
    g_last_error = "out must not be null";
    return PB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    auto result = std::make_unique<pb_result>();
    result->record = parboost::harness::run_verify_suite(seed);
    *out = result.release();
  });
}

pb_status pb_coin_oracle(uint64_t n, double beta, double* out_error) {
  if (!out_error) {
    g_last_error = "out_error must not be null";
    return PB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    *out_error = parboost::adv::coin_oracle(static_cast<std::size_t>(n), beta);
  });
}

int pb_result_passed(const pb_result* result) {
  return result && result->record.passed ? 1 : 0;
}

const char* pb_result_json(const pb_result* result) {
  return result ? result->record.json.c_str() : "";
}

const char* pb_result_csv_path(const pb_result* result) {
  if (!result) return "";
  if (!result->record.metrics_csv_path.empty())
    return result->record.metrics_csv_path.c_str();
  return result->record.grid_csv_path.c_str();
}

void pb_result_free(pb_result* result) { delete result; }

} // extern "C"
