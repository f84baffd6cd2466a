#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "parboost/adversary.hpp"
#include "parboost/engine.hpp"

namespace parboost {

/// Flat key = value store with INI-style [section] headers; keys are
/// addressed as "section.key". Later assignments win, so CLI overrides are
/// plain re-sets. Lines starting with '#' or ';' are comments.
class KvConfig {
public:
  static KvConfig parse_file(const std::string& path);
  static KvConfig parse_text(const std::string& text, const std::string& origin = "<text>");

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool_or(const std::string& key, bool fallback) const;
  std::vector<std::int64_t> get_int_list_or(const std::string& key,
                                            const std::vector<std::int64_t>& fallback) const;

  /// Canonical text form: sections sorted, keys sorted within sections.
  std::string canonical_text() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

private:
  std::map<std::string, std::string> entries_;
};

enum class RunMode { Boost, AdaboostBaseline, Adversary, Oracle, Verify };

const char* run_mode_name(RunMode mode);
RunMode parse_run_mode(const std::string& name);

struct DatasetSpec {
  std::string source; // "csv" | "planted" | "stumps1d"
  std::string path;   // csv
  std::size_t m = 0;  // synthetic
  std::size_t class_size = 0;
  std::size_t voters = 0;
  double gamma_star = 0.0;
  std::size_t features = 1; // stumps1d
};

struct ExperimentConfig {
  RunMode mode = RunMode::Boost;
  std::uint64_t seed = 0;
  bool seed_set = false; // seeds are mandatory; no wall-clock default
  std::string out_dir = ".";
  std::string run_name = "run";
  int parallelism = 1;

  DatasetSpec dataset;
  EngineConfig engine;
  std::string weak_learner = "erm"; // "erm" | "stump"

  adv::MeasureParams adversary;
  std::string adversary_learner = "majority";

  // oracle mode
  std::size_t oracle_n = 1;
  double oracle_beta = 0.0;

  // grid mode
  std::vector<std::int64_t> grid_R;
  std::vector<std::int64_t> grid_p;     // adversary grid
  std::int64_t grid_pool_cap = 16;      // per-sub-round pool budget cap
  double grid_delta = 0.1;
  std::size_t grid_seeds = 1;
  std::string grid_kind = "upper"; // "upper" | "adversary"

  KvConfig raw; // effective key/value view, echoed into records

  static ExperimentConfig from_kv(const KvConfig& kv);
  void validate() const;
};

} // namespace parboost
