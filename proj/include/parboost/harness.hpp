#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parboost/config.hpp"
#include "parboost/core_types.hpp"

namespace parboost {
namespace harness {

inline constexpr int kRecordSchemaVersion = 1;
inline constexpr int kMetricsSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "0.1.0";

/// Loads a CSV dataset: header row, feature columns, and a "label" column
/// holding -1/+1 (or 0/1, auto-mapped with a warning). Parse errors cite the
/// offending line number.
LabeledSample load_csv(const std::string& path);

/// SHA-1 over a git-style "blob <len>\0<content>" framing, hex encoded.
std::string content_hash(const std::string& bytes);

struct RunRecord {
  bool passed = false;
  std::string mode;
  std::string input_hash;
  std::string json; // one JSON-lines record, newline not included
  std::string metrics_csv_path;
  std::string grid_csv_path;
};

/// Executes the configured mode. Writes the metrics CSV (boost modes), the
/// grid CSV (grid runs), and appends the JSON record to <out>/records.jsonl.
/// `passed` reflects every hard assertion of the mode.
RunRecord run_experiment(const ExperimentConfig& config);

/// Grid entry point (ExperimentConfig carries the grid block).
RunRecord tradeoff_grid(const ExperimentConfig& config);

/// Identity suite on seeded micro-instances: exponential-loss identity,
/// per-step Z bound, telescoping residual, duality slack, trichotomy checks,
/// and coin-oracle spot values.
RunRecord run_verify_suite(std::uint64_t seed);

struct Dataset {
  LabeledSample sample;
  // Set for planted instances; the ERM learner trains over this class.
  std::shared_ptr<const std::vector<Hypothesis>> hclass;
  double planted_margin = 0.0;
  std::string description;
};

/// Builds the dataset named by the spec: "csv", "planted", or "stumps1d".
Dataset materialize_dataset(const DatasetSpec& spec, std::uint64_t seed);

/// Pool budget for one sub-round: the uniform-convergence-driven bound
/// ceil(exp(16 c_n d R)) * ceil(ln(R/delta)) clamped to `cap` (the bound is
/// astronomically conservative at desk scale; the clamp is recorded).
std::int64_t pool_size_bound(int R, int d, double c_n, double delta,
                             std::int64_t cap);

} // namespace harness
} // namespace parboost
