#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "parboost/errors.hpp"
#include "parboost/rng.hpp"

namespace parboost {
namespace adv {

/// Sign vector over [2m] packed one bit per entry (bit set = +1).
class PackedRow {
public:
  PackedRow() = default;
  explicit PackedRow(std::size_t n_bits);

  std::size_t size() const { return n_bits_; }
  int sign(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1 ? 1 : -1;
  }
  void set_sign(std::size_t i, int s) {
    const std::uint64_t mask = 1ULL << (i & 63);
    if (s > 0)
      words_[i >> 6] |= mask;
    else
      words_[i >> 6] &= ~mask;
  }

  /// Number of positions where the two rows agree.
  std::size_t agreement_count(const PackedRow& other) const;

  const std::vector<std::uint64_t>& words() const { return words_; }

private:
  std::size_t n_bits_ = 0;
  std::vector<std::uint64_t> words_;
};

struct AdversaryConstants {
  double c_s = 1.0; // uniform-block size scale
  double c_b = 1.0; // bias scale: biased entries agree with the concept
                    // with probability 1/2 + c_b * gamma
  double c_l = 1.0; // loss-floor scale (display/calibration only)
};

struct HardInstanceParams {
  std::size_t m = 0; // domain is [2m]
  int d = 1;
  int p = 1;
  int R = 1;
  double gamma = 0.1; // must satisfy gamma < 1/(4*c_b)
  AdversaryConstants constants;

  std::size_t domain() const { return 2 * m; }
  std::size_t uniform_rows_per_block() const; // R * ceil(exp(c_s * d))
  std::size_t rows_per_block() const { return uniform_rows_per_block() + R; }
  std::size_t total_rows() const { return static_cast<std::size_t>(p) * rows_per_block(); }
  void validate() const;
};

/// The lower-bound instance: a uniform random concept over [2m] and a
/// hypothesis matrix of p blocks, each holding R*ceil(exp(c_s*d)) uniform
/// rows followed by R concept-biased rows. Generation rejects the rare
/// (4 sigma) draws whose aggregate biased-row agreement is off.
class HardInstance {
public:
  HardInstance(HardInstanceParams params, PackedRow concept_row,
               std::vector<PackedRow> rows);

  const HardInstanceParams& params() const { return params_; }
  std::size_t domain() const { return params_.domain(); }
  int concept_sign(std::size_t i) const { return concept_row_.sign(i); }
  const PackedRow& concept_row() const { return concept_row_; }

  std::size_t row_count() const { return rows_.size(); }
  const PackedRow& row(std::size_t r) const { return rows_[r]; }
  bool row_is_biased(std::size_t r) const;

  /// Indices of the biased rows, in matrix order (p*R of them).
  std::vector<std::size_t> biased_row_ids() const;

private:
  HardInstanceParams params_;
  PackedRow concept_row_;
  std::vector<PackedRow> rows_;
};

HardInstance generate_instance(const HardInstanceParams& params, std::uint64_t seed);

/// A weak-learner query: indices into [2m], their true labels, and a
/// distribution supported on those indices.
struct Query {
  std::vector<std::uint32_t> indices;
  std::vector<std::int8_t> labels;
  std::vector<double> weights; // aligned with indices; nonnegative, sums to 1
};

/// Weighted loss of a matrix row against the query's labels.
double query_loss(const PackedRow& row, const Query& query);

struct ScanResult {
  std::size_t row_id = 0;
  bool qualified = false; // loss <= 1/2 - gamma (boundary inclusive)
  double loss = 0.0;
};

/// The scanning weak learner: returns the first row whose loss under the
/// query distribution is at most 1/2 - gamma; falls back to row 0 when none
/// qualifies. `rows` may or may not have the concept appended as a last row.
ScanResult scan_weak_learner(const std::vector<const PackedRow*>& rows,
                             const Query& query, double gamma);

/// What a protocol-respecting learner is allowed to see: the training draws,
/// their distinct sorted indices, and the labels on those indices only.
struct SampleView {
  std::vector<std::uint32_t> draws;          // m draws with multiplicity
  std::vector<std::uint32_t> distinct;       // sorted unique draw values
  std::vector<std::int8_t> distinct_labels;  // concept on `distinct`
  std::size_t domain = 0;

  bool in_sample(std::uint32_t i) const;
  int label_of(std::uint32_t i) const; // error when i is not in the sample
};

using Response = const PackedRow*;

/// Round-sequential query protocol: queries of round i may depend only on
/// the sample view and responses to earlier rounds.
class ProtocolClient {
public:
  virtual ~ProtocolClient() = default;
  virtual std::vector<Query> make_queries(
      int round, const SampleView& view,
      const std::vector<std::vector<Response>>& history) = 0;
  virtual PackedRow final_hypothesis(
      const SampleView& view,
      const std::vector<std::vector<Response>>& history) = 0;
};

struct ExtensionResult {
  PackedRow hypothesis;
  bool halted_early = false;
  int rounds_used = 0;
  std::size_t queries_made = 0;
};

struct ExtensionOptions {
  int p = 1;
  int t = 1;
  double gamma = 0.1;
  bool append_concept_row = false; // answer from H union {concept}
};

/// Drives the client for up to p rounds of at most t queries each. If any
/// response's loss under its own query distribution exceeds 1/2 - gamma the
/// run halts and returns the all-(+1) hypothesis. Exceeding the query or
/// round budget is a protocol violation.
ExtensionResult run_extension(ProtocolClient& client, const HardInstance& instance,
                              const SampleView& view, const ExtensionOptions& options);

/// Maximum-likelihood decoder: the known label inside the sample, and the
/// majority sign of the biased-row column outside it; sign(0) = +1.
PackedRow majority_decoder(const HardInstance& instance, const SampleView& view);

/// Exact error probability of an n-flip majority vote on a coin biased by
/// beta toward a uniformly random sign, counting half of the even-n ties.
double coin_oracle(std::size_t n, double beta);

/// Fact-level analytic floor exp(-c_l * beta^2 * n) / c_l.
double coin_floor(std::size_t n, double beta, double c_l);

enum class LearnerKind {
  MajorityOracle, // bypasses the protocol; reads (S, c(S), H) directly
  CheatConcept,   // bypasses the protocol; returns the concept (calibration)
  AllOnes,
  RandomGuess,
  NaiveBoost,
};

const char* learner_kind_name(LearnerKind k);

struct LossEstimate {
  double mean = 0.0;
  double ci_half_width = 0.0; // 95%
  std::size_t trials = 0;
  double early_halt_rate = 0.0;
  double analytic_floor = 0.0;        // Theorem-style floor at the configured constants
  double majority_exact_error = 0.0;  // (1 - 1/(2m))^m * coin_oracle(pR, c_b*gamma)
};

struct MeasureParams {
  HardInstanceParams instance;
  int t = 1;
  std::size_t trials = 1;
};

/// Monte-Carlo expected loss of one learner over fresh (S, concept, H) per
/// trial, under the uniform distribution on [2m].
LossEstimate measure_expected_loss(LearnerKind kind, const MeasureParams& params,
                                   std::uint64_t seed);

/// Per-trial losses for several learners sharing each trial's instance, for
/// paired comparisons. Returns estimates in the order of `kinds`.
std::vector<LossEstimate> measure_expected_loss_paired(
    const std::vector<LearnerKind>& kinds, const MeasureParams& params,
    std::uint64_t seed);

} // namespace adv
} // namespace parboost
