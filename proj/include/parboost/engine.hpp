#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "parboost/approximation.hpp"
#include "parboost/core_types.hpp"
#include "parboost/weak_learners.hpp"

namespace parboost {

struct EngineConfig {
  double gamma = 0.1;
  int p = 1; // sequential rounds
  int R = 1; // boosting steps per round
  int t = 1; // weak-learner calls per round; must be divisible by R
  std::size_t n = 0; // subsample size; 0 derives c_n * d / gamma^2
  double c_n = 1.0;
  std::uint64_t seed = 0;
  int parallelism = 1;
  bool select_first = false;      // take the first advantaged pool member
                                  // instead of the best (fidelity variant)
  bool full_sample_debug = false; // classical sequential mode: R == 1, the
                                  // learner sees the whole sample weighted
                                  // by the live distribution
  bool store_snapshots = true;
  SamplerKind sampler = SamplerKind::Cdf;

  void validate() const;
};

/// Hypotheses produced by one sub-round's fan-out: the trained batch followed
/// by its negations, in provenance order.
struct RoundPool {
  std::vector<Hypothesis> members; // size 2 * (t / R)
  std::vector<Provenance> provenance;
  std::vector<double> train_advantages; // as reported by the learner, per trained member
};

struct Selection {
  Hypothesis hypothesis;
  Provenance provenance;
  double advantage = 0.0;
};

/// Scans the pool against d and returns the member of maximal advantage when
/// that advantage reaches gamma/2 (boundary inclusive), earliest-provenance
/// tie-break. `best_advantage_out` always receives the pool maximum.
std::optional<Selection> select_advantaged(const RoundPool& pool,
                                           const WeightDistribution& d,
                                           const LabeledSample& sample,
                                           double gamma, bool select_first,
                                           double* best_advantage_out = nullptr);

/// One exponential-reweighting step:
///   d'(i) = d(i) exp(-alpha * label_i * h(x_i)) / Z.
/// alpha == 0 returns (d, 1) exactly.
std::pair<WeightDistribution, double> boost_step(const WeightDistribution& d,
                                                 const Hypothesis& h, double alpha,
                                                 const LabeledSample& sample);

struct RunResult {
  LinearClassifier classifier;
  BoostTrace trace;
};

/// Runs the full parallel boosting schedule: p rounds, each drawing t
/// subsamples from the round-start distribution across R sub-round pools,
/// then R sequential update steps. Identical (config, sample, seed) produce
/// bit-identical traces at any parallelism level.
RunResult run(const EngineConfig& config, const LabeledSample& sample,
              const WeakLearner& learner);

struct MarginReport {
  bool degenerate = false;
  double min_margin = 0.0;
  std::size_t count_below_threshold = 0; // margins below gamma/8
  double counting_bound = 0.0;           // m * exp(-p*R*gamma^2/4)
  bool all_rounds_progressed = false;    // every round's Z product < exp(-gamma^2 R/2)
  bool exp_loss_identity_ok = false;
  double exp_loss_rel_err = 0.0;
  bool counting_bound_ok = true; // count < bound whenever all rounds progressed
};

/// Post-run certification: min margin, the exponential-loss identity
/// sum_i exp(-label_i * raw_score_i) = m * prod Z (checked in log space), and
/// the margin counting bound conditioned on every round's Z-product event.
MarginReport certify_margins(const LinearClassifier& g, const LabeledSample& sample,
                             const BoostTrace& trace);

/// log(sum_i exp(-label_i raw_score_i)) - (log m + sum_j log Z_j); the
/// relative error of the exponential-loss identity to first order.
double exp_loss_identity_gap(const LinearClassifier& g, const LabeledSample& sample,
                             const BoostTrace& trace);

/// ln prod_{r} Z_{kR+r} for round k of the trace.
double round_log_z_product(const BoostTrace& trace, int round);

} // namespace parboost
