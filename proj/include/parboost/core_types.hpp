#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "parboost/errors.hpp"

namespace parboost {

/// Probability vector over training indices. Weights are kept in linear
/// space; update steps renormalize by the partition constant so the vector
/// sums to one after every step. The support (set of strictly positive
/// entries) is fixed for the lifetime of a boosting run.
class WeightDistribution {
public:
  WeightDistribution() = default;
  explicit WeightDistribution(std::vector<double> weights);

  static WeightDistribution uniform(std::size_t m);

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }

  double sum() const;
  void normalize(); // divide by sum; error if sum == 0

  std::vector<std::size_t> support() const;
  bool same_support(const WeightDistribution& other) const;

  // Direct mutable access for update loops; callers are responsible for
  // restoring normalization.
  std::vector<double>& mutable_weights() { return weights_; }

private:
  std::vector<double> weights_;
};

/// Threshold rule over one feature. Predicts polarity where the feature
/// exceeds the threshold and -polarity otherwise; ties at the threshold
/// go to -polarity. This convention is frozen for reproducibility.
struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = 1; // +1 or -1

  int predict(const std::vector<double>& x) const {
    require(feature < x.size(), ErrorKind::InvalidArgument,
            "stump feature index out of range");
    return x[feature] > threshold ? polarity : -polarity;
  }
};

/// Extensional predictor: one stored prediction per domain index. Rows are
/// shared so that a negated copy does not duplicate the table.
using PredictionTable = std::shared_ptr<const std::vector<std::int8_t>>;

/// A {-1,+1}-valued predictor, either a stump over feature vectors or a
/// prediction table over abstract indices, plus a negation flag.
struct Hypothesis {
  std::variant<Stump, PredictionTable> body;
  bool negated = false;

  static Hypothesis stump(std::size_t feature, double threshold, int polarity) {
    return Hypothesis{Stump{feature, threshold, polarity}, false};
  }
  static Hypothesis table(std::vector<std::int8_t> predictions) {
    return Hypothesis{
        std::make_shared<const std::vector<std::int8_t>>(std::move(predictions)),
        false};
  }

  Hypothesis negation() const {
    Hypothesis h = *this;
    h.negated = !h.negated;
    return h;
  }

  bool is_stump() const { return std::holds_alternative<Stump>(body); }
};

/// Training set: m feature vectors (possibly empty when the domain is
/// abstract indices) with labels in {-1,+1}.
struct LabeledSample {
  std::vector<std::vector<double>> points;
  std::vector<std::int8_t> labels;

  std::size_t size() const { return labels.size(); }
  bool extensional() const { return points.empty(); }

  void validate() const;
};

/// Evaluates a hypothesis on sample point i. Returns exactly -1 or +1 and
/// respects the negation flag.
int evaluate(const Hypothesis& h, const LabeledSample& sample, std::size_t i);

/// Fixed learning rate for margin target gamma:
///   alpha = (1/2) ln((1/2 + gamma/2) / (1/2 - gamma/2)).
/// Always satisfies 0 < alpha < 2*gamma on gamma in (0, 1/2).
double learning_rate(double gamma);

/// Weighted 0-1 loss of h against the sample labels under distribution d.
/// Advantage of h is 1/2 minus this value.
double weighted_loss(const Hypothesis& h, const WeightDistribution& d,
                     const LabeledSample& sample);

/// Weighted correlation sum_i d(i) * label_i * h(x_i), in [-1, 1].
/// loss = (1 - correlation) / 2.
double weighted_correlation(const Hypothesis& h, const WeightDistribution& d,
                            const LabeledSample& sample);

/// Normalized vote over hypotheses: g(x) = sum_j alpha_j h_j(x) / sum_j alpha_j.
/// The voting classifier is sign(g); label * g(x) is the margin.
class LinearClassifier {
public:
  struct Term {
    double alpha;
    Hypothesis hypothesis;
  };

  void add_term(double alpha, Hypothesis h);

  const std::vector<Term>& terms() const { return terms_; }
  double normalizer() const { return normalizer_; }
  bool degenerate() const { return normalizer_ <= 0.0; }

  /// Unnormalized score sum_j alpha_j h_j(x_i).
  double raw_score(const LabeledSample& sample, std::size_t i) const;
  /// g(x_i) in [-1, 1]; error when the classifier is degenerate.
  double score(const LabeledSample& sample, std::size_t i) const;

private:
  std::vector<Term> terms_;
  double normalizer_ = 0.0;
};

/// Per-point margins label_i * g(x_i); error when all alphas are zero.
std::vector<double> margins(const LinearClassifier& g, const LabeledSample& sample);

double min_margin(const LinearClassifier& g, const LabeledSample& sample);

/// Identifies a pool member by where it was produced.
struct Provenance {
  int round = 0;     // k, 0-based
  int sub_round = 0; // r, 1-based
  int member = 0;    // j, 0-based position within the trained batch
  bool negated = false;
};

/// One sequential boosting step as recorded in a trace.
struct StepRecord {
  double alpha = 0.0;
  double z = 1.0;
  Hypothesis hypothesis; // inert when alpha == 0
  Provenance chosen;
  bool accepted = false;
  double pool_best_advantage = 0.0;
};

/// Full per-run record: every step, every distribution snapshot (when
/// enabled), and the parameters needed to regenerate them.
struct BoostTrace {
  double gamma = 0.0;
  double alpha = 0.0; // learning_rate(gamma)
  int p = 0;
  int rounds_per_batch = 0; // R
  int t = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  std::vector<StepRecord> steps;                 // length p*R
  std::vector<WeightDistribution> distributions; // D_1..D_{pR+1} when stored
  std::size_t weak_learner_calls = 0;
  bool degenerate = false;

  bool has_snapshots() const { return !distributions.empty(); }

  /// D_{ell} (1-based, ell in [1, pR+1]); replays the update sequence from
  /// the recorded steps when snapshots were not stored.
  WeightDistribution distribution_at(const LabeledSample& sample, std::size_t ell) const;

  void validate() const;
};

} // namespace parboost
