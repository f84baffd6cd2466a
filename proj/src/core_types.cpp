#include "parboost/core_types.hpp"

#include <algorithm>
#include <cmath>

namespace parboost {

WeightDistribution::WeightDistribution(std::vector<double> weights)
    : weights_(std::move(weights)) {
  for (double w : weights_) {
    require(std::isfinite(w) && w >= 0.0, ErrorKind::InvalidArgument,
            "distribution weights must be finite and nonnegative");
  }
}

WeightDistribution WeightDistribution::uniform(std::size_t m) {
  require(m > 0, ErrorKind::InvalidArgument, "uniform distribution needs m > 0");
  return WeightDistribution(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

double WeightDistribution::sum() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

void WeightDistribution::normalize() {
  const double s = sum();
  require(s > 0.0, ErrorKind::InvalidArgument, "cannot normalize a zero vector");
  for (double& w : weights_) w /= s;
}

std::vector<std::size_t> WeightDistribution::support() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < weights_.size(); ++i)
    if (weights_[i] > 0.0) idx.push_back(i);
  return idx;
}

bool WeightDistribution::same_support(const WeightDistribution& other) const {
  if (weights_.size() != other.weights_.size()) return false;
  for (std::size_t i = 0; i < weights_.size(); ++i)
    if ((weights_[i] > 0.0) != (other.weights_[i] > 0.0)) return false;
  return true;
}

void LabeledSample::validate() const {
  require(!labels.empty(), ErrorKind::InvalidArgument, "sample must be non-empty");
  require(points.empty() || points.size() == labels.size(),
          ErrorKind::InvalidArgument, "points/labels length mismatch");
  for (std::int8_t y : labels)
    require(y == 1 || y == -1, ErrorKind::InvalidArgument,
            "labels must be -1 or +1");
}

int evaluate(const Hypothesis& h, const LabeledSample& sample, std::size_t i) {
  require(i < sample.size(), ErrorKind::InvalidArgument, "point index out of range");
  int value;
  if (const Stump* s = std::get_if<Stump>(&h.body)) {
    require(!sample.extensional(), ErrorKind::InvalidArgument,
            "stump evaluated on an extensional sample");
    value = s->predict(sample.points[i]);
  } else {
    const PredictionTable& table = std::get<PredictionTable>(h.body);
    require(table && i < table->size(), ErrorKind::InvalidArgument,
            "table lookup out of range");
    value = (*table)[i];
  }
  return h.negated ? -value : value;
}

double learning_rate(double gamma) {
  require(gamma > 0.0 && gamma < 0.5, ErrorKind::InvalidArgument,
          "gamma must lie in (0, 1/2)");
  return 0.5 * std::log((0.5 + gamma / 2.0) / (0.5 - gamma / 2.0));
}

double weighted_loss(const Hypothesis& h, const WeightDistribution& d,
                     const LabeledSample& sample) {
  require(d.size() == sample.size(), ErrorKind::InvalidArgument,
          "distribution/sample length mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (d[i] > 0.0 && evaluate(h, sample, i) != sample.labels[i]) loss += d[i];
  }
  return loss;
}

double weighted_correlation(const Hypothesis& h, const WeightDistribution& d,
                            const LabeledSample& sample) {
  require(d.size() == sample.size(), ErrorKind::InvalidArgument,
          "distribution/sample length mismatch");
  double corr = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (d[i] > 0.0)
      corr += d[i] * static_cast<double>(sample.labels[i]) *
              static_cast<double>(evaluate(h, sample, i));
  }
  return corr;
}

void LinearClassifier::add_term(double alpha, Hypothesis h) {
  require(alpha >= 0.0 && std::isfinite(alpha), ErrorKind::InvalidArgument,
          "term weight must be finite and nonnegative");
  normalizer_ += alpha;
  terms_.push_back(Term{alpha, std::move(h)});
}

double LinearClassifier::raw_score(const LabeledSample& sample, std::size_t i) const {
  // Kahan compensation: scores feed exact-identity checks over thousands of
  // terms, where plain summation drift is visible at the tested tolerance.
  double s = 0.0, comp = 0.0;
  for (const Term& term : terms_) {
    if (term.alpha == 0.0) continue;
    const double y = term.alpha * evaluate(term.hypothesis, sample, i) - comp;
    const double t = s + y;
    comp = (t - s) - y;
    s = t;
  }
  return s;
}

double LinearClassifier::score(const LabeledSample& sample, std::size_t i) const {
  require(!degenerate(), ErrorKind::InvalidArgument,
          "degenerate classifier: all term weights are zero");
  return raw_score(sample, i) / normalizer_;
}

std::vector<double> margins(const LinearClassifier& g, const LabeledSample& sample) {
  require(!g.degenerate(), ErrorKind::InvalidArgument,
          "degenerate classifier: all term weights are zero");
  std::vector<double> out(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i)
    out[i] = static_cast<double>(sample.labels[i]) * g.score(sample, i);
  return out;
}

double min_margin(const LinearClassifier& g, const LabeledSample& sample) {
  const std::vector<double> m = margins(g, sample);
  return *std::min_element(m.begin(), m.end());
}

WeightDistribution BoostTrace::distribution_at(const LabeledSample& sample,
                                               std::size_t ell) const {
  require(ell >= 1 && ell <= steps.size() + 1, ErrorKind::InvalidArgument,
          "distribution index out of range");
  if (has_snapshots()) return distributions[ell - 1];
  // Seed-replay path: reapply the recorded steps from the uniform start.
  WeightDistribution d = WeightDistribution::uniform(sample.size());
  for (std::size_t j = 0; j + 1 < ell; ++j) {
    const StepRecord& step = steps[j];
    if (step.alpha == 0.0) continue;
    std::vector<double>& w = d.mutable_weights();
    double z = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] *= std::exp(-step.alpha * sample.labels[i] *
                       evaluate(step.hypothesis, sample, i));
      z += w[i];
    }
    for (double& wi : w) wi /= z;
  }
  return d;
}

void BoostTrace::validate() const {
  require(steps.size() == static_cast<std::size_t>(p) * rounds_per_batch,
          ErrorKind::Assertion, "trace step count must equal p*R");
  for (const StepRecord& step : steps) {
    require(step.alpha == 0.0 || step.alpha == alpha, ErrorKind::Assertion,
            "step alpha must be 0 or the fixed learning rate");
    if (step.alpha == 0.0)
      require(step.z == 1.0, ErrorKind::Assertion, "skipped steps must record Z = 1");
  }
  if (has_snapshots())
    require(distributions.size() == steps.size() + 1, ErrorKind::Assertion,
            "snapshot count must be pR + 1");
}

} // namespace parboost
