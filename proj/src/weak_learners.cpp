#include "parboost/weak_learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "parboost/rng.hpp"

namespace parboost {

namespace {

struct Entry {
  std::size_t index;
  double weight;
};

// Aggregates a multiset of indices into (index, normalized weight) pairs,
// sorted by index so results cannot depend on input ordering.
std::vector<Entry> aggregate_multiset(const LabeledSample& sample,
                                      std::span<const std::size_t> multiset) {
  require(!multiset.empty(), ErrorKind::InvalidArgument,
          "training multiset must be non-empty");
  std::map<std::size_t, double> counts;
  for (std::size_t idx : multiset) {
    require(idx < sample.size(), ErrorKind::InvalidArgument,
            "multiset index out of sample range");
    counts[idx] += 1.0;
  }
  std::vector<Entry> entries;
  entries.reserve(counts.size());
  const double n = static_cast<double>(multiset.size());
  for (const auto& [idx, count] : counts) entries.push_back({idx, count / n});
  return entries;
}

std::vector<Entry> distribution_entries(const LabeledSample& sample,
                                        const WeightDistribution& d) {
  require(d.size() == sample.size(), ErrorKind::InvalidArgument,
          "distribution/sample length mismatch");
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] > 0.0) entries.push_back({i, d[i]});
  require(!entries.empty(), ErrorKind::InvalidArgument,
          "distribution has empty support");
  return entries;
}

TrainResult best_stump(const LabeledSample& sample, const std::vector<Entry>& entries) {
  require(!sample.extensional(), ErrorKind::InvalidArgument,
          "stump learner requires feature vectors");
  const std::size_t n_features = sample.points.front().size();
  require(n_features > 0, ErrorKind::InvalidArgument, "points have no features");

  double total = 0.0;
  for (const Entry& e : entries) total += e.weight;

  double best_err = std::numeric_limits<double>::infinity();
  Stump best{};

  struct ValueMass {
    double value;
    double pos; // weight with label +1
    double neg;
  };

  for (std::size_t f = 0; f < n_features; ++f) {
    std::map<double, std::pair<double, double>> by_value;
    double pos_total = 0.0;
    for (const Entry& e : entries) {
      const double v = sample.points[e.index][f];
      auto& [pos, neg] = by_value[v];
      if (sample.labels[e.index] > 0) {
        pos += e.weight;
        pos_total += e.weight;
      } else {
        neg += e.weight;
      }
    }
    std::vector<ValueMass> values;
    values.reserve(by_value.size());
    for (const auto& [v, mass] : by_value)
      values.push_back({v, mass.first, mass.second});

    // Candidate thresholds in ascending order: -inf, midpoints, +inf.
    // Sweep maintains the error of (predict +1 iff x > threshold).
    std::vector<double> thresholds;
    thresholds.push_back(-std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
      thresholds.push_back((values[i].value + values[i + 1].value) / 2.0);
    thresholds.push_back(std::numeric_limits<double>::infinity());

    double err_plus = total - pos_total; // threshold -inf: everything predicted +1
    std::size_t consumed = 0;
    for (double theta : thresholds) {
      while (consumed < values.size() && values[consumed].value <= theta) {
        err_plus += values[consumed].pos - values[consumed].neg;
        ++consumed;
      }
      // Candidates arrive in (feature, threshold, polarity) order, so a
      // strict comparison keeps the lexicographically first minimizer.
      for (int polarity : {-1, +1}) {
        const double err = polarity > 0 ? err_plus : total - err_plus;
        if (err < best_err) {
          best_err = err;
          best = Stump{f, theta, polarity};
        }
      }
    }
  }
  return TrainResult{Hypothesis{best, false}, 0.5 - best_err};
}

TrainResult best_in_class(const LabeledSample& sample, const std::vector<Entry>& entries,
                          const std::vector<Hypothesis>& hclass) {
  require(!hclass.empty(), ErrorKind::InvalidArgument, "hypothesis class is empty");
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t best_id = 0;
  for (std::size_t id = 0; id < hclass.size(); ++id) {
    double loss = 0.0;
    for (const Entry& e : entries)
      if (evaluate(hclass[id], sample, e.index) != sample.labels[e.index])
        loss += e.weight;
    if (loss < best_loss) { // ties keep the lowest id
      best_loss = loss;
      best_id = id;
    }
  }
  return TrainResult{hclass[best_id], 0.5 - best_loss};
}

} // namespace

TrainResult WeakLearner::train_weighted(const LabeledSample&,
                                        const WeightDistribution&) const {
  fail(ErrorKind::InvalidArgument,
       "this weak learner does not support weighted full-sample training");
}

TrainResult train_stump(const LabeledSample& sample,
                        std::span<const std::size_t> multiset) {
  return best_stump(sample, aggregate_multiset(sample, multiset));
}

TrainResult train_stump_weighted(const LabeledSample& sample,
                                 const WeightDistribution& d) {
  return best_stump(sample, distribution_entries(sample, d));
}

TrainResult train_erm(const LabeledSample& sample,
                      std::span<const std::size_t> multiset,
                      const std::vector<Hypothesis>& hclass) {
  return best_in_class(sample, aggregate_multiset(sample, multiset), hclass);
}

TrainResult train_erm_weighted(const LabeledSample& sample,
                               const WeightDistribution& d,
                               const std::vector<Hypothesis>& hclass) {
  return best_in_class(sample, distribution_entries(sample, d), hclass);
}

TrainResult StumpLearner::train(const LabeledSample& sample,
                                std::span<const std::size_t> multiset) const {
  return train_stump(sample, multiset);
}

TrainResult StumpLearner::train_weighted(const LabeledSample& sample,
                                         const WeightDistribution& d) const {
  return train_stump_weighted(sample, d);
}

int StumpLearner::reported_dimension(const LabeledSample& sample) const {
  require(!sample.extensional(), ErrorKind::InvalidArgument,
          "stump learner requires feature vectors");
  // Distinct-labelings bound: 2 * features * (m + 1) stumps behave
  // distinctly at most; report its log2.
  const double labelings = 2.0 * static_cast<double>(sample.points.front().size()) *
                           static_cast<double>(sample.size() + 1);
  return std::max(1, static_cast<int>(std::ceil(std::log2(labelings))));
}

FiniteClassErmLearner::FiniteClassErmLearner(
    std::shared_ptr<const std::vector<Hypothesis>> hclass)
    : hclass_(std::move(hclass)) {
  require(hclass_ && !hclass_->empty(), ErrorKind::InvalidArgument,
          "hypothesis class is empty");
}

TrainResult FiniteClassErmLearner::train(const LabeledSample& sample,
                                         std::span<const std::size_t> multiset) const {
  return train_erm(sample, multiset, *hclass_);
}

TrainResult FiniteClassErmLearner::train_weighted(const LabeledSample& sample,
                                                  const WeightDistribution& d) const {
  return train_erm_weighted(sample, d, *hclass_);
}

int FiniteClassErmLearner::reported_dimension(const LabeledSample&) const {
  return std::max(1, static_cast<int>(std::ceil(
                         std::log2(static_cast<double>(hclass_->size())))));
}

PlantedVoteInstance plant_vote_instance(std::size_t m, std::size_t class_size,
                                        std::size_t voters, double gamma_star,
                                        std::uint64_t seed) {
  require(m > 0, ErrorKind::InvalidArgument, "need m > 0");
  require(class_size > 0, ErrorKind::InvalidArgument, "need class_size > 0");
  require(voters >= 1 && voters <= class_size, ErrorKind::InvalidArgument,
          "need 1 <= voters <= class_size");
  require(gamma_star > 0.0 && gamma_star <= 1.0, ErrorKind::InvalidArgument,
          "gamma_star must lie in (0, 1]");

  RngStream stream = derive_stream(seed, 0xb0057ULL);

  std::vector<std::vector<std::int8_t>> tables(class_size,
                                               std::vector<std::int8_t>(m));
  for (auto& table : tables)
    for (auto& cell : table) cell = static_cast<std::int8_t>(stream.next_sign());

  std::vector<double> weights(voters);
  if (voters == 1) {
    weights[0] = 1.0;
  } else {
    double sum = 0.0;
    for (double& w : weights) {
      w = 0.05 + stream.next_double();
      sum += w;
    }
    for (double& w : weights) w /= sum;
  }

  constexpr int kRetryBudget = 100000;
  std::vector<std::int8_t> labels(m);
  double realized_margin = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    double vote = 0.0;
    int attempts = 0;
    for (;;) {
      vote = 0.0;
      for (std::size_t v = 0; v < voters; ++v)
        vote += weights[v] * tables[v][i];
      if (std::abs(vote) >= gamma_star) break;
      require(++attempts <= kRetryBudget, ErrorKind::Construction,
              "planted margin unreachable within the retry budget; "
              "gamma_star too large for this voter count");
      for (std::size_t v = 0; v < voters; ++v)
        tables[v][i] = static_cast<std::int8_t>(stream.next_sign());
    }
    labels[i] = vote > 0.0 ? 1 : -1;
    realized_margin = std::min(realized_margin, std::abs(vote));
  }

  auto hclass = std::make_shared<std::vector<Hypothesis>>();
  hclass->reserve(class_size);
  for (auto& table : tables) hclass->push_back(Hypothesis::table(std::move(table)));

  PlantedVoteInstance instance;
  instance.sample.labels = std::move(labels);
  instance.hclass = std::move(hclass);
  instance.voter_ids.resize(voters);
  for (std::size_t v = 0; v < voters; ++v) instance.voter_ids[v] = v;
  instance.vote_weights = std::move(weights);
  instance.planted_margin = realized_margin;
  return instance;
}

} // namespace parboost
