#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "parboost/core_types.hpp"

namespace parboost {

struct TrainResult {
  Hypothesis hypothesis;
  // 1/2 minus the empirical loss of the returned hypothesis on its training
  // multiset. Reported, never assumed: the engine re-checks every candidate
  // against the live distribution.
  double achieved_advantage = 0.0;
};

/// A trainer invoked once per subsample. Implementations are pure functions
/// of their inputs so the engine's parallel fan-out can call them from any
/// thread.
class WeakLearner {
public:
  virtual ~WeakLearner() = default;

  /// Train on a multiset of sample indices with uniform weights
  /// (multiplicity counts).
  virtual TrainResult train(const LabeledSample& sample,
                            std::span<const std::size_t> multiset) const = 0;

  /// Train on the full sample under an explicit distribution. Used by the
  /// classical-sequential debug mode; default forwards to an error since
  /// most learners only see subsamples.
  virtual TrainResult train_weighted(const LabeledSample& sample,
                                     const WeightDistribution& d) const;

  /// Capacity proxy used to size bagging subsamples: log2 of the class size
  /// for finite classes, a distinct-labelings bound for stumps.
  virtual int reported_dimension(const LabeledSample& sample) const = 0;
};

/// Empirical-error-minimizing stump over all (feature, threshold, polarity)
/// triples. Thresholds are midpoints between consecutive distinct feature
/// values plus -inf/+inf sentinels; ties break lexicographically by
/// (feature, threshold, polarity) so results never depend on input order.
TrainResult train_stump(const LabeledSample& sample,
                        std::span<const std::size_t> multiset);
TrainResult train_stump_weighted(const LabeledSample& sample,
                                 const WeightDistribution& d);

/// Minimizes empirical loss over a finite hypothesis set; ties break toward
/// the lowest hypothesis id.
TrainResult train_erm(const LabeledSample& sample,
                      std::span<const std::size_t> multiset,
                      const std::vector<Hypothesis>& hclass);
TrainResult train_erm_weighted(const LabeledSample& sample,
                               const WeightDistribution& d,
                               const std::vector<Hypothesis>& hclass);

class StumpLearner final : public WeakLearner {
public:
  TrainResult train(const LabeledSample& sample,
                    std::span<const std::size_t> multiset) const override;
  TrainResult train_weighted(const LabeledSample& sample,
                             const WeightDistribution& d) const override;
  int reported_dimension(const LabeledSample& sample) const override;
};

class FiniteClassErmLearner final : public WeakLearner {
public:
  explicit FiniteClassErmLearner(std::shared_ptr<const std::vector<Hypothesis>> hclass);

  TrainResult train(const LabeledSample& sample,
                    std::span<const std::size_t> multiset) const override;
  TrainResult train_weighted(const LabeledSample& sample,
                             const WeightDistribution& d) const override;
  int reported_dimension(const LabeledSample& sample) const override;

  const std::vector<Hypothesis>& hclass() const { return *hclass_; }

private:
  std::shared_ptr<const std::vector<Hypothesis>> hclass_;
};

/// Synthetic instance where the concept is the sign of a convex vote over a
/// subset of a random finite class, and every point's vote clears a planted
/// margin. Guarantees that ERM over the class has advantage at least
/// planted_margin/2 under any distribution.
struct PlantedVoteInstance {
  LabeledSample sample;
  std::shared_ptr<const std::vector<Hypothesis>> hclass;
  std::vector<std::size_t> voter_ids;
  std::vector<double> vote_weights; // convex
  double planted_margin = 0.0;      // realized min vote margin, >= gamma_star

  FiniteClassErmLearner make_learner() const {
    return FiniteClassErmLearner(hclass);
  }
};

PlantedVoteInstance plant_vote_instance(std::size_t m, std::size_t class_size,
                                        std::size_t voters, double gamma_star,
                                        std::uint64_t seed);

} // namespace parboost
