#pragma once

#include <cstdint>
#include <vector>

#include "parboost/core_types.hpp"
#include "parboost/rng.hpp"

namespace parboost {

struct ApproxConfig {
  double epsilon = 0.0;
  std::size_t n = 0;
  double c_n = 1.0; // uniform-convergence constant, configurable, >= 1
};

/// ceil(c_n * d / gamma^2), with values a hair below an integer snapped up
/// so exact quotients are not inflated by rounding.
std::size_t subsample_size(int d, double gamma, double c_n);

/// True iff max over the class of |loss_D(h) - loss_T(h)| <= epsilon, where
/// loss_T is the uniform loss over the multiset (multiplicity counts).
bool is_eps_approximation(std::span<const std::size_t> multiset,
                          const WeightDistribution& d,
                          const std::vector<Hypothesis>& hclass,
                          const LabeledSample& sample, double epsilon);

/// Multiset loss of h on T under uniform weights with multiplicity.
double multiset_loss(const Hypothesis& h, std::span<const std::size_t> multiset,
                     const LabeledSample& sample);

/// Inverse-CDF sampler over cumulative weights (binary search per draw).
class CdfSampler {
public:
  explicit CdfSampler(const WeightDistribution& d);
  std::size_t draw(RngStream& stream) const;

private:
  std::vector<double> cumulative_;
  std::size_t last_positive_ = 0;
};

/// Walker alias table; same contract as CdfSampler (deterministic given the
/// stream) but O(1) per draw. The two consume randomness differently, so a
/// run is tied to the sampler named in its config.
class AliasTable {
public:
  explicit AliasTable(const WeightDistribution& d);
  std::size_t draw(RngStream& stream) const;

private:
  std::vector<double> accept_;
  std::vector<std::size_t> alias_;
};

enum class SamplerKind { Cdf, Alias };

/// n i.i.d. draws from d with replacement; indices stay inside support(d).
std::vector<std::size_t> draw_subsample(const WeightDistribution& d, std::size_t n,
                                        RngStream& stream,
                                        SamplerKind kind = SamplerKind::Cdf);

struct ApproxRate {
  double rate = 0.0;
  double ci_half_width = 0.0; // 95% normal-approximation half width
  std::size_t trials = 0;
};

/// Monte-Carlo probability that a subsample of size n drawn from d_source is
/// an epsilon-approximation for d_target. The two distributions must share
/// their support (absolute continuity requirement).
ApproxRate empirical_approx_rate(const WeightDistribution& d_target,
                                 const WeightDistribution& d_source,
                                 const std::vector<Hypothesis>& hclass,
                                 const LabeledSample& sample, std::size_t n,
                                 double epsilon, std::size_t trials,
                                 std::uint64_t seed);

} // namespace parboost
