#include "parboost/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace parboost {

std::size_t subsample_size(int d, double gamma, double c_n) {
  require(d >= 1, ErrorKind::InvalidArgument, "dimension proxy must be >= 1");
  require(gamma > 0.0 && gamma < 0.5, ErrorKind::InvalidArgument,
          "gamma must lie in (0, 1/2)");
  require(c_n >= 1.0, ErrorKind::InvalidArgument, "c_n must be >= 1");
  double q = c_n * static_cast<double>(d) / (gamma * gamma);
  // Snap quotients that are an integer up to rounding, so exact ratios like
  // 4 / 0.2^2 do not inflate by one.
  const double nearest = std::round(q);
  if (std::abs(q - nearest) < 1e-9 * std::max(1.0, nearest)) q = nearest;
  return static_cast<std::size_t>(std::ceil(q));
}

double multiset_loss(const Hypothesis& h, std::span<const std::size_t> multiset,
                     const LabeledSample& sample) {
  require(!multiset.empty(), ErrorKind::InvalidArgument, "empty multiset");
  std::size_t wrong = 0;
  for (std::size_t idx : multiset) {
    require(idx < sample.size(), ErrorKind::InvalidArgument,
            "multiset index out of sample range");
    if (evaluate(h, sample, idx) != sample.labels[idx]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(multiset.size());
}

bool is_eps_approximation(std::span<const std::size_t> multiset,
                          const WeightDistribution& d,
                          const std::vector<Hypothesis>& hclass,
                          const LabeledSample& sample, double epsilon) {
  require(!hclass.empty(), ErrorKind::InvalidArgument, "hypothesis class is empty");
  for (const Hypothesis& h : hclass) {
    const double gap = std::abs(weighted_loss(h, d, sample) -
                                multiset_loss(h, multiset, sample));
    if (gap > epsilon) return false;
  }
  return true;
}

CdfSampler::CdfSampler(const WeightDistribution& d) {
  cumulative_.reserve(d.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    acc += d[i];
    cumulative_.push_back(acc);
    if (d[i] > 0.0) last_positive_ = i;
  }
  require(acc > 0.0, ErrorKind::InvalidArgument, "distribution sums to zero");
}

std::size_t CdfSampler::draw(RngStream& stream) const {
  const double u = stream.next_double() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  std::size_t idx = static_cast<std::size_t>(it - cumulative_.begin());
  // A zero-weight index owns an empty cumulative interval and is never
  // selected; only u rounding up to the total can fall off the end.
  if (idx > last_positive_) idx = last_positive_;
  return idx;
}

AliasTable::AliasTable(const WeightDistribution& d) {
  const std::size_t n = d.size();
  require(n > 0, ErrorKind::InvalidArgument, "empty distribution");
  const double total = d.sum();
  require(total > 0.0, ErrorKind::InvalidArgument, "distribution sums to zero");

  accept_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::size_t first_positive = 0;
  while (d[first_positive] == 0.0) ++first_positive;

  std::vector<double> scaled(n);
  std::queue<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = d[i] / total * static_cast<double>(n);
    (scaled[i] < 1.0 ? small : large).push(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.front(), l = large.front();
    small.pop();
    large.pop();
    accept_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    (scaled[l] < 1.0 ? small : large).push(l);
  }
  // Leftovers are weight-1 cells up to rounding; a zero-weight cell must
  // never become drawable, so it aliases to a mass point instead.
  const auto flush = [&](std::queue<std::size_t>& q) {
    while (!q.empty()) {
      const std::size_t i = q.front();
      q.pop();
      if (d[i] > 0.0) {
        accept_[i] = 1.0;
        alias_[i] = i;
      } else {
        accept_[i] = 0.0;
        alias_[i] = first_positive;
      }
    }
  };
  flush(small);
  flush(large);
}

std::size_t AliasTable::draw(RngStream& stream) const {
  const std::size_t cell = static_cast<std::size_t>(
      stream.next_below(static_cast<std::uint64_t>(accept_.size())));
  return stream.next_double() < accept_[cell] ? cell : alias_[cell];
}

std::vector<std::size_t> draw_subsample(const WeightDistribution& d, std::size_t n,
                                        RngStream& stream, SamplerKind kind) {
  require(n > 0, ErrorKind::InvalidArgument, "subsample size must be positive");
  std::vector<std::size_t> out;
  out.reserve(n);
  if (kind == SamplerKind::Cdf) {
    const CdfSampler sampler(d);
    for (std::size_t k = 0; k < n; ++k) out.push_back(sampler.draw(stream));
  } else {
    const AliasTable sampler(d);
    for (std::size_t k = 0; k < n; ++k) out.push_back(sampler.draw(stream));
  }
  return out;
}

ApproxRate empirical_approx_rate(const WeightDistribution& d_target,
                                 const WeightDistribution& d_source,
                                 const std::vector<Hypothesis>& hclass,
                                 const LabeledSample& sample, std::size_t n,
                                 double epsilon, std::size_t trials,
                                 std::uint64_t seed) {
  require(trials >= 1, ErrorKind::InvalidArgument, "need at least one trial");
  require(d_target.same_support(d_source), ErrorKind::InvalidArgument,
          "target and source distributions must share their support");
  std::size_t hits = 0;
  RngStream stream = derive_stream(seed, 0xa99ULL);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::vector<std::size_t> t = draw_subsample(d_source, n, stream);
    if (is_eps_approximation(t, d_target, hclass, sample, epsilon)) ++hits;
  }
  ApproxRate result;
  result.trials = trials;
  result.rate = static_cast<double>(hits) / static_cast<double>(trials);
  result.ci_half_width =
      1.96 * std::sqrt(result.rate * (1.0 - result.rate) /
                       static_cast<double>(trials));
  return result;
}

} // namespace parboost
