#include "parboost/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parboost/engine.hpp"

namespace parboost {
namespace diag {

namespace {

void check_common_shape(const WeightDistribution& p, const WeightDistribution& q) {
  require(p.size() == q.size(), ErrorKind::InvalidArgument,
          "distributions must share an index set");
}

} // namespace

double kl_divergence(const WeightDistribution& p, const WeightDistribution& q) {
  check_common_shape(p, q);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue; // 0 * ln(0/q) = 0
    require(q[i] > 0.0, ErrorKind::InvalidArgument,
            "absolute continuity violated: P puts mass where Q has none");
    acc += p[i] * std::log(p[i] / q[i]);
  }
  return acc;
}

double max_divergence(const WeightDistribution& p, const WeightDistribution& q) {
  check_common_shape(p, q);
  require(p.same_support(q), ErrorKind::InvalidArgument,
          "max-divergence requires identical supports");
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) worst = std::max(worst, p[i] / q[i]);
  require(worst > 0.0, ErrorKind::InvalidArgument, "empty support");
  return std::log(worst);
}

DualityCertificate duality_certificate(const WeightDistribution& p,
                                       const WeightDistribution& q,
                                       const std::vector<double>& x) {
  check_common_shape(p, q);
  require(x.size() == p.size(), ErrorKind::InvalidArgument,
          "variable vector must match the support size");
  require(p.same_support(q), ErrorKind::InvalidArgument,
          "duality certificate requires identical supports");

  // ln E_P[e^X], max-shifted for stability.
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (p[i] > 0.0) peak = std::max(peak, x[i]);
  double expectation = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (p[i] > 0.0) expectation += p[i] * std::exp(x[i] - peak);

  DualityCertificate cert;
  cert.lhs = peak + std::log(expectation);
  double mean_q = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (q[i] > 0.0) mean_q += q[i] * x[i];
  cert.rhs = mean_q - kl_divergence(q, p);
  cert.slack = cert.lhs - cert.rhs;
  return cert;
}

namespace {

// Shared by the residual and trichotomy paths: distribution at step
// (round, r) plus the round-start distribution, 1-based r within the round.
struct RoundContext {
  WeightDistribution current;
  WeightDistribution start;
  std::size_t first_step; // 0-based index of the round's first step
};

RoundContext round_context(const BoostTrace& trace, const LabeledSample& sample,
                           int round, int step_in_round) {
  require(round >= 0 && round < trace.p, ErrorKind::InvalidArgument,
          "round index out of range");
  require(step_in_round >= 1 && step_in_round <= trace.rounds_per_batch,
          ErrorKind::InvalidArgument, "step index out of range");
  const std::size_t first =
      static_cast<std::size_t>(round) * trace.rounds_per_batch;
  RoundContext ctx;
  ctx.first_step = first;
  ctx.start = trace.distribution_at(sample, first + 1);
  ctx.current = trace.distribution_at(sample, first + step_in_round);
  return ctx;
}

double telescoping_rhs(const BoostTrace& trace, const LabeledSample& sample,
                       const RoundContext& ctx, int step_in_round) {
  double rhs = 0.0;
  for (int r = 1; r < step_in_round; ++r) {
    const StepRecord& step = trace.steps[ctx.first_step + r - 1];
    rhs -= std::log(step.z);
    if (step.alpha != 0.0)
      rhs -= step.alpha * weighted_correlation(step.hypothesis, ctx.current, sample);
  }
  return rhs;
}

} // namespace

double telescoping_residual(const BoostTrace& trace, const LabeledSample& sample,
                            int round, int step_in_round) {
  const RoundContext ctx = round_context(trace, sample, round, step_in_round);
  const double lhs = kl_divergence(ctx.current, ctx.start);
  return lhs - telescoping_rhs(trace, sample, ctx, step_in_round);
}

const char* trichotomy_label_name(TrichotomyLabel label) {
  switch (label) {
    case TrichotomyLabel::LowKl: return "LOW_KL";
    case TrichotomyLabel::Progress: return "PROGRESS";
    case TrichotomyLabel::NegationAdvantage: return "NEGATION_ADVANTAGE";
  }
  return "UNKNOWN";
}

TrichotomyResult classify_trichotomy(const BoostTrace& trace,
                                     const LabeledSample& sample, int round,
                                     int step_in_round, bool strict) {
  const RoundContext ctx = round_context(trace, sample, round, step_in_round);
  TrichotomyResult result;
  result.kl_to_round_start = kl_divergence(ctx.current, ctx.start);

  double log_z = 0.0;
  for (int r = 1; r < step_in_round; ++r)
    log_z += std::log(trace.steps[ctx.first_step + r - 1].z);
  result.log_z_progress = -log_z;

  const double gamma = trace.gamma;
  const double threshold = 4.0 * gamma * gamma * trace.rounds_per_batch;
  if (result.kl_to_round_start <= threshold) {
    result.label = TrichotomyLabel::LowKl;
    return result;
  }
  if (result.log_z_progress > threshold / 2.0) {
    result.label = TrichotomyLabel::Progress;
    return result;
  }

  result.label = TrichotomyLabel::NegationAdvantage;
  // The remaining mass of the divergence identity sits on the hypothesis
  // correlations, so some negated accepted hypothesis of this round's prefix
  // must be advantaged against the current distribution.
  double best = -1.0;
  for (int r = 1; r < step_in_round; ++r) {
    const StepRecord& step = trace.steps[ctx.first_step + r - 1];
    if (step.alpha == 0.0) continue;
    const double negated_advantage =
        -weighted_correlation(step.hypothesis, ctx.current, sample) / 2.0;
    best = std::max(best, negated_advantage);
  }
  result.negation_best_advantage = best;
  result.negation_verified = best > gamma / 2.0 - 1e-9;
  if (strict) {
    require(result.negation_verified, ErrorKind::Assertion,
            "trichotomy case analysis violated: no advantaged negation found");
  }
  return result;
}

KlReport build_kl_report(const BoostTrace& trace, const LabeledSample& sample,
                         bool strict) {
  KlReport report;
  report.steps.reserve(trace.steps.size());

  // Roll the distributions forward once instead of replaying per step;
  // snapshots, when stored, take precedence.
  WeightDistribution current = WeightDistribution::uniform(sample.size());
  WeightDistribution round_start = current;
  const double gamma = trace.gamma;
  const double threshold = 4.0 * gamma * gamma * trace.rounds_per_batch;

  double log_z_prefix = 0.0;
  for (std::size_t idx = 0; idx < trace.steps.size(); ++idx) {
    const int r = static_cast<int>(idx % trace.rounds_per_batch) + 1;
    const int k = static_cast<int>(idx / trace.rounds_per_batch);
    if (trace.has_snapshots()) current = trace.distributions[idx];
    if (r == 1) {
      round_start = current;
      log_z_prefix = 0.0;
    }

    StepDiagnostics sd;
    sd.step = idx + 1;
    sd.round = k;
    sd.kl_to_round_start = kl_divergence(current, round_start);
    sd.max_div_forward = max_divergence(current, round_start);
    sd.max_div_backward = max_divergence(round_start, current);

    double rhs = 0.0;
    for (int rr = 1; rr < r; ++rr) {
      const StepRecord& prev =
          trace.steps[static_cast<std::size_t>(k) * trace.rounds_per_batch + rr - 1];
      rhs -= std::log(prev.z);
      if (prev.alpha != 0.0)
        rhs -= prev.alpha * weighted_correlation(prev.hypothesis, current, sample);
    }
    sd.telescoping_residual = sd.kl_to_round_start - rhs;
    report.max_abs_residual =
        std::max(report.max_abs_residual, std::abs(sd.telescoping_residual));

    if (sd.kl_to_round_start <= threshold) {
      sd.label = TrichotomyLabel::LowKl;
      ++report.low_kl_count;
    } else if (log_z_prefix > threshold / 2.0) {
      sd.label = TrichotomyLabel::Progress;
      ++report.progress_count;
    } else {
      sd.label = TrichotomyLabel::NegationAdvantage;
      ++report.negation_count;
      double best = -1.0;
      for (int rr = 1; rr < r; ++rr) {
        const StepRecord& prev =
            trace.steps[static_cast<std::size_t>(k) * trace.rounds_per_batch + rr - 1];
        if (prev.alpha == 0.0) continue;
        best = std::max(
            best, -weighted_correlation(prev.hypothesis, current, sample) / 2.0);
      }
      const bool ok = best > gamma / 2.0 - 1e-9;
      report.negation_checks_ok = report.negation_checks_ok && ok;
      if (strict)
        require(ok, ErrorKind::Assertion,
                "trichotomy case analysis violated: no advantaged negation found");
    }
    report.steps.push_back(sd);

    const StepRecord& step = trace.steps[idx];
    log_z_prefix -= std::log(step.z);
    if (!trace.has_snapshots()) {
      current = boost_step(current, step.hypothesis, step.alpha, sample).first;
    }
  }
  return report;
}

} // namespace diag
} // namespace parboost
