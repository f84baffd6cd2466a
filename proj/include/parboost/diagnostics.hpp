#pragma once

#include <string>
#include <vector>

#include "parboost/core_types.hpp"

namespace parboost {
namespace diag {

/// Relative entropy sum_x P(x) ln(P(x)/Q(x)), natural log, with the
/// 0 * ln(0/q) = 0 convention. P must be absolutely continuous w.r.t. Q:
/// P(x) > 0 where Q(x) = 0 is an error, not an infinity.
double kl_divergence(const WeightDistribution& p, const WeightDistribution& q);

/// ln sup_x P(x)/Q(x) over the common support; dominates kl_divergence.
double max_divergence(const WeightDistribution& p, const WeightDistribution& q);

struct DualityCertificate {
  double lhs = 0.0;   // ln E_P[e^X]
  double rhs = 0.0;   // E_Q[X] - KL(Q || P)
  double slack = 0.0; // lhs - rhs, >= 0 up to rounding
};

/// Donsker-Varadhan variational inequality evaluated on explicit vectors.
DualityCertificate duality_certificate(const WeightDistribution& p,
                                       const WeightDistribution& q,
                                       const std::vector<double>& x);

/// Difference between KL(D_{kR+r} || D_{kR+1}) and its telescoping expansion
///   -ln prod_{r' < r} Z_{kR+r'}
///   - sum_{r' < r} alpha_{kR+r'} sum_i D_{kR+r}(i) label_i h_{kR+r'}(x_i).
/// Exact identity; zero within accumulated rounding.
double telescoping_residual(const BoostTrace& trace, const LabeledSample& sample,
                            int round, int step_in_round);

enum class TrichotomyLabel { LowKl, Progress, NegationAdvantage };

const char* trichotomy_label_name(TrichotomyLabel label);

struct TrichotomyResult {
  TrichotomyLabel label = TrichotomyLabel::LowKl;
  double kl_to_round_start = 0.0;
  double log_z_progress = 0.0; // -ln prod of Z over the round prefix
  // For the negation branch: the best advantage among negations of the
  // round's accepted hypotheses, and whether it clears gamma/2.
  double negation_best_advantage = 0.0;
  bool negation_verified = true;
};

/// Classifies step r of round k against the threshold 4*gamma^2*R:
///   LOW_KL              KL(D_{kR+r} || D_{kR+1}) <= 4 gamma^2 R
///   PROGRESS            otherwise, -ln prod Z > 2 gamma^2 R
///   NEGATION_ADVANTAGE  otherwise; some negated accepted hypothesis of the
///                       round prefix must then have advantage > gamma/2
///                       against D_{kR+r} (hard assertion when `strict`).
TrichotomyResult classify_trichotomy(const BoostTrace& trace,
                                     const LabeledSample& sample, int round,
                                     int step_in_round, bool strict = true);

struct StepDiagnostics {
  std::size_t step = 0; // ell, 1-based
  int round = 0;
  double kl_to_round_start = 0.0;
  double max_div_forward = 0.0;  // D_inf(D_ell, D_round_start)
  double max_div_backward = 0.0; // D_inf(D_round_start, D_ell)
  double telescoping_residual = 0.0;
  TrichotomyLabel label = TrichotomyLabel::LowKl;
};

struct KlReport {
  std::vector<StepDiagnostics> steps;
  double max_abs_residual = 0.0;
  std::size_t low_kl_count = 0;
  std::size_t progress_count = 0;
  std::size_t negation_count = 0;
  bool negation_checks_ok = true;
};

/// Full per-step divergence and trichotomy sweep over a trace.
KlReport build_kl_report(const BoostTrace& trace, const LabeledSample& sample,
                         bool strict = true);

} // namespace diag
} // namespace parboost
