#include "parboost/engine.hpp"

#include <algorithm>
#include <cmath>

#include "parallel_slots.hpp"
#include "parboost/log.hpp"

namespace parboost {

using detail::parallel_slots;

namespace {

double kahan_sum(const std::vector<double>& xs) {
  double s = 0.0, comp = 0.0;
  for (double x : xs) {
    const double y = x - comp;
    const double t = s + y;
    comp = (t - s) - y;
    s = t;
  }
  return s;
}

} // namespace

void EngineConfig::validate() const {
  require(gamma > 0.0 && gamma < 0.5, ErrorKind::InvalidArgument,
          "gamma must lie in (0, 1/2)");
  require(p >= 1, ErrorKind::InvalidArgument, "need p >= 1");
  require(R >= 1, ErrorKind::InvalidArgument, "need R >= 1");
  require(t >= R, ErrorKind::InvalidArgument, "need t >= R");
  require(t % R == 0, ErrorKind::InvalidArgument,
          "t must be divisible by R (the per-sub-round pool size t/R is exact)");
  require(parallelism >= 1, ErrorKind::InvalidArgument, "need parallelism >= 1");
  require(c_n >= 1.0, ErrorKind::InvalidArgument, "c_n must be >= 1");
  if (full_sample_debug) {
    require(R == 1 && t == 1, ErrorKind::InvalidArgument,
            "full-sample debug mode runs with R = 1 and t = 1");
  }
}

std::optional<Selection> select_advantaged(const RoundPool& pool,
                                           const WeightDistribution& d,
                                           const LabeledSample& sample,
                                           double gamma, bool select_first,
                                           double* best_advantage_out) {
  require(!pool.members.empty(), ErrorKind::InvalidArgument, "empty pool");
  const double threshold = gamma / 2.0;
  double best_adv = -1.0;
  std::size_t best_idx = 0;
  std::optional<std::size_t> first_qualified;
  for (std::size_t idx = 0; idx < pool.members.size(); ++idx) {
    const double adv = 0.5 - weighted_loss(pool.members[idx], d, sample);
    if (adv > best_adv) { // strict: ties keep the earliest provenance
      best_adv = adv;
      best_idx = idx;
    }
    if (!first_qualified && adv >= threshold) first_qualified = idx;
  }
  if (best_advantage_out) *best_advantage_out = best_adv;
  if (!first_qualified) return std::nullopt;
  const std::size_t pick = select_first ? *first_qualified : best_idx;
  const double pick_adv = select_first
                              ? 0.5 - weighted_loss(pool.members[pick], d, sample)
                              : best_adv;
  return Selection{pool.members[pick], pool.provenance[pick], pick_adv};
}

std::pair<WeightDistribution, double> boost_step(const WeightDistribution& d,
                                                 const Hypothesis& h, double alpha,
                                                 const LabeledSample& sample) {
  require(d.size() == sample.size(), ErrorKind::InvalidArgument,
          "distribution/sample length mismatch");
  require(alpha >= 0.0 && std::isfinite(alpha), ErrorKind::InvalidArgument,
          "alpha must be finite and nonnegative");
  if (alpha == 0.0) return {d, 1.0};

  const double shrink = std::exp(-alpha);
  const double grow = std::exp(alpha);
  std::vector<double> next(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const int agree = evaluate(h, sample, i) == sample.labels[i] ? 1 : -1;
    next[i] = d[i] * (agree > 0 ? shrink : grow);
  }
  const double z = kahan_sum(next);
  require(z > 0.0 && std::isfinite(z), ErrorKind::Internal,
          "normalization factor must be positive and finite");
  for (double& w : next) w /= z;
  return {WeightDistribution(std::move(next)), z};
}

RunResult run(const EngineConfig& config, const LabeledSample& sample,
              const WeakLearner& learner) {
  config.validate();
  sample.validate();

  const std::size_t m = sample.size();
  const double alpha = learning_rate(config.gamma);
  std::size_t n = config.n;
  if (config.full_sample_debug) {
    n = m;
  } else if (n == 0) {
    n = subsample_size(learner.reported_dimension(sample), config.gamma, config.c_n);
  }

  const int per_sub = config.t / config.R;

  BoostTrace trace;
  trace.gamma = config.gamma;
  trace.alpha = alpha;
  trace.p = config.p;
  trace.rounds_per_batch = config.R;
  trace.t = config.t;
  trace.n = n;
  trace.seed = config.seed;
  trace.steps.reserve(static_cast<std::size_t>(config.p) * config.R);

  WeightDistribution d = WeightDistribution::uniform(m);
  if (config.store_snapshots) trace.distributions.push_back(d);

  LinearClassifier g;
  bool any_accepted = false;

  for (int k = 0; k < config.p; ++k) {
    // All of round k's subsamples come from the distribution the round
    // started with; the R sub-rounds share it.
    const WeightDistribution round_start = d;
    const std::size_t n_tasks = static_cast<std::size_t>(config.R) * per_sub;
    std::vector<TrainResult> trained(n_tasks);

    parallel_slots(n_tasks, config.parallelism, [&](std::size_t task) {
      const int r = static_cast<int>(task / per_sub) + 1;
      const int j = static_cast<int>(task % per_sub) + 1;
      if (config.full_sample_debug) {
        trained[task] = learner.train_weighted(sample, round_start);
      } else {
        RngStream stream = derive_stream(config.seed, static_cast<std::uint64_t>(k),
                                         static_cast<std::uint64_t>(r),
                                         static_cast<std::uint64_t>(j));
        const std::vector<std::size_t> subsample =
            draw_subsample(round_start, n, stream, config.sampler);
        trained[task] = learner.train(sample, subsample);
      }
    });
    trace.weak_learner_calls += n_tasks;

    for (int r = 1; r <= config.R; ++r) {
      RoundPool pool;
      pool.members.reserve(2 * per_sub);
      pool.provenance.reserve(2 * per_sub);
      pool.train_advantages.reserve(per_sub);
      const std::size_t base = static_cast<std::size_t>(r - 1) * per_sub;
      for (int j = 0; j < per_sub; ++j) {
        pool.members.push_back(trained[base + j].hypothesis);
        pool.provenance.push_back(Provenance{k, r, j, false});
        pool.train_advantages.push_back(trained[base + j].achieved_advantage);
      }
      for (int j = 0; j < per_sub; ++j) {
        pool.members.push_back(trained[base + j].hypothesis.negation());
        pool.provenance.push_back(Provenance{k, r, j, true});
      }

      double best_adv = 0.0;
      const std::optional<Selection> selection = select_advantaged(
          pool, d, sample, config.gamma, config.select_first, &best_adv);

      StepRecord step;
      step.pool_best_advantage = best_adv;
      if (selection) {
        step.hypothesis = selection->hypothesis;
        step.chosen = selection->provenance;
        step.alpha = alpha;
        step.accepted = true;
        any_accepted = true;
      } else {
        step.hypothesis = pool.members.front(); // inert: alpha stays 0
        step.chosen = pool.provenance.front();
        step.alpha = 0.0;
        step.accepted = false;
      }

      auto [next_d, z] = boost_step(d, step.hypothesis, step.alpha, sample);
      step.z = z;
      if (step.accepted) g.add_term(step.alpha, step.hypothesis);
      trace.steps.push_back(std::move(step));
      d = std::move(next_d);
      if (config.store_snapshots) trace.distributions.push_back(d);
    }
  }

  trace.degenerate = !any_accepted;
  if (trace.degenerate)
    log_warn("boosting run degenerate: no step found an advantaged hypothesis");
  trace.validate();
  return RunResult{std::move(g), std::move(trace)};
}

double round_log_z_product(const BoostTrace& trace, int round) {
  require(round >= 0 && round < trace.p, ErrorKind::InvalidArgument,
          "round index out of range");
  double acc = 0.0;
  for (int r = 0; r < trace.rounds_per_batch; ++r)
    acc += std::log(
        trace.steps[static_cast<std::size_t>(round) * trace.rounds_per_batch + r].z);
  return acc;
}

double exp_loss_identity_gap(const LinearClassifier& g, const LabeledSample& sample,
                             const BoostTrace& trace) {
  // Both sides in log space: raw scores can overflow exp() on long runs.
  const std::size_t m = sample.size();
  std::vector<double> exponents(m);
  for (std::size_t i = 0; i < m; ++i)
    exponents[i] = -static_cast<double>(sample.labels[i]) * g.raw_score(sample, i);
  const double peak = *std::max_element(exponents.begin(), exponents.end());
  std::vector<double> shifted(m);
  for (std::size_t i = 0; i < m; ++i) shifted[i] = std::exp(exponents[i] - peak);
  const double lhs_log = peak + std::log(kahan_sum(shifted));

  std::vector<double> log_zs(trace.steps.size());
  for (std::size_t j = 0; j < trace.steps.size(); ++j)
    log_zs[j] = std::log(trace.steps[j].z);
  const double rhs_log = std::log(static_cast<double>(m)) + kahan_sum(log_zs);
  return lhs_log - rhs_log;
}

MarginReport certify_margins(const LinearClassifier& g, const LabeledSample& sample,
                             const BoostTrace& trace) {
  MarginReport report;
  report.degenerate = trace.degenerate || g.degenerate();
  if (report.degenerate) return report; // no margin claim without voters

  const double gap = exp_loss_identity_gap(g, sample, trace);
  report.exp_loss_rel_err = std::abs(std::expm1(gap));
  report.exp_loss_identity_ok = report.exp_loss_rel_err <= 1e-9;

  report.all_rounds_progressed = true;
  const double round_target = -trace.gamma * trace.gamma * trace.rounds_per_batch / 2.0;
  for (int k = 0; k < trace.p; ++k) {
    if (!(round_log_z_product(trace, k) < round_target)) {
      report.all_rounds_progressed = false;
      break;
    }
  }

  const std::vector<double> margin_values = margins(g, sample);
  report.min_margin = *std::min_element(margin_values.begin(), margin_values.end());
  const double threshold = trace.gamma / 8.0;
  for (double value : margin_values)
    if (value < threshold) ++report.count_below_threshold;

  const double pr = static_cast<double>(trace.p) * trace.rounds_per_batch;
  report.counting_bound = static_cast<double>(sample.size()) *
                          std::exp(-pr * trace.gamma * trace.gamma / 4.0);
  if (report.all_rounds_progressed) {
    report.counting_bound_ok =
        static_cast<double>(report.count_below_threshold) < report.counting_bound;
  }
  return report;
}

} // namespace parboost
