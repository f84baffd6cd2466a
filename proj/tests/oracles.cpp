#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace test_oracles {

namespace {

struct StumpPick {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = 1;
  double error = std::numeric_limits<double>::infinity();
};

int stump_predict(const std::vector<double>& x, std::size_t f, double theta,
                  int polarity) {
  return x[f] > theta ? polarity : -polarity;
}

StumpPick best_weighted_stump(const std::vector<std::vector<double>>& points,
                              const std::vector<int>& labels,
                              const std::vector<double>& weights) {
  StumpPick best;
  const std::size_t n_features = points.front().size();
  for (std::size_t f = 0; f < n_features; ++f) {
    std::set<double> distinct;
    for (const auto& x : points) distinct.insert(x[f]);
    std::vector<double> candidates;
    candidates.push_back(-std::numeric_limits<double>::infinity());
    double prev = 0.0;
    bool have_prev = false;
    for (double v : distinct) {
      if (have_prev) candidates.push_back((prev + v) / 2.0);
      prev = v;
      have_prev = true;
    }
    candidates.push_back(std::numeric_limits<double>::infinity());
    for (double theta : candidates) {
      for (int polarity : {-1, +1}) {
        double err = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i)
          if (stump_predict(points[i], f, theta, polarity) != labels[i])
            err += weights[i];
        if (err < best.error) best = StumpPick{f, theta, polarity, err};
      }
    }
  }
  return best;
}

} // namespace

AdaOracleRun adaboost_fixed_rate(const std::vector<std::vector<double>>& points,
                                 const std::vector<int>& labels, double gamma,
                                 int steps) {
  const std::size_t m = points.size();
  AdaOracleRun run;
  std::vector<double> d(m, 1.0 / static_cast<double>(m));
  run.distributions.push_back(d);
  const double alpha =
      0.5 * std::log((0.5 + gamma / 2.0) / (0.5 - gamma / 2.0));
  for (int step = 0; step < steps; ++step) {
    const StumpPick pick = best_weighted_stump(points, labels, d);
    double used_alpha = alpha;
    if (0.5 - pick.error < gamma / 2.0) used_alpha = 0.0; // no advantaged stump
    double z = 0.0;
    std::vector<double> next(m);
    for (std::size_t i = 0; i < m; ++i) {
      const int pred = stump_predict(points[i], pick.feature, pick.threshold,
                                     pick.polarity);
      next[i] = d[i] * std::exp(-used_alpha * labels[i] * pred);
      z += next[i];
    }
    for (double& w : next) w /= z;
    run.steps.push_back({pick.feature, pick.threshold, pick.polarity, used_alpha, z});
    d = next;
    run.distributions.push_back(d);
  }
  return run;
}

double coin_error_enumerated(int n, double beta) {
  if (n > 20) throw std::invalid_argument("enumeration oracle limited to n <= 20");
  const double p_agree = 0.5 + beta;
  double error = 0.0;
  // Average over the two equally likely concept signs.
  for (int concept_sign : {+1, -1}) {
    for (std::uint64_t pattern = 0; pattern < (1ULL << n); ++pattern) {
      double prob = 0.5; // concept prior
      int sum = 0;
      for (int b = 0; b < n; ++b) {
        const bool agree = (pattern >> b) & 1;
        prob *= agree ? p_agree : 1.0 - p_agree;
        sum += agree ? concept_sign : -concept_sign;
      }
      const int guess = sum >= 0 ? +1 : -1;
      if (guess != concept_sign) error += prob;
    }
  }
  return error;
}

double exact_disjoint_approx_rate(const std::vector<double>& cell_probs,
                                  const std::vector<double>& target_losses,
                                  std::size_t n, double epsilon) {
  const std::size_t cells = cell_probs.size();
  if (target_losses.size() != cells)
    throw std::invalid_argument("cells and losses must align");
  double rest = 1.0;
  for (double p : cell_probs) rest -= p;
  if (rest < -1e-12) throw std::invalid_argument("cell probabilities exceed 1");
  rest = std::max(rest, 0.0);

  std::vector<double> log_fact(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i)
    log_fact[i] = log_fact[i - 1] + std::log(static_cast<double>(i));

  double total = 0.0;
  std::vector<std::size_t> counts(cells, 0);
  // Depth-first over multinomial count vectors; the last cell is implied.
  const auto recurse = [&](auto&& self, std::size_t cell, std::size_t used,
                           double log_prob_partial) -> void {
    if (cell == cells) {
      const std::size_t remainder = n - used;
      for (std::size_t k = 0; k < cells; ++k) {
        const double empirical =
            static_cast<double>(counts[k]) / static_cast<double>(n);
        if (std::abs(target_losses[k] - empirical) > epsilon) return;
      }
      double log_prob = log_fact[n] + log_prob_partial - log_fact[remainder];
      if (remainder > 0) {
        if (rest <= 0.0) return; // impossible remainder
        log_prob += static_cast<double>(remainder) * std::log(rest);
      }
      total += std::exp(log_prob);
      return;
    }
    for (std::size_t k = 0; used + k <= n; ++k) {
      if (cell_probs[cell] == 0.0 && k > 0) break;
      counts[cell] = k;
      double log_term = -log_fact[k];
      if (k > 0) log_term += static_cast<double>(k) * std::log(cell_probs[cell]);
      self(self, cell + 1, used + k, log_prob_partial + log_term);
    }
    counts[cell] = 0;
  };
  recurse(recurse, 0, 0, 0.0);
  return total;
}

} // namespace test_oracles
