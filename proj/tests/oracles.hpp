// Independent reference implementations used only by tests. These stay
// deliberately separate from the library code paths they check.
#pragma once

#include <cstddef>
#include <vector>

namespace test_oracles {

// Classic sequential boosting with a fixed learning rate: per step, train the
// weighted-error-minimizing stump on the full sample, reweight, normalize.
// Stump convention: predict polarity where x[feature] > threshold, ties to
// -polarity; candidates are value midpoints plus +-infinity; ties break by
// (feature, threshold, polarity) ascending.
struct AdaOracleStep {
  std::size_t feature;
  double threshold;
  int polarity;
  double alpha;
  double z;
};

struct AdaOracleRun {
  std::vector<std::vector<double>> distributions; // D_1 .. D_{steps+1}
  std::vector<AdaOracleStep> steps;
};

AdaOracleRun adaboost_fixed_rate(const std::vector<std::vector<double>>& points,
                                 const std::vector<int>& labels, double gamma,
                                 int steps);

// Majority-vote error of n flips biased by beta toward a random sign,
// sign(0) = +1, by exhaustive enumeration of all 2^n outcomes (n <= 20).
double coin_error_enumerated(int n, double beta);

// Exact probability that a multiset of n draws is an eps-approximation when
// the hypotheses' error sets are disjoint cells. cell_probs[k] is the draw
// probability of cell k under the source distribution, target_losses[k] the
// loss of hypothesis k under the target distribution. Enumerates the
// multinomial counts over the cells.
double exact_disjoint_approx_rate(const std::vector<double>& cell_probs,
                                  const std::vector<double>& target_losses,
                                  std::size_t n, double epsilon);

} // namespace test_oracles
