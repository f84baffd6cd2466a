#include "parboost/adversary.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "parboost/log.hpp"

namespace parboost {
namespace adv {

PackedRow::PackedRow(std::size_t n_bits)
    : n_bits_(n_bits), words_((n_bits + 63) / 64, 0) {}

std::size_t PackedRow::agreement_count(const PackedRow& other) const {
  require(n_bits_ == other.n_bits_, ErrorKind::InvalidArgument,
          "row length mismatch");
  std::size_t agree = 0;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t same = ~(words_[w] ^ other.words_[w]);
    if (w + 1 == words_.size() && (n_bits_ & 63) != 0)
      same &= (1ULL << (n_bits_ & 63)) - 1; // mask tail padding
    agree += static_cast<std::size_t>(std::popcount(same));
  }
  return agree;
}

std::size_t HardInstanceParams::uniform_rows_per_block() const {
  return static_cast<std::size_t>(R) *
         static_cast<std::size_t>(std::ceil(std::exp(constants.c_s * d)));
}

void HardInstanceParams::validate() const {
  require(m >= 1, ErrorKind::InvalidArgument, "need m >= 1");
  require(d >= 1, ErrorKind::InvalidArgument, "need d >= 1");
  require(p >= 1 && R >= 1, ErrorKind::InvalidArgument, "need p, R >= 1");
  require(constants.c_s >= 1.0 && constants.c_b >= 1.0 && constants.c_l >= 1.0,
          ErrorKind::InvalidArgument, "constants must be >= 1");
  require(gamma > 0.0, ErrorKind::InvalidArgument, "gamma must be positive");
  require(gamma < 1.0 / (4.0 * constants.c_b), ErrorKind::InvalidArgument,
          "gamma must satisfy gamma < 1/(4*c_b)");
  // Desk-scale resource cap: the matrix must stay well inside memory.
  constexpr std::size_t kBitBudget = 1ULL << 33; // 1 GiB of matrix bits
  require(total_rows() <= kBitBudget / std::max<std::size_t>(domain(), 1),
          ErrorKind::Construction,
          "hypothesis matrix exceeds the resource budget (reduce d, p, or R)");
}

HardInstance::HardInstance(HardInstanceParams params, PackedRow concept_row,
                           std::vector<PackedRow> rows)
    : params_(std::move(params)), concept_row_(std::move(concept_row)),
      rows_(std::move(rows)) {}

bool HardInstance::row_is_biased(std::size_t r) const {
  const std::size_t within = r % params_.rows_per_block();
  return within >= params_.uniform_rows_per_block();
}

std::vector<std::size_t> HardInstance::biased_row_ids() const {
  std::vector<std::size_t> ids;
  ids.reserve(static_cast<std::size_t>(params_.p) * params_.R);
  for (std::size_t r = 0; r < rows_.size(); ++r)
    if (row_is_biased(r)) ids.push_back(r);
  return ids;
}

HardInstance generate_instance(const HardInstanceParams& params, std::uint64_t seed) {
  params.validate();
  const std::size_t domain = params.domain();
  const std::size_t n_words = (domain + 63) / 64;
  const double agree_p = 0.5 + params.constants.c_b * params.gamma;

  // Aggregate bias check over all biased entries; the rare (two-sided 4
  // sigma) off draws are rejected and redrawn deterministically.
  constexpr int kMaxAttempts = 64;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    RngStream stream = derive_stream(seed, 0xc01ULL, static_cast<std::uint64_t>(attempt));

    PackedRow concept_row(domain);
    for (std::size_t w = 0; w < n_words; ++w) {
      const std::uint64_t bits = stream.next_u64();
      for (std::size_t b = 0; b < 64 && w * 64 + b < domain; ++b)
        concept_row.set_sign(w * 64 + b, (bits >> b) & 1 ? 1 : -1);
    }

    std::vector<PackedRow> rows;
    rows.reserve(params.total_rows());
    std::size_t agreements = 0;
    const std::size_t uniform_rows = params.uniform_rows_per_block();
    for (int block = 0; block < params.p; ++block) {
      for (std::size_t u = 0; u < uniform_rows; ++u) {
        PackedRow row(domain);
        for (std::size_t w = 0; w < n_words; ++w) {
          const std::uint64_t bits = stream.next_u64();
          for (std::size_t b = 0; b < 64 && w * 64 + b < domain; ++b)
            row.set_sign(w * 64 + b, (bits >> b) & 1 ? 1 : -1);
        }
        rows.push_back(std::move(row));
      }
      for (int r = 0; r < params.R; ++r) {
        PackedRow row(domain);
        for (std::size_t i = 0; i < domain; ++i) {
          const bool agree = stream.next_bernoulli(agree_p);
          row.set_sign(i, agree ? concept_row.sign(i) : -concept_row.sign(i));
        }
        agreements += row.agreement_count(concept_row);
        rows.push_back(std::move(row));
      }
    }

    const double n_biased_entries =
        static_cast<double>(params.p) * params.R * static_cast<double>(domain);
    const double mu = n_biased_entries * agree_p;
    const double sigma = std::sqrt(n_biased_entries * agree_p * (1.0 - agree_p));
    if (std::abs(static_cast<double>(agreements) - mu) <= 4.0 * sigma) {
      return HardInstance(params, std::move(concept_row), std::move(rows));
    }
    log_debug("biased-row agreement outside 4 sigma; redrawing instance");
  }
  fail(ErrorKind::Internal, "instance generation kept failing the bias check");
}

double query_loss(const PackedRow& row, const Query& query) {
  double loss = 0.0;
  for (std::size_t j = 0; j < query.indices.size(); ++j) {
    if (query.weights[j] > 0.0 && row.sign(query.indices[j]) != query.labels[j])
      loss += query.weights[j];
  }
  return loss;
}

ScanResult scan_weak_learner(const std::vector<const PackedRow*>& rows,
                             const Query& query, double gamma) {
  require(!rows.empty(), ErrorKind::InvalidArgument, "empty hypothesis matrix");
  require(query.indices.size() == query.labels.size() &&
              query.indices.size() == query.weights.size(),
          ErrorKind::InvalidArgument, "query fields must align");
  const double threshold = 0.5 - gamma;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double loss = query_loss(*rows[i], query);
    if (loss <= threshold) return ScanResult{i, true, loss};
  }
  return ScanResult{0, false, query_loss(*rows[0], query)};
}

bool SampleView::in_sample(std::uint32_t i) const {
  return std::binary_search(distinct.begin(), distinct.end(), i);
}

int SampleView::label_of(std::uint32_t i) const {
  const auto it = std::lower_bound(distinct.begin(), distinct.end(), i);
  require(it != distinct.end() && *it == i, ErrorKind::InvalidArgument,
          "label requested outside the sample");
  return distinct_labels[static_cast<std::size_t>(it - distinct.begin())];
}

namespace {

SampleView make_sample_view(const HardInstance& instance,
                            std::vector<std::uint32_t> draws) {
  SampleView view;
  view.domain = instance.domain();
  view.draws = std::move(draws);
  view.distinct = view.draws;
  std::sort(view.distinct.begin(), view.distinct.end());
  view.distinct.erase(std::unique(view.distinct.begin(), view.distinct.end()),
                      view.distinct.end());
  view.distinct_labels.reserve(view.distinct.size());
  for (std::uint32_t i : view.distinct)
    view.distinct_labels.push_back(
        static_cast<std::int8_t>(instance.concept_sign(i)));
  return view;
}

void validate_query(const Query& query, const SampleView& view) {
  require(query.indices.size() == query.weights.size(),
          ErrorKind::Protocol, "query weights must align with its indices");
  require(!query.indices.empty(), ErrorKind::Protocol, "empty query");
  double total = 0.0;
  for (std::size_t j = 0; j < query.indices.size(); ++j) {
    require(view.in_sample(query.indices[j]), ErrorKind::Protocol,
            "query index outside the training sample");
    require(query.weights[j] >= 0.0, ErrorKind::Protocol,
            "query weights must be nonnegative");
    total += query.weights[j];
  }
  require(std::abs(total - 1.0) <= 1e-6, ErrorKind::Protocol,
          "query distribution must sum to one");
}

} // namespace

ExtensionResult run_extension(ProtocolClient& client, const HardInstance& instance,
                              const SampleView& view, const ExtensionOptions& options) {
  std::vector<const PackedRow*> rows;
  rows.reserve(instance.row_count() + 1);
  for (std::size_t r = 0; r < instance.row_count(); ++r)
    rows.push_back(&instance.row(r));
  if (options.append_concept_row) rows.push_back(&instance.concept_row());

  ExtensionResult result;
  std::vector<std::vector<Response>> history;
  for (int round = 1; round <= options.p; ++round) {
    std::vector<Query> queries = client.make_queries(round, view, history);
    require(queries.size() <= static_cast<std::size_t>(options.t),
            ErrorKind::Protocol, "round exceeded its query budget");
    std::vector<Response> responses;
    responses.reserve(queries.size());
    bool failed_response = false;
    for (Query& query : queries) {
      validate_query(query, view);
      // Labels come from the protocol surface, never from the caller: the
      // weak learner sees exactly c restricted to the queried indices.
      query.labels.resize(query.indices.size());
      for (std::size_t j = 0; j < query.indices.size(); ++j)
        query.labels[j] =
            static_cast<std::int8_t>(view.label_of(query.indices[j]));
      const ScanResult scan = scan_weak_learner(rows, query, options.gamma);
      ++result.queries_made;
      responses.push_back(rows[scan.row_id]);
      if (!scan.qualified) failed_response = true;
    }
    result.rounds_used = round;
    if (failed_response) {
      // A response without the promised advantage aborts the whole run.
      result.halted_early = true;
      PackedRow ones(instance.domain());
      for (std::size_t i = 0; i < instance.domain(); ++i) ones.set_sign(i, 1);
      result.hypothesis = std::move(ones);
      return result;
    }
    history.push_back(std::move(responses));
  }
  result.hypothesis = client.final_hypothesis(view, history);
  require(result.hypothesis.size() == instance.domain(), ErrorKind::Protocol,
          "final hypothesis must cover the whole domain");
  return result;
}

PackedRow majority_decoder(const HardInstance& instance, const SampleView& view) {
  const std::vector<std::size_t> biased = instance.biased_row_ids();
  PackedRow out(instance.domain());
  for (std::size_t i = 0; i < instance.domain(); ++i) {
    const std::uint32_t idx = static_cast<std::uint32_t>(i);
    if (view.in_sample(idx)) {
      out.set_sign(i, view.label_of(idx));
      continue;
    }
    int column_sum = 0;
    for (std::size_t r : biased) column_sum += instance.row(r).sign(i);
    out.set_sign(i, column_sum >= 0 ? 1 : -1); // sign(0) = +1
  }
  return out;
}

double coin_oracle(std::size_t n, double beta) {
  require(beta >= 0.0 && beta < 0.5, ErrorKind::InvalidArgument,
          "beta must lie in [0, 1/2)");
  require(n >= 1, ErrorKind::InvalidArgument, "need n >= 1");
  const double p = 0.5 + beta; // per-flip agreement probability
  const double q = 0.5 - beta;

  // pmf(k) = C(n,k) p^k q^(n-k); exact binomials in double for small n,
  // log-space otherwise.
  const auto pmf = [&](std::size_t k) -> double {
    if (n <= 50) {
      double choose = 1.0;
      for (std::size_t i = 0; i < k; ++i)
        choose = choose * static_cast<double>(n - i) / static_cast<double>(i + 1);
      return choose * std::pow(p, static_cast<double>(k)) *
             std::pow(q, static_cast<double>(n - k));
    }
    const double log_pmf = std::lgamma(static_cast<double>(n) + 1.0) -
                           std::lgamma(static_cast<double>(k) + 1.0) -
                           std::lgamma(static_cast<double>(n - k) + 1.0) +
                           static_cast<double>(k) * std::log(p) +
                           static_cast<double>(n - k) * std::log(q);
    return std::exp(log_pmf);
  };

  double error = 0.0;
  for (std::size_t k = 0; 2 * k < n; ++k) error += pmf(k);
  if (n % 2 == 0) error += 0.5 * pmf(n / 2); // sign(0)=+1 errs on half the ties
  return error;
}

double coin_floor(std::size_t n, double beta, double c_l) {
  return std::exp(-c_l * beta * beta * static_cast<double>(n)) / c_l;
}

const char* learner_kind_name(LearnerKind k) {
  switch (k) {
    case LearnerKind::MajorityOracle: return "majority";
    case LearnerKind::CheatConcept: return "cheat_concept";
    case LearnerKind::AllOnes: return "all_ones";
    case LearnerKind::RandomGuess: return "random_guess";
    case LearnerKind::NaiveBoost: return "naive_boost";
  }
  return "unknown";
}

namespace {

class AllOnesClient final : public ProtocolClient {
public:
  std::vector<Query> make_queries(int, const SampleView&,
                                  const std::vector<std::vector<Response>>&) override {
    return {};
  }
  PackedRow final_hypothesis(const SampleView& view,
                             const std::vector<std::vector<Response>>&) override {
    PackedRow out(view.domain);
    for (std::size_t i = 0; i < view.domain; ++i) out.set_sign(i, 1);
    return out;
  }
};

class RandomGuessClient final : public ProtocolClient {
public:
  explicit RandomGuessClient(std::uint64_t seed) : seed_(seed) {}

  std::vector<Query> make_queries(int, const SampleView&,
                                  const std::vector<std::vector<Response>>&) override {
    return {};
  }
  PackedRow final_hypothesis(const SampleView& view,
                             const std::vector<std::vector<Response>>&) override {
    RngStream stream(seed_);
    PackedRow out(view.domain);
    for (std::size_t i = 0; i < view.domain; ++i) {
      const std::uint32_t idx = static_cast<std::uint32_t>(i);
      out.set_sign(i, view.in_sample(idx) ? view.label_of(idx) : stream.next_sign());
    }
    return out;
  }

private:
  std::uint64_t seed_;
};

// Sequential reweighting over the distinct sample points, one query per
// round with the live distribution; the final vote extends over the whole
// domain because responses are full rows.
class NaiveBoostClient final : public ProtocolClient {
public:
  std::vector<Query> make_queries(int, const SampleView& view,
                                  const std::vector<std::vector<Response>>& history) override {
    Query query;
    query.indices = view.distinct;
    query.labels = view.distinct_labels;
    query.weights = replay_weights(view, history);
    return {std::move(query)};
  }

  PackedRow final_hypothesis(const SampleView& view,
                             const std::vector<std::vector<Response>>& history) override {
    std::vector<double> votes(view.domain, 0.0);
    std::vector<double> weights(view.distinct.size(),
                                1.0 / static_cast<double>(view.distinct.size()));
    for (const auto& responses : history) {
      if (responses.empty()) continue;
      const PackedRow& h = *responses.front();
      const double alpha = step(view, weights, h);
      if (alpha <= 0.0) continue;
      for (std::size_t i = 0; i < view.domain; ++i)
        votes[i] += alpha * h.sign(i);
    }
    PackedRow out(view.domain);
    for (std::size_t i = 0; i < view.domain; ++i) {
      const std::uint32_t idx = static_cast<std::uint32_t>(i);
      if (view.in_sample(idx))
        out.set_sign(i, view.label_of(idx));
      else
        out.set_sign(i, votes[i] >= 0.0 ? 1 : -1);
    }
    return out;
  }

private:
  static double step(const SampleView& view, std::vector<double>& weights,
                     const PackedRow& h) {
    double eps = 0.0;
    for (std::size_t j = 0; j < view.distinct.size(); ++j)
      if (h.sign(view.distinct[j]) != view.distinct_labels[j]) eps += weights[j];
    if (eps >= 0.5) return 0.0;
    const double alpha = 0.5 * std::log((1.0 - eps) / std::max(eps, 1e-6));
    double z = 0.0;
    for (std::size_t j = 0; j < view.distinct.size(); ++j) {
      const int agree =
          h.sign(view.distinct[j]) == view.distinct_labels[j] ? 1 : -1;
      weights[j] *= std::exp(-alpha * agree);
      z += weights[j];
    }
    for (double& w : weights) w /= z;
    return alpha;
  }

  // Queries must be a pure function of (view, history): rebuild the weight
  // vector from scratch every round.
  static std::vector<double> replay_weights(
      const SampleView& view, const std::vector<std::vector<Response>>& history) {
    std::vector<double> weights(view.distinct.size(),
                                1.0 / static_cast<double>(view.distinct.size()));
    for (const auto& responses : history) {
      if (responses.empty()) continue;
      step(view, weights, *responses.front());
    }
    return weights;
  }
};

double domain_loss(const PackedRow& hypothesis, const HardInstance& instance) {
  const std::size_t agree = hypothesis.agreement_count(instance.concept_row());
  return 1.0 -
         static_cast<double>(agree) / static_cast<double>(instance.domain());
}

double theorem_floor(const HardInstanceParams& params, int t) {
  const double cl = params.constants.c_l;
  const double cb = params.constants.c_b;
  const double exponent =
      -cl * cb * cb * params.gamma * params.gamma * params.R * params.p;
  const double head = std::exp(exponent) / (4.0 * cl);
  const double sample_term =
      std::exp(-static_cast<double>(params.m) * std::exp(exponent) / (8.0 * cl));
  const double halt_term = static_cast<double>(params.p) * t *
                           std::exp(-static_cast<double>(params.R) * params.d);
  return head * (1.0 - sample_term - halt_term);
}

} // namespace

std::vector<LossEstimate> measure_expected_loss_paired(
    const std::vector<LearnerKind>& kinds, const MeasureParams& params,
    std::uint64_t seed) {
  require(params.trials >= 1, ErrorKind::InvalidArgument, "need trials >= 1");
  require(!kinds.empty(), ErrorKind::InvalidArgument, "no learners given");
  params.instance.validate();

  const std::size_t domain = params.instance.domain();
  std::vector<double> sum(kinds.size(), 0.0), sum_sq(kinds.size(), 0.0);
  std::vector<std::size_t> halts(kinds.size(), 0);

  for (std::size_t trial = 0; trial < params.trials; ++trial) {
    const HardInstance instance =
        generate_instance(params.instance, derive_seed(seed, 0x1157ULL, trial));
    RngStream draw_stream = derive_stream(seed, 0xd1357ULL, trial);
    std::vector<std::uint32_t> draws(params.instance.m);
    for (auto& x : draws)
      x = static_cast<std::uint32_t>(draw_stream.next_below(domain));
    const SampleView view = make_sample_view(instance, std::move(draws));

    for (std::size_t li = 0; li < kinds.size(); ++li) {
      double loss = 0.0;
      switch (kinds[li]) {
        case LearnerKind::MajorityOracle:
          loss = domain_loss(majority_decoder(instance, view), instance);
          break;
        case LearnerKind::CheatConcept:
          loss = 0.0;
          break;
        case LearnerKind::AllOnes:
        case LearnerKind::RandomGuess:
        case LearnerKind::NaiveBoost: {
          ExtensionOptions options;
          options.p = params.instance.p;
          options.t = params.t;
          options.gamma = params.instance.gamma;
          ExtensionResult run_result;
          if (kinds[li] == LearnerKind::AllOnes) {
            AllOnesClient client;
            run_result = run_extension(client, instance, view, options);
          } else if (kinds[li] == LearnerKind::RandomGuess) {
            RandomGuessClient client(derive_seed(seed, 0x9e55ULL, trial, li));
            run_result = run_extension(client, instance, view, options);
          } else {
            NaiveBoostClient client;
            run_result = run_extension(client, instance, view, options);
          }
          if (run_result.halted_early) ++halts[li];
          loss = domain_loss(run_result.hypothesis, instance);
          break;
        }
      }
      sum[li] += loss;
      sum_sq[li] += loss * loss;
    }
  }

  const double n_trials = static_cast<double>(params.trials);
  const double majority_exact =
      std::pow(1.0 - 1.0 / static_cast<double>(domain),
               static_cast<double>(params.instance.m)) *
      coin_oracle(static_cast<std::size_t>(params.instance.p) * params.instance.R,
                  params.instance.constants.c_b * params.instance.gamma);

  std::vector<LossEstimate> estimates(kinds.size());
  for (std::size_t li = 0; li < kinds.size(); ++li) {
    LossEstimate& e = estimates[li];
    e.trials = params.trials;
    e.mean = sum[li] / n_trials;
    const double variance =
        std::max(0.0, sum_sq[li] / n_trials - e.mean * e.mean);
    e.ci_half_width = 1.96 * std::sqrt(variance / n_trials);
    e.early_halt_rate = static_cast<double>(halts[li]) / n_trials;
    e.analytic_floor = theorem_floor(params.instance, params.t);
    e.majority_exact_error = majority_exact;
  }
  return estimates;
}

LossEstimate measure_expected_loss(LearnerKind kind, const MeasureParams& params,
                                   std::uint64_t seed) {
  return measure_expected_loss_paired({kind}, params, seed).front();
}

} // namespace adv
} // namespace parboost
