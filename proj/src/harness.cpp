#include "parboost/harness.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "parallel_slots.hpp"
#include "parboost/adversary.hpp"
#include "parboost/diagnostics.hpp"
#include "parboost/engine.hpp"
#include "parboost/log.hpp"

namespace parboost {
namespace harness {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double elapsed_s(std::chrono::steady_clock::time_point begin,
                 std::chrono::steady_clock::time_point end) {
  return std::chrono::duration<double>(end - begin).count();
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorKind::Io, "cannot write " + path.string());
  out << content;
  require(out.good(), ErrorKind::Io, "write failed: " + path.string());
}

void append_record_line(const fs::path& out_dir, const std::string& line) {
  std::ofstream out(out_dir / "records.jsonl", std::ios::app);
  require(out.good(), ErrorKind::Io,
          "cannot append to " + (out_dir / "records.jsonl").string());
  out << line << "\n";
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::Io, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::unique_ptr<WeakLearner> make_learner(const ExperimentConfig& config,
                                          const Dataset& dataset) {
  if (config.weak_learner == "stump") return std::make_unique<StumpLearner>();
  if (config.weak_learner == "erm") {
    require(dataset.hclass != nullptr, ErrorKind::InvalidArgument,
            "the erm learner needs a finite hypothesis class "
            "(use a planted dataset or pick engine.weak_learner = stump)");
    return std::make_unique<FiniteClassErmLearner>(dataset.hclass);
  }
  fail(ErrorKind::Parse, "unknown weak learner: " + config.weak_learner);
}

adv::LearnerKind parse_adversary_learner(const std::string& name) {
  if (name == "majority") return adv::LearnerKind::MajorityOracle;
  if (name == "cheat_concept") return adv::LearnerKind::CheatConcept;
  if (name == "all_ones") return adv::LearnerKind::AllOnes;
  if (name == "random_guess") return adv::LearnerKind::RandomGuess;
  if (name == "naive_boost") return adv::LearnerKind::NaiveBoost;
  fail(ErrorKind::Parse, "unknown adversary learner: " + name);
}

std::string dataset_identity(const ExperimentConfig& config, const Dataset& dataset) {
  if (config.dataset.source == "csv") return read_file_bytes(config.dataset.path);
  return dataset.description;
}

std::string metrics_csv_text(const BoostTrace& trace, const diag::KlReport& report) {
  std::string csv = "step,round,alpha,Z,kl_to_round_start,trichotomy_label,"
                    "pool_best_advantage\n";
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const StepRecord& step = trace.steps[i];
    const diag::StepDiagnostics& sd = report.steps[i];
    csv += std::to_string(i + 1);
    csv += ',';
    csv += std::to_string(sd.round);
    csv += ',';
    csv += fmt_double(step.alpha);
    csv += ',';
    csv += fmt_double(step.z);
    csv += ',';
    csv += fmt_double(sd.kl_to_round_start);
    csv += ',';
    csv += diag::trichotomy_label_name(sd.label);
    csv += ',';
    csv += fmt_double(step.pool_best_advantage);
    csv += '\n';
  }
  return csv;
}

} // namespace

std::string content_hash(const std::string& bytes) {
  std::string framed = "blob " + std::to_string(bytes.size());
  framed += '\0';
  framed += bytes;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  const int ok = EVP_Digest(framed.data(), framed.size(), digest, &len,
                            EVP_sha1(), nullptr);
  require(ok == 1, ErrorKind::Internal, "digest computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

LabeledSample load_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Io, "cannot open dataset: " + path);

  const auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
  };
  const auto trim = [](std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
      s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
      s.pop_back();
    return s;
  };

  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::Parse,
          path + ": empty file (missing header)");
  const std::vector<std::string> header = split(line);
  std::ptrdiff_t label_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (trim(header[c]) == "label") label_col = static_cast<std::ptrdiff_t>(c);
  require(label_col >= 0, ErrorKind::Parse,
          path + ": header must contain a column named \"label\"");

  LabeledSample sample;
  std::vector<double> raw_labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split(line);
    require(cells.size() == header.size(), ErrorKind::Parse,
            path + ": line " + std::to_string(line_no) + ": expected " +
                std::to_string(header.size()) + " cells, got " +
                std::to_string(cells.size()));
    std::vector<double> features;
    features.reserve(header.size() - 1);
    double label_value = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string cell = trim(cells[c]);
      double value = 0.0;
      try {
        std::size_t used = 0;
        value = std::stod(cell, &used);
        require(used == cell.size(), ErrorKind::Parse, "");
      } catch (...) {
        fail(ErrorKind::Parse, path + ": line " + std::to_string(line_no) +
                                   ": non-numeric cell \"" + cell + "\"");
      }
      if (static_cast<std::ptrdiff_t>(c) == label_col)
        label_value = value;
      else
        features.push_back(value);
    }
    raw_labels.push_back(label_value);
    sample.points.push_back(std::move(features));
  }
  require(!raw_labels.empty(), ErrorKind::Parse, path + ": no data rows");

  bool pm_one = true, zero_one = true;
  for (double y : raw_labels) {
    if (y != -1.0 && y != 1.0) pm_one = false;
    if (y != 0.0 && y != 1.0) zero_one = false;
  }
  if (pm_one) {
    for (double y : raw_labels)
      sample.labels.push_back(y > 0 ? 1 : -1);
  } else if (zero_one) {
    log_warn(path + ": labels are {0,1}; mapping 0 -> -1, 1 -> +1");
    for (double y : raw_labels)
      sample.labels.push_back(y > 0.5 ? 1 : -1);
  } else {
    fail(ErrorKind::Parse, path + ": labels must be in {-1,+1} or {0,1}");
  }
  sample.validate();
  return sample;
}

Dataset materialize_dataset(const DatasetSpec& spec, std::uint64_t seed) {
  Dataset dataset;
  if (spec.source == "csv") {
    dataset.sample = load_csv(spec.path);
    dataset.description = "csv:" + spec.path;
    return dataset;
  }
  if (spec.source == "planted") {
    PlantedVoteInstance planted = plant_vote_instance(
        spec.m, spec.class_size, spec.voters, spec.gamma_star, seed);
    dataset.sample = std::move(planted.sample);
    dataset.hclass = std::move(planted.hclass);
    dataset.planted_margin = planted.planted_margin;
    dataset.description = "planted:m=" + std::to_string(spec.m) +
                          ",class=" + std::to_string(spec.class_size) +
                          ",voters=" + std::to_string(spec.voters) +
                          ",gamma_star=" + fmt_double(spec.gamma_star) +
                          ",seed=" + std::to_string(seed);
    return dataset;
  }
  if (spec.source == "stumps1d") {
    // Realizable threshold data: a hidden stump labels uniform points.
    RngStream stream = derive_stream(seed, 0x57b3ULL);
    const std::size_t features = std::max<std::size_t>(1, spec.features);
    const Stump hidden{stream.next_below(features),
                       stream.next_double(), stream.next_sign() > 0 ? 1 : -1};
    dataset.sample.points.resize(spec.m);
    dataset.sample.labels.resize(spec.m);
    for (std::size_t i = 0; i < spec.m; ++i) {
      std::vector<double> x(features);
      for (double& v : x) v = stream.next_double();
      dataset.sample.labels[i] = static_cast<std::int8_t>(hidden.predict(x));
      dataset.sample.points[i] = std::move(x);
    }
    dataset.description = "stumps1d:m=" + std::to_string(spec.m) +
                          ",features=" + std::to_string(features) +
                          ",seed=" + std::to_string(seed);
    dataset.sample.validate();
    return dataset;
  }
  fail(ErrorKind::Parse, "unknown dataset source: " + spec.source);
}

std::int64_t pool_size_bound(int R, int d, double c_n, double delta,
                             std::int64_t cap) {
  require(R >= 1 && d >= 1, ErrorKind::InvalidArgument, "need R, d >= 1");
  require(delta > 0.0 && delta < 1.0, ErrorKind::InvalidArgument,
          "delta must lie in (0, 1)");
  require(cap >= 1, ErrorKind::InvalidArgument, "cap must be >= 1");
  const double log_reps = 16.0 * c_n * static_cast<double>(d) * R;
  const std::int64_t retries = static_cast<std::int64_t>(
      std::ceil(std::log(static_cast<double>(R) / delta)));
  if (log_reps > 42.0) return cap; // bound exceeds any desk-scale budget
  const double value = std::ceil(std::exp(log_reps)) *
                       static_cast<double>(std::max<std::int64_t>(1, retries));
  if (value >= static_cast<double>(cap)) return cap;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(value));
}

namespace {

struct BoostOutcome {
  json record_json;
  bool passed = false;
  std::string metrics_csv;
};

BoostOutcome execute_boost(const ExperimentConfig& config, bool baseline) {
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset dataset =
      materialize_dataset(config.dataset, derive_seed(config.seed, 0xda7aULL));
  const std::unique_ptr<WeakLearner> learner = make_learner(config, dataset);

  EngineConfig engine_config = config.engine;
  engine_config.seed = config.seed;
  engine_config.parallelism = config.parallelism;
  if (baseline) {
    engine_config.full_sample_debug = true;
    engine_config.R = 1;
    engine_config.t = 1;
  }

  const RunResult result = run(engine_config, dataset.sample, *learner);
  const auto t1 = std::chrono::steady_clock::now();

  const diag::KlReport kl_report =
      diag::build_kl_report(result.trace, dataset.sample, /*strict=*/false);
  const MarginReport margin_report =
      certify_margins(result.classifier, dataset.sample, result.trace);

  const double z_cap =
      std::sqrt(1.0 - engine_config.gamma * engine_config.gamma) + 1e-12;
  double max_z_excess = 0.0;
  for (const StepRecord& step : result.trace.steps)
    if (step.accepted) max_z_excess = std::max(max_z_excess, step.z - z_cap);
  const bool z_bound_ok = max_z_excess <= 0.0;

  const bool calls_ok =
      result.trace.weak_learner_calls ==
      static_cast<std::size_t>(engine_config.p) * engine_config.t;
  const bool residual_ok = kl_report.max_abs_residual < 1e-8;

  double exp_loss_rel_err = margin_report.exp_loss_rel_err;
  bool exp_loss_ok = margin_report.exp_loss_identity_ok;
  if (margin_report.degenerate) {
    exp_loss_rel_err = std::abs(std::expm1(
        exp_loss_identity_gap(result.classifier, dataset.sample, result.trace)));
    exp_loss_ok = exp_loss_rel_err <= 1e-9;
  }

  const bool passed = exp_loss_ok && z_bound_ok && residual_ok && calls_ok &&
                      kl_report.negation_checks_ok &&
                      margin_report.counting_bound_ok;
  const auto t2 = std::chrono::steady_clock::now();

  json round_z;
  if (result.trace.p <= 512) {
    for (int k = 0; k < result.trace.p; ++k)
      round_z.push_back(round_log_z_product(result.trace, k));
  }
  std::size_t rounds_ok = 0;
  const double round_target = -engine_config.gamma * engine_config.gamma *
                              result.trace.rounds_per_batch / 2.0;
  for (int k = 0; k < result.trace.p; ++k)
    if (round_log_z_product(result.trace, k) < round_target) ++rounds_ok;

  BoostOutcome outcome;
  outcome.passed = passed;
  outcome.metrics_csv = metrics_csv_text(result.trace, kl_report);

  json& record = outcome.record_json;
  record["params"] = {
      {"m", dataset.sample.size()},
      {"gamma", engine_config.gamma},
      {"p", engine_config.p},
      {"R", baseline ? 1 : engine_config.R},
      {"t", baseline ? 1 : engine_config.t},
      {"n", result.trace.n},
      {"seed", config.seed},
      {"parallelism", config.parallelism},
      {"weak_learner", config.weak_learner},
      {"dataset", dataset.description},
  };
  record["metrics"] = {
      {"degenerate", result.trace.degenerate},
      {"min_margin", margin_report.degenerate ? json() : json(margin_report.min_margin)},
      {"count_below_gamma_over_8", margin_report.count_below_threshold},
      {"margin_counting_bound", margin_report.counting_bound},
      {"weak_learner_calls", result.trace.weak_learner_calls},
      {"exp_loss_rel_err", exp_loss_rel_err},
      {"max_telescoping_residual", kl_report.max_abs_residual},
      {"max_z_excess", max_z_excess},
      {"rounds_progressed", rounds_ok},
      {"rounds_total", result.trace.p},
      {"round_log_z_products", round_z},
      {"trichotomy_counts",
       {{"LOW_KL", kl_report.low_kl_count},
        {"PROGRESS", kl_report.progress_count},
        {"NEGATION_ADVANTAGE", kl_report.negation_count}}},
  };
  record["verdicts"] = {
      {"exp_loss_identity", exp_loss_ok},
      {"z_bound", z_bound_ok},
      {"telescoping", residual_ok},
      {"call_accounting", calls_ok},
      {"trichotomy_negation_checks", kl_report.negation_checks_ok},
      {"margin_counting_bound", margin_report.counting_bound_ok},
  };
  record["wall_clock"] = {
      {"engine_s", elapsed_s(t0, t1)},
      {"diagnostics_s", elapsed_s(t1, t2)},
  };
  record["dataset_identity"] = dataset_identity(config, dataset);
  return outcome;
}

json execute_adversary(const ExperimentConfig& config, bool* passed) {
  const adv::LearnerKind kind = parse_adversary_learner(config.adversary_learner);
  const adv::LossEstimate estimate =
      adv::measure_expected_loss(kind, config.adversary, config.seed);
  *passed = true; // measurement mode: completion is the contract
  json record;
  record["params"] = {
      {"m", config.adversary.instance.m},
      {"d", config.adversary.instance.d},
      {"p", config.adversary.instance.p},
      {"R", config.adversary.instance.R},
      {"t", config.adversary.t},
      {"gamma", config.adversary.instance.gamma},
      {"c_s", config.adversary.instance.constants.c_s},
      {"c_b", config.adversary.instance.constants.c_b},
      {"c_l", config.adversary.instance.constants.c_l},
      {"trials", config.adversary.trials},
      {"learner", adv::learner_kind_name(kind)},
      {"seed", config.seed},
  };
  record["metrics"] = {
      {"loss_mean", estimate.mean},
      {"loss_ci_half_width", estimate.ci_half_width},
      {"early_halt_rate", estimate.early_halt_rate},
      {"analytic_floor", estimate.analytic_floor},
      {"majority_exact_error", estimate.majority_exact_error},
  };
  return record;
}

json execute_oracle(const ExperimentConfig& config, bool* passed) {
  const double value = adv::coin_oracle(config.oracle_n, config.oracle_beta);
  *passed = true;
  json record;
  record["params"] = {{"n", config.oracle_n}, {"beta", config.oracle_beta}};
  record["metrics"] = {{"oracle_value", value}};
  record["oracle_value"] = value;
  return record;
}

struct VerifyCheck {
  std::string name;
  bool ok = false;
  double observed = 0.0;
};

std::vector<VerifyCheck> verify_checks(std::uint64_t seed) {
  std::vector<VerifyCheck> checks;

  // Seeded micro runs: every exact identity at full strictness.
  double worst_exp = 0.0, worst_residual = 0.0, worst_z_excess = -1.0;
  bool negations_ok = true, calls_ok = true, counting_ok = true;
  for (int s = 0; s < 5; ++s) {
    PlantedVoteInstance planted =
        plant_vote_instance(60, 8, 3, 0.2, derive_seed(seed, 0x7e57ULL, s));
    FiniteClassErmLearner learner = planted.make_learner();
    EngineConfig config;
    config.gamma = 0.1;
    config.p = 4;
    config.R = 3;
    config.t = 12;
    config.seed = derive_seed(seed, 0x5eedULL, s);
    config.parallelism = 2;
    const RunResult result = run(config, planted.sample, learner);

    worst_exp = std::max(
        worst_exp, std::abs(std::expm1(exp_loss_identity_gap(
                       result.classifier, planted.sample, result.trace))));
    const diag::KlReport report =
        diag::build_kl_report(result.trace, planted.sample, /*strict=*/false);
    worst_residual = std::max(worst_residual, report.max_abs_residual);
    negations_ok = negations_ok && report.negation_checks_ok;
    const double z_cap = std::sqrt(1.0 - config.gamma * config.gamma) + 1e-12;
    for (const StepRecord& step : result.trace.steps)
      if (step.accepted) worst_z_excess = std::max(worst_z_excess, step.z - z_cap);
    calls_ok = calls_ok && result.trace.weak_learner_calls ==
                               static_cast<std::size_t>(config.p) * config.t;
    const MarginReport mr =
        certify_margins(result.classifier, planted.sample, result.trace);
    counting_ok = counting_ok && mr.counting_bound_ok;
  }
  checks.push_back({"exp_loss_identity_rel_err<=1e-9", worst_exp <= 1e-9, worst_exp});
  checks.push_back(
      {"telescoping_residual<1e-8", worst_residual < 1e-8, worst_residual});
  checks.push_back({"z_bound_accepted_steps", worst_z_excess <= 0.0, worst_z_excess});
  checks.push_back({"trichotomy_negation_checks", negations_ok, 0.0});
  checks.push_back({"weak_learner_call_accounting", calls_ok, 0.0});
  checks.push_back({"margin_counting_bound", counting_ok, 0.0});

  // Analytic two-point normalization factor at gamma = 0.2.
  {
    LabeledSample two;
    two.labels = {1, 1};
    const Hypothesis h = Hypothesis::table({1, -1}); // advantage exactly gamma/2
    const WeightDistribution d(std::vector<double>{0.6, 0.4});
    const auto [next, z] = boost_step(d, h, learning_rate(0.2), two);
    const double target = 0.97979589711327124; // sqrt(1 - 0.2^2)
    checks.push_back(
        {"two_point_z==sqrt(1-gamma^2)", std::abs(z - target) <= 1e-6, z});
  }

  // Duality slack over random triples plus the equality case.
  {
    RngStream stream = derive_stream(seed, 0xd0a1ULL);
    double min_slack = 1.0;
    for (int trial = 0; trial < 10000; ++trial) {
      const std::size_t support = 2 + stream.next_below(7);
      std::vector<double> pw(support), qw(support), x(support);
      for (std::size_t i = 0; i < support; ++i) {
        pw[i] = 0.05 + stream.next_double();
        qw[i] = 0.05 + stream.next_double();
        x[i] = 6.0 * stream.next_double() - 3.0;
      }
      WeightDistribution p(pw), q(qw);
      p.normalize();
      q.normalize();
      min_slack = std::min(min_slack, diag::duality_certificate(p, q, x).slack);
    }
    checks.push_back({"duality_slack>=-1e-10", min_slack >= -1e-10, min_slack});

    WeightDistribution p(std::vector<double>{0.3, 0.7});
    const diag::DualityCertificate eq =
        diag::duality_certificate(p, p, {1.25, 1.25});
    checks.push_back({"duality_equality_case", std::abs(eq.slack) <= 1e-12, eq.slack});
  }

  // Coin-oracle spot values.
  {
    const double v3 = adv::coin_oracle(3, 0.1);
    checks.push_back({"coin_oracle(3,0.1)==0.352", std::abs(v3 - 0.352) <= 1e-12, v3});
    double worst = 0.0;
    for (int b = 0; b <= 9; ++b) {
      const double beta = 0.05 * b;
      worst = std::max(worst, std::abs(adv::coin_oracle(1, beta) - (0.5 - beta)));
    }
    checks.push_back({"coin_oracle(1,beta)==1/2-beta", worst <= 1e-12, worst});
  }
  return checks;
}

} // namespace

RunRecord run_verify_suite(std::uint64_t seed) {
  const std::vector<VerifyCheck> checks = verify_checks(seed);
  bool passed = true;
  json list = json::array();
  for (const VerifyCheck& check : checks) {
    passed = passed && check.ok;
    list.push_back({{"name", check.name}, {"ok", check.ok}, {"observed", check.observed}});
  }
  json record;
  record["schema_version"] = kRecordSchemaVersion;
  record["code_version"] = kCodeVersion;
  record["mode"] = "verify";
  record["params"] = {{"seed", seed}};
  record["checks"] = list;
  record["passed"] = passed;

  RunRecord result;
  result.passed = passed;
  result.mode = "verify";
  result.json = record.dump();
  return result;
}

RunRecord run_experiment(const ExperimentConfig& config) {
  config.validate();
  const fs::path out_dir(config.out_dir);
  fs::create_directories(out_dir);

  bool passed = false;
  json record;
  std::string metrics_csv;

  switch (config.mode) {
    case RunMode::Boost:
    case RunMode::AdaboostBaseline: {
      BoostOutcome outcome =
          execute_boost(config, config.mode == RunMode::AdaboostBaseline);
      passed = outcome.passed;
      record = std::move(outcome.record_json);
      metrics_csv = std::move(outcome.metrics_csv);
      break;
    }
    case RunMode::Adversary:
      record = execute_adversary(config, &passed);
      break;
    case RunMode::Oracle:
      record = execute_oracle(config, &passed);
      break;
    case RunMode::Verify: {
      RunRecord verify = run_verify_suite(config.seed);
      // Re-parse to attach the common envelope below.
      record = json::parse(verify.json);
      passed = verify.passed;
      break;
    }
  }

  const std::string dataset_bytes =
      record.contains("dataset_identity") ? record["dataset_identity"].get<std::string>()
                                          : std::string();
  record.erase("dataset_identity");

  RunRecord result;
  result.mode = run_mode_name(config.mode);
  result.passed = passed;
  result.input_hash = content_hash(config.raw.canonical_text() + "\n" +
                                   dataset_bytes + "\n" + kCodeVersion);

  record["schema_version"] = kRecordSchemaVersion;
  record["metrics_schema_version"] = kMetricsSchemaVersion;
  record["code_version"] = kCodeVersion;
  record["mode"] = result.mode;
  record["input_hash"] = result.input_hash;
  record["config"] = config.raw.entries();
  record["passed"] = passed;

  if (!metrics_csv.empty()) {
    const fs::path csv_path = out_dir / (config.run_name + "_metrics.csv");
    write_text_file(csv_path, metrics_csv);
    result.metrics_csv_path = csv_path.string();
    record["outputs"] = {{"metrics_csv", result.metrics_csv_path}};
  }

  result.json = record.dump();
  append_record_line(out_dir, result.json);
  return result;
}

namespace {

struct GridRow {
  std::string kind;
  std::int64_t R = 0;
  std::int64_t p = 0;
  std::int64_t t = 0;
  std::uint64_t seed = 0;
  bool has_margin = false;
  double min_margin = 0.0;
  bool margin_ok = false;
  double log_z_product = 0.0;
  double rounds_ok_fraction = 0.0;
  std::string learner;
  bool has_loss = false;
  double loss = 0.0;
  double ci = 0.0;
  std::string status = "ok";
};

std::string grid_csv_text(const std::vector<GridRow>& rows) {
  std::string csv =
      "kind,R,p,t,seed,min_margin,margin_ok,log_z_product,rounds_ok_fraction,"
      "learner,loss,ci,status\n";
  for (const GridRow& row : rows) {
    csv += row.kind;
    csv += ',';
    csv += std::to_string(row.R);
    csv += ',';
    csv += std::to_string(row.p);
    csv += ',';
    csv += std::to_string(row.t);
    csv += ',';
    csv += std::to_string(row.seed);
    csv += ',';
    if (row.has_margin) {
      csv += fmt_double(row.min_margin);
      csv += ',';
      csv += row.margin_ok ? "1" : "0";
      csv += ',';
      csv += fmt_double(row.log_z_product);
      csv += ',';
      csv += fmt_double(row.rounds_ok_fraction);
    } else {
      csv += ",,,";
    }
    csv += ',';
    csv += row.learner;
    csv += ',';
    if (row.has_loss) {
      csv += fmt_double(row.loss);
      csv += ',';
      csv += fmt_double(row.ci);
    } else {
      csv += ',';
    }
    csv += ',';
    csv += row.status;
    csv += '\n';
  }
  return csv;
}

std::vector<GridRow> run_upper_grid(const ExperimentConfig& config) {
  struct Point {
    std::int64_t R;
    std::size_t seed_idx;
  };
  std::vector<Point> points;
  for (std::int64_t R : config.grid_R)
    for (std::size_t s = 0; s < config.grid_seeds; ++s) points.push_back({R, s});

  std::vector<GridRow> rows(points.size());
  detail::parallel_slots(points.size(), config.parallelism, [&](std::size_t idx) {
    const Point& point = points[idx];
    GridRow& row = rows[idx];
    row.kind = "upper";
    row.R = point.R;
    row.seed = derive_seed(config.seed, 0x96dULL, point.seed_idx);
    try {
      const Dataset dataset = materialize_dataset(
          config.dataset, derive_seed(config.seed, 0xda7aULL, point.seed_idx));
      const std::unique_ptr<WeakLearner> learner = make_learner(config, dataset);

      EngineConfig engine_config = config.engine;
      engine_config.R = static_cast<int>(point.R);
      const double gamma = engine_config.gamma;
      const double m = static_cast<double>(dataset.sample.size());
      engine_config.p = static_cast<int>(
          std::ceil(4.0 * std::log(m) / (gamma * gamma * point.R)));
      const int d = learner->reported_dimension(dataset.sample);
      engine_config.t = static_cast<int>(
          point.R * pool_size_bound(static_cast<int>(point.R), d,
                                    engine_config.c_n, config.grid_delta,
                                    config.grid_pool_cap));
      engine_config.seed = row.seed;
      engine_config.parallelism = 1; // grid points already run in parallel
      row.p = engine_config.p;
      row.t = engine_config.t;

      const RunResult result = run(engine_config, dataset.sample, *learner);
      row.has_margin = !result.trace.degenerate;
      if (row.has_margin) {
        row.min_margin = min_margin(result.classifier, dataset.sample);
        row.margin_ok = row.min_margin > gamma / 8.0;
      }
      double log_z = 0.0;
      std::size_t rounds_ok = 0;
      const double target = -gamma * gamma * engine_config.R / 2.0;
      for (int k = 0; k < engine_config.p; ++k) {
        const double round_z = round_log_z_product(result.trace, k);
        log_z += round_z;
        if (round_z < target) ++rounds_ok;
      }
      row.log_z_product = log_z;
      row.rounds_ok_fraction =
          static_cast<double>(rounds_ok) / static_cast<double>(engine_config.p);
    } catch (const std::exception& e) {
      row.status = std::string("error:") + e.what();
    }
  });
  return rows;
}

std::vector<GridRow> run_adversary_grid(const ExperimentConfig& config) {
  struct Point {
    std::int64_t R;
    std::int64_t p;
  };
  std::vector<Point> points;
  for (std::int64_t R : config.grid_R)
    for (std::int64_t p : config.grid_p) points.push_back({R, p});

  const std::vector<adv::LearnerKind> kinds = {
      adv::LearnerKind::MajorityOracle, adv::LearnerKind::AllOnes,
      adv::LearnerKind::RandomGuess, adv::LearnerKind::NaiveBoost};

  std::vector<std::vector<GridRow>> per_point(points.size());
  detail::parallel_slots(points.size(), config.parallelism, [&](std::size_t idx) {
    const Point& point = points[idx];
    adv::MeasureParams params = config.adversary;
    params.instance.R = static_cast<int>(point.R);
    params.instance.p = static_cast<int>(point.p);
    const std::uint64_t seed = derive_seed(config.seed, 0xadeULL, idx);
    try {
      const std::vector<adv::LossEstimate> estimates =
          adv::measure_expected_loss_paired(kinds, params, seed);
      for (std::size_t li = 0; li < kinds.size(); ++li) {
        GridRow row;
        row.kind = "adversary";
        row.R = point.R;
        row.p = point.p;
        row.t = params.t;
        row.seed = seed;
        row.learner = adv::learner_kind_name(kinds[li]);
        row.has_loss = true;
        row.loss = estimates[li].mean;
        row.ci = estimates[li].ci_half_width;
        per_point[idx].push_back(std::move(row));
      }
    } catch (const std::exception& e) {
      GridRow row;
      row.kind = "adversary";
      row.R = point.R;
      row.p = point.p;
      row.t = params.t;
      row.seed = seed;
      row.status = std::string("error:") + e.what();
      per_point[idx].push_back(std::move(row));
    }
  });

  std::vector<GridRow> rows;
  for (auto& block : per_point)
    for (auto& row : block) rows.push_back(std::move(row));
  return rows;
}

} // namespace

RunRecord tradeoff_grid(const ExperimentConfig& config) {
  config.validate();
  const fs::path out_dir(config.out_dir);
  fs::create_directories(out_dir);

  std::vector<GridRow> rows;
  if (config.grid_kind == "upper") {
    rows = run_upper_grid(config);
  } else if (config.grid_kind == "adversary") {
    rows = run_adversary_grid(config);
  } else {
    fail(ErrorKind::Parse, "unknown grid kind: " + config.grid_kind);
  }

  bool all_ok = true;
  for (const GridRow& row : rows) all_ok = all_ok && row.status == "ok";

  RunRecord result;
  result.mode = "grid";
  result.passed = all_ok;
  result.input_hash =
      content_hash(config.raw.canonical_text() + "\n" + harness::kCodeVersion);

  const std::string csv = grid_csv_text(rows);
  const fs::path csv_path = out_dir / (config.run_name + "_grid.csv");
  write_text_file(csv_path, csv);
  result.grid_csv_path = csv_path.string();

  json record;
  record["schema_version"] = kRecordSchemaVersion;
  record["code_version"] = kCodeVersion;
  record["mode"] = "grid";
  record["grid_kind"] = config.grid_kind;
  record["input_hash"] = result.input_hash;
  record["config"] = config.raw.entries();
  record["rows"] = rows.size();
  record["outputs"] = {{"grid_csv", result.grid_csv_path}};
  record["passed"] = all_ok;
  result.json = record.dump();
  append_record_line(out_dir, result.json);
  return result;
}

} // namespace harness
} // namespace parboost
