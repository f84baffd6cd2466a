// Command-line driver for the parboost shared library. All functionality is
// reached through the C API in parboost.h; this file only parses arguments
// and formats output.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "parboost.h"

namespace {

struct ConfigDeleter {
  void operator()(pb_config* c) const { pb_config_free(c); }
};
struct ResultDeleter {
  void operator()(pb_result* r) const { pb_result_free(r); }
};
using ConfigPtr = std::unique_ptr<pb_config, ConfigDeleter>;
using ResultPtr = std::unique_ptr<pb_result, ResultDeleter>;

int fail_with(pb_status status) {
  std::fprintf(stderr, "error (%s): %s\n", pb_status_name(status),
               pb_last_error_message());
  return 1;
}

struct Overrides {
  std::string seed;
  std::string out;
  std::string parallelism;
  std::string mode; // forced by the subcommand when non-empty
};

ConfigPtr load_config(const std::string& path, const Overrides& overrides,
                      pb_status* status) {
  pb_config* raw = nullptr;
  *status = pb_config_load(path.c_str(), &raw);
  if (*status != PB_OK) return nullptr;
  ConfigPtr config(raw);
  const auto set = [&](const char* key, const std::string& value) {
    if (*status == PB_OK && !value.empty())
      *status = pb_config_set(config.get(), key, value.c_str());
  };
  set("experiment.seed", overrides.seed);
  set("experiment.out", overrides.out);
  set("experiment.parallelism", overrides.parallelism);
  set("experiment.mode", overrides.mode);
  if (*status != PB_OK) return nullptr;
  return config;
}

int report_result(const pb_result* result) {
  const bool passed = pb_result_passed(result) != 0;
  nlohmann::json record;
  try {
    record = nlohmann::json::parse(pb_result_json(result));
  } catch (...) {
    // fall through with an empty record
  }

  if (record.contains("checks")) {
    for (const auto& check : record["checks"]) {
      std::printf("%s  %s\n", check.value("ok", false) ? "[pass]" : "[FAIL]",
                  check.value("name", std::string("?")).c_str());
    }
  }
  if (record.contains("metrics") && record["metrics"].contains("loss_mean")) {
    std::printf("loss = %.6g +- %.3g (95%%), majority exact = %.6g, floor = %.6g\n",
                record["metrics"].value("loss_mean", 0.0),
                record["metrics"].value("loss_ci_half_width", 0.0),
                record["metrics"].value("majority_exact_error", 0.0),
                record["metrics"].value("analytic_floor", 0.0));
  }
  if (record.contains("metrics") && record["metrics"].contains("min_margin") &&
      !record["metrics"]["min_margin"].is_null()) {
    std::printf("min margin = %.8g\n", record["metrics"].value("min_margin", 0.0));
  }
  const char* csv = pb_result_csv_path(result);
  if (csv && *csv) std::printf("csv: %s\n", csv);
  std::printf("%s (mode=%s)\n", passed ? "PASSED" : "FAILED",
              record.value("mode", std::string("?")).c_str());
  return passed ? 0 : 1;
}

int run_with_config(const std::string& path, const Overrides& overrides,
                    bool grid) {
  pb_status status = PB_OK;
  ConfigPtr config = load_config(path, overrides, &status);
  if (!config) return fail_with(status);
  pb_result* raw = nullptr;
  status = grid ? pb_grid(config.get(), &raw) : pb_run(config.get(), &raw);
  if (status != PB_OK) return fail_with(status);
  ResultPtr result(raw);
  return report_result(result.get());
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"parallel boosting experiments"};
  app.require_subcommand(1);

  Overrides overrides;
  std::string config_path;

  const auto add_common = [&](CLI::App* cmd, bool with_config) {
    if (with_config)
      cmd->add_option("config", config_path, "config file (key = value sections)")
          ->required();
    cmd->add_option("--seed", overrides.seed, "override experiment.seed");
    cmd->add_option("--out", overrides.out, "override experiment.out");
    cmd->add_option("--parallelism", overrides.parallelism,
                    "override experiment.parallelism");
  };

  CLI::App* cmd_run = app.add_subcommand("run", "execute the mode named in the config");
  add_common(cmd_run, true);

  CLI::App* cmd_grid = app.add_subcommand("grid", "run the (p, R, t) tradeoff grid");
  add_common(cmd_grid, true);

  CLI::App* cmd_adversary =
      app.add_subcommand("adversary", "run the lower-bound simulation");
  add_common(cmd_adversary, true);

  CLI::App* cmd_verify = app.add_subcommand("verify", "run the identity suite");
  std::uint64_t verify_seed = 0;
  cmd_verify->add_option("--seed", verify_seed, "suite seed");

  CLI::App* cmd_oracle =
      app.add_subcommand("oracle", "exact majority-vote coin error");
  std::uint64_t oracle_n = 1;
  double oracle_beta = 0.0;
  cmd_oracle->add_option("--n", oracle_n, "number of flips")->required();
  cmd_oracle->add_option("--beta", oracle_beta, "coin bias in [0, 1/2)")->required();

  CLI11_PARSE(app, argc, argv);

  if (cmd_run->parsed()) return run_with_config(config_path, overrides, false);
  if (cmd_grid->parsed()) return run_with_config(config_path, overrides, true);
  if (cmd_adversary->parsed()) {
    overrides.mode = "adversary";
    return run_with_config(config_path, overrides, false);
  }
  if (cmd_verify->parsed()) {
    pb_result* raw = nullptr;
    const pb_status status = pb_verify(verify_seed, &raw);
    if (status != PB_OK) return fail_with(status);
    ResultPtr result(raw);
    return report_result(result.get());
  }
  if (cmd_oracle->parsed()) {
    double value = 0.0;
    const pb_status status = pb_coin_oracle(oracle_n, oracle_beta, &value);
    if (status != PB_OK) return fail_with(status);
    std::printf("%.12g\n", value);
    return 0;
  }
  return 1;
}
