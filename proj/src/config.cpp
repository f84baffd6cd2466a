#include "parboost/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace parboost {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0, end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

} // namespace

KvConfig KvConfig::parse_text(const std::string& text, const std::string& origin) {
  KvConfig config;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
    if (stripped.front() == '[') {
      require(stripped.back() == ']', ErrorKind::Parse,
              origin + ":" + std::to_string(line_no) + ": unterminated section header");
      section = trim(stripped.substr(1, stripped.size() - 2));
      require(!section.empty(), ErrorKind::Parse,
              origin + ":" + std::to_string(line_no) + ": empty section name");
      continue;
    }
    const std::size_t eq = stripped.find('=');
    require(eq != std::string::npos, ErrorKind::Parse,
            origin + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    require(!key.empty(), ErrorKind::Parse,
            origin + ":" + std::to_string(line_no) + ": empty key");
    config.set(section.empty() ? key : section + "." + key, value);
  }
  return config;
}

KvConfig KvConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Io, "cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_text(buffer.str(), path);
}

void KvConfig::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

bool KvConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string KvConfig::get_string(const std::string& key) const {
  const auto it = entries_.find(key);
  require(it != entries_.end(), ErrorKind::Parse, "missing config key: " + key);
  return it->second;
}

std::string KvConfig::get_string_or(const std::string& key,
                                    const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double KvConfig::get_double(const std::string& key) const {
  const std::string raw = get_string(key);
  try {
    std::size_t used = 0;
    const double value = std::stod(raw, &used);
    require(used == raw.size(), ErrorKind::Parse,
            "config key " + key + " is not a number: " + raw);
    return value;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorKind::Parse, "config key " + key + " is not a number: " + raw);
  }
}

double KvConfig::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t KvConfig::get_int(const std::string& key) const {
  const std::string raw = get_string(key);
  try {
    std::size_t used = 0;
    const long long value = std::stoll(raw, &used);
    require(used == raw.size(), ErrorKind::Parse,
            "config key " + key + " is not an integer: " + raw);
    return value;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorKind::Parse, "config key " + key + " is not an integer: " + raw);
  }
}

std::int64_t KvConfig::get_int_or(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t KvConfig::get_u64(const std::string& key) const {
  const std::string raw = get_string(key);
  try {
    std::size_t used = 0;
    const unsigned long long value = std::stoull(raw, &used);
    require(used == raw.size(), ErrorKind::Parse,
            "config key " + key + " is not an unsigned integer: " + raw);
    return value;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorKind::Parse, "config key " + key + " is not an unsigned integer: " + raw);
  }
}

bool KvConfig::get_bool_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string raw = get_string(key);
  std::transform(raw.begin(), raw.end(), raw.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
  if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
  fail(ErrorKind::Parse, "config key " + key + " is not a boolean: " + raw);
}

std::vector<std::int64_t> KvConfig::get_int_list_or(
    const std::string& key, const std::vector<std::int64_t>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<std::int64_t> values;
  std::stringstream in(get_string(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    const std::string token = trim(item);
    if (token.empty()) continue;
    try {
      values.push_back(std::stoll(token));
    } catch (const std::exception&) {
      fail(ErrorKind::Parse, "config key " + key + " has a bad list item: " + token);
    }
  }
  require(!values.empty(), ErrorKind::Parse, "config key " + key + " lists no values");
  return values;
}

std::string KvConfig::canonical_text() const {
  // std::map keeps entries sorted; emit section headers on change.
  std::string out;
  std::string section;
  for (const auto& [key, value] : entries_) {
    const std::size_t dot = key.find('.');
    const std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
    const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
    if (sec != section) {
      section = sec;
      out += "[" + section + "]\n";
    }
    out += name + " = " + value + "\n";
  }
  return out;
}

const char* run_mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::Boost: return "boost";
    case RunMode::AdaboostBaseline: return "adaboost-baseline";
    case RunMode::Adversary: return "adversary";
    case RunMode::Oracle: return "oracle";
    case RunMode::Verify: return "verify";
  }
  return "unknown";
}

RunMode parse_run_mode(const std::string& name) {
  if (name == "boost") return RunMode::Boost;
  if (name == "adaboost-baseline") return RunMode::AdaboostBaseline;
  if (name == "adversary") return RunMode::Adversary;
  if (name == "oracle") return RunMode::Oracle;
  if (name == "verify") return RunMode::Verify;
  fail(ErrorKind::Parse, "unknown mode: " + name);
}

ExperimentConfig ExperimentConfig::from_kv(const KvConfig& kv) {
  ExperimentConfig config;
  config.raw = kv;

  config.mode = parse_run_mode(kv.get_string_or("experiment.mode", "boost"));
  config.seed_set = kv.has("experiment.seed");
  if (config.seed_set) config.seed = kv.get_u64("experiment.seed");
  config.out_dir = kv.get_string_or("experiment.out", ".");
  config.run_name = kv.get_string_or("experiment.name", "run");
  config.parallelism =
      static_cast<int>(kv.get_int_or("experiment.parallelism", 1));

  config.dataset.source = kv.get_string_or("data.source", "planted");
  config.dataset.path = kv.get_string_or("data.path", "");
  config.dataset.m = static_cast<std::size_t>(kv.get_int_or("data.m", 100));
  config.dataset.class_size =
      static_cast<std::size_t>(kv.get_int_or("data.class_size", 16));
  config.dataset.voters = static_cast<std::size_t>(kv.get_int_or("data.voters", 5));
  config.dataset.gamma_star = kv.get_double_or("data.gamma_star", 0.2);
  config.dataset.features = static_cast<std::size_t>(kv.get_int_or("data.features", 1));

  config.engine.gamma = kv.get_double_or("engine.gamma", 0.1);
  config.engine.p = static_cast<int>(kv.get_int_or("engine.p", 1));
  config.engine.R = static_cast<int>(kv.get_int_or("engine.R", 1));
  config.engine.t = static_cast<int>(kv.get_int_or("engine.t", config.engine.R));
  config.engine.n = static_cast<std::size_t>(kv.get_int_or("engine.n", 0));
  config.engine.c_n = kv.get_double_or("engine.c_n", 1.0);
  config.engine.parallelism = config.parallelism;
  config.engine.select_first = kv.get_bool_or("engine.select_first", false);
  config.engine.store_snapshots = kv.get_bool_or("engine.store_snapshots", true);
  config.engine.sampler =
      kv.get_string_or("engine.sampler", "cdf") == "alias" ? SamplerKind::Alias
                                                           : SamplerKind::Cdf;
  config.weak_learner = kv.get_string_or("engine.weak_learner", "erm");

  config.adversary.instance.m =
      static_cast<std::size_t>(kv.get_int_or("adversary.m", 200));
  config.adversary.instance.d = static_cast<int>(kv.get_int_or("adversary.d", 2));
  config.adversary.instance.p = static_cast<int>(kv.get_int_or("adversary.p", 1));
  config.adversary.instance.R = static_cast<int>(kv.get_int_or("adversary.R", 1));
  config.adversary.instance.gamma = kv.get_double_or("adversary.gamma", 0.1);
  config.adversary.instance.constants.c_s = kv.get_double_or("adversary.c_s", 1.0);
  config.adversary.instance.constants.c_b = kv.get_double_or("adversary.c_b", 1.0);
  config.adversary.instance.constants.c_l = kv.get_double_or("adversary.c_l", 1.0);
  config.adversary.t = static_cast<int>(kv.get_int_or("adversary.t", 1));
  config.adversary.trials =
      static_cast<std::size_t>(kv.get_int_or("adversary.trials", 1000));
  config.adversary_learner = kv.get_string_or("adversary.learner", "majority");

  config.oracle_n = static_cast<std::size_t>(kv.get_int_or("oracle.n", 1));
  config.oracle_beta = kv.get_double_or("oracle.beta", 0.0);

  config.grid_R = kv.get_int_list_or("grid.R", {1});
  config.grid_p = kv.get_int_list_or("grid.p", {1});
  config.grid_pool_cap = kv.get_int_or("grid.pool_cap", 16);
  config.grid_delta = kv.get_double_or("grid.delta", 0.1);
  config.grid_seeds = static_cast<std::size_t>(kv.get_int_or("grid.seeds", 1));
  config.grid_kind = kv.get_string_or("grid.kind", "upper");

  return config;
}

void ExperimentConfig::validate() const {
  require(seed_set, ErrorKind::InvalidArgument,
          "experiment.seed is mandatory (runs must be reproducible)");
  require(parallelism >= 1, ErrorKind::InvalidArgument, "parallelism must be >= 1");
  if (mode == RunMode::Boost || mode == RunMode::AdaboostBaseline) {
    if (dataset.source == "csv") {
      require(!dataset.path.empty(), ErrorKind::InvalidArgument,
              "csv datasets need data.path");
      std::ifstream probe(dataset.path);
      require(probe.good(), ErrorKind::Io,
              "dataset file does not exist: " + dataset.path);
    }
  }
  if (mode == RunMode::Oracle) {
    require(oracle_n >= 1, ErrorKind::InvalidArgument, "oracle.n must be >= 1");
    require(oracle_beta >= 0.0 && oracle_beta < 0.5, ErrorKind::InvalidArgument,
            "oracle.beta must lie in [0, 1/2)");
  }
}

} // namespace parboost
