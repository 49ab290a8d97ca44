#include "ampo/config.hpp"

#include <cstdlib>
#include <fstream>

namespace ampo {

namespace {

std::string normalize_key(std::string_view key) {
  std::string k(key);
  for (char& c : k)
    if (c == '-') c = '_';
  return k;
}

}  // namespace

const nlohmann::json& RunConfig::defaults() {
  static const nlohmann::json d = {
      {"seed", 17},
      {"algorithm", "ampo"},
      {"out", "run"},
      // RL phase
      {"group_size", 8},
      {"clip_eps", 0.2},
      {"kl_coef", 0.001},
      {"learning_rate", 0.005},
      {"epochs_per_batch", 1},
      {"batch_size", 8},
      {"total_steps", 500},
      {"max_len", 40},
      // reward shaping
      {"target_answer_len", 5},
      {"length_alpha", 1.0 / 3.0},
      {"format_penalty", -2.0},
      // environment
      {"gain", 3.0},
      {"shallow_cap", 6.0},
      {"max_turns", 8},
      // behavioral cloning
      {"bc_rows", 4000},
      {"bc_epochs", 100},
      {"bc_batch_size", 100},
      {"bc_learning_rate", 0.1},
      // RL state corpus
      {"rl_episodes", 1000},
      {"early_turns", 3},
      {"goal_threshold", 8.0},
      // evaluation
      {"eval_episodes", 400},
      // remote judge
      {"judge_url", ""},
      {"judge_timeout_ms", 5000},
      {"judge_retries", 2},
  };
  return d;
}

RunConfig::RunConfig() : values_(defaults()) {}

void RunConfig::merge_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  merge(j);
}

void RunConfig::merge(const nlohmann::json& obj) {
  for (const auto& [key, value] : obj.items()) {
    const std::string k = normalize_key(key);
    if (!defaults().contains(k)) throw ConfigError("unknown config key '" + key + "'");
    const auto& def = defaults().at(k);
    const bool compatible = (def.is_number() && value.is_number() && (def.is_number_float() || value.is_number_integer())) ||
                            (def.is_string() && value.is_string());
    if (!compatible) throw ConfigError("config key '" + key + "' has the wrong type");
    values_[k] = value;
  }
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const std::string k = normalize_key(key);
  if (!defaults().contains(k)) throw ConfigError("unknown config key '" + std::string(key) + "'");
  const auto& def = defaults().at(k);
  const std::string v(value);
  char* end = nullptr;
  if (def.is_string()) {
    values_[k] = v;
  } else if (def.is_number_float()) {
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size()) throw ConfigError("'" + k + "' expects a number, got '" + v + "'");
    values_[k] = x;
  } else {
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size()) throw ConfigError("'" + k + "' expects an integer, got '" + v + "'");
    values_[k] = x;
  }
}

std::filesystem::path RunConfig::out_dir() const { return values_.at("out").get<std::string>(); }
std::uint64_t RunConfig::seed() const { return values_.at("seed").get<std::uint64_t>(); }

Algorithm RunConfig::algorithm() const {
  try {
    return algorithm_from_name(values_.at("algorithm").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RewardConfig RunConfig::reward() const {
  RewardConfig r;
  r.target_answer_len = values_.at("target_answer_len").get<int>();
  r.length_alpha = values_.at("length_alpha").get<double>();
  r.format_penalty = values_.at("format_penalty").get<double>();
  return r;
}

EnvConfig RunConfig::env() const {
  EnvConfig e;
  e.gain = values_.at("gain").get<double>();
  e.shallow_cap = values_.at("shallow_cap").get<double>();
  e.max_turns = values_.at("max_turns").get<int>();
  return e;
}

TrainConfig RunConfig::train() const {
  TrainConfig t;
  t.algorithm = algorithm();
  t.group_size = values_.at("group_size").get<int>();
  t.clip_eps = values_.at("clip_eps").get<double>();
  t.kl_coef = values_.at("kl_coef").get<double>();
  t.learning_rate = values_.at("learning_rate").get<double>();
  t.epochs_per_batch = values_.at("epochs_per_batch").get<int>();
  t.batch_size = values_.at("batch_size").get<int>();
  t.total_steps = values_.at("total_steps").get<int>();
  t.seed = seed();
  t.max_len = values_.at("max_len").get<std::size_t>();
  t.reward = reward();
  return t;
}

BcConfig RunConfig::bc() const {
  BcConfig b;
  b.epochs = values_.at("bc_epochs").get<int>();
  b.batch_size = values_.at("bc_batch_size").get<int>();
  b.learning_rate = values_.at("bc_learning_rate").get<double>();
  b.seed = stage_seed(seed(), "bc-train");
  return b;
}

RlCorpusConfig RunConfig::rl_corpus() const {
  RlCorpusConfig c;
  c.episodes = values_.at("rl_episodes").get<int>();
  c.early_turns = values_.at("early_turns").get<int>();
  c.goal_threshold = values_.at("goal_threshold").get<double>();
  c.max_len = values_.at("max_len").get<std::size_t>();
  return c;
}

EvalConfig RunConfig::eval() const {
  EvalConfig e;
  e.episodes = values_.at("eval_episodes").get<int>();
  e.seed = stage_seed(seed(), "eval");
  e.max_len = values_.at("max_len").get<std::size_t>();
  e.env = env();
  return e;
}

int RunConfig::bc_rows() const { return values_.at("bc_rows").get<int>(); }

std::optional<HttpJudgeConfig> RunConfig::remote_judge() const {
  std::string url = values_.at("judge_url").get<std::string>();
  if (const char* env_url = std::getenv("AMPO_LAB_JUDGE_URL"); env_url && *env_url) url = env_url;
  if (url.empty()) return std::nullopt;
  HttpJudgeConfig c;
  c.url = url;
  c.timeout = std::chrono::milliseconds(values_.at("judge_timeout_ms").get<long>());
  c.retries = values_.at("judge_retries").get<int>();
  return c;
}

void RunConfig::validate() const {
  try {
    train().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (values_.at("seed").get<long long>() < 0) throw ConfigError("seed must be non-negative");
  if (bc_rows() < 1) throw ConfigError("bc_rows must be at least 1");
  if (values_.at("bc_epochs").get<int>() < 1) throw ConfigError("bc_epochs must be at least 1");
  if (values_.at("bc_batch_size").get<int>() < 1) throw ConfigError("bc_batch_size must be at least 1");
  if (!(values_.at("bc_learning_rate").get<double>() > 0.0)) throw ConfigError("bc_learning_rate must be positive");
  if (values_.at("rl_episodes").get<int>() < 1) throw ConfigError("rl_episodes must be at least 1");
  if (values_.at("early_turns").get<int>() < 0) throw ConfigError("early_turns must be non-negative");
  if (values_.at("max_turns").get<int>() < 1) throw ConfigError("max_turns must be at least 1");
  if (values_.at("eval_episodes").get<int>() < 0) throw ConfigError("eval_episodes must be non-negative");
  const auto e = env();
  if (!(e.gain >= 0.0) || !(e.shallow_cap >= 0.0 && e.shallow_cap <= e.max_score))
    throw ConfigError("gain must be non-negative and shallow_cap within [0, 10]");
}

std::uint64_t stage_seed(std::uint64_t seed, std::string_view stage) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : stage) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return derive_seed(seed, {h});
}

}  // namespace ampo
