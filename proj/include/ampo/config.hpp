#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ampo/datagen.hpp"
#include "ampo/env.hpp"
#include "ampo/eval.hpp"
#include "ampo/reward.hpp"
#include "ampo/trainer.hpp"

namespace ampo {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat run configuration. Every key has a default; files and --key=value
/// overrides may only set known keys, with the default's JSON type.
class RunConfig {
 public:
  RunConfig();

  static const nlohmann::json& defaults();

  void merge_file(const std::filesystem::path& path);
  void merge(const nlohmann::json& obj);
  /// Parses `value` according to the type of `key`'s default. Dashes in the
  /// key are treated as underscores.
  void set(std::string_view key, std::string_view value);

  const nlohmann::json& json() const { return values_; }

  std::filesystem::path out_dir() const;
  std::uint64_t seed() const;
  Algorithm algorithm() const;

  TrainConfig train() const;
  BcConfig bc() const;
  RewardConfig reward() const;
  EnvConfig env() const;
  RlCorpusConfig rl_corpus() const;
  EvalConfig eval() const;
  int bc_rows() const;
  std::optional<HttpJudgeConfig> remote_judge() const;

  /// Throws ConfigError on an inconsistent configuration.
  void validate() const;

 private:
  nlohmann::json values_;
};

/// Per-purpose seeds derived from the run seed.
std::uint64_t stage_seed(std::uint64_t seed, std::string_view stage);

}  // namespace ampo
