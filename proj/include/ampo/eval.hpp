#pragma once

#include <array>
#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "ampo/env.hpp"

namespace ampo {

/// Mode frequencies; index 0 = malformed output, 1..4 = modes.
using ModeDistribution = std::array<double, 5>;

inline constexpr int kTurnBuckets = 4;  // turns 1-2, 3-4, 5-6, 7+

struct EvalReport {
  int episodes = 0;
  int turns = 0;
  double mean_terminal_goal = 0.0;
  double mean_tokens_per_turn = 0.0;
  double format_violation_rate = 0.0;
  double mode_match_rate = 0.0;  // chosen mode == scenario difficulty
  ModeDistribution mode_overall{};
  std::array<ModeDistribution, kTurnBuckets> mode_by_turn{};
  std::array<ModeDistribution, 4> mode_by_difficulty{};

  double max_mode_frequency() const;
};

struct EvalConfig {
  int episodes = 400;
  std::uint64_t seed = 17;
  std::size_t max_len = 40;
  EnvConfig env;
};

/// Rolls `cfg.episodes` episodes with difficulties cycling 1..4 and random
/// targets.
EvalReport evaluate(const Policy& policy, const EvalConfig& cfg, const Judge& judge);

nlohmann::json to_json(const EvalReport& r);

/// Rows: metric, a, b, b - a.
std::string compare_csv(const EvalReport& a, const EvalReport& b);
std::string compare_text(const EvalReport& a, const EvalReport& b, const std::string& label_a,
                         const std::string& label_b);

}  // namespace ampo
