#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>

#include "ampo/env.hpp"
#include "ampo/modes.hpp"

namespace ampo {

struct RewardConfig {
  int target_answer_len = 5;
  double length_alpha = 1.0 / 3.0;
  double format_penalty = -2.0;
};

struct RewardBreakdown {
  std::optional<double> answer_reward;  // r^a
  std::optional<double> length_reward;  // r^l
  bool format_ok = false;
  double total = 0.0;
  double goal_before = 0.0;
  double goal_after = 0.0;
  double raw_delta = 0.0;     // g
  double scaled_delta = 0.0;  // g-hat
};

struct AnswerReward {
  double scaled_delta;
  double reward;
};

/// Boundary-aware scaling of the goal-score change, mapped to [0, 1].
AnswerReward answer_reward(double goal_before, double goal_after);

/// (clip(-alpha * (l^a - l^t), -1, 1) + 1) / 2.
double length_reward(int answer_len, const RewardConfig& cfg = {});

/// r^a * r^l for well-formed output, the format penalty otherwise.
/// `goal_after` is ignored when the verdict is invalid.
RewardBreakdown total_reward(const FormatVerdict& verdict, double goal_before, double goal_after,
                             const RewardConfig& cfg = {});

struct JudgeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HttpJudgeConfig {
  std::string url;  // e.g. http://127.0.0.1:8080
  std::chrono::milliseconds timeout{5000};
  int retries = 2;
};

/// Parses a judge response body: the first "score" field found (number or
/// numeric string, top-level or nested one object deep), clamped to [0, 10].
/// Throws JudgeError when no usable score is present.
double parse_judge_score(const std::string& body);

/// Request body for POST /score.
nlohmann::json judge_request(const SocialState& state);

/// Remote judge over HTTP POST /score. The post-turn history is the current
/// history plus the learner's answer.
class HttpJudge final : public Judge {
 public:
  explicit HttpJudge(HttpJudgeConfig cfg);
  double score(const SocialState& state, const FormatVerdict& verdict) const override;

 private:
  HttpJudgeConfig cfg_;
};

}  // namespace ampo
