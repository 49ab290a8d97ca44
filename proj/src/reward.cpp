#include "ampo/reward.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include <httplib.h>

namespace ampo {

AnswerReward answer_reward(double goal_before, double goal_after) {
  auto in_range = [](double s) { return s >= 0.0 && s <= 10.0; };
  if (!in_range(goal_before) || !in_range(goal_after)) throw std::invalid_argument("goal scores must lie in [0, 10]");

  const double g = goal_after - goal_before;
  double scaled = 0.0;
  if (g > 0.0) {
    scaled = g / (10.0 - goal_before);
  } else if (g < 0.0) {
    scaled = g / goal_before;
  }
  return {scaled, (scaled + 1.0) / 2.0};
}

double length_reward(int answer_len, const RewardConfig& cfg) {
  const double delta = static_cast<double>(answer_len - cfg.target_answer_len);
  return (std::clamp(-cfg.length_alpha * delta, -1.0, 1.0) + 1.0) / 2.0;
}

RewardBreakdown total_reward(const FormatVerdict& verdict, double goal_before, double goal_after,
                             const RewardConfig& cfg) {
  RewardBreakdown b;
  b.goal_before = goal_before;
  if (!verdict.valid) {
    b.goal_after = goal_before;
    b.total = cfg.format_penalty;
    return b;
  }
  const auto [scaled, ra] = answer_reward(goal_before, goal_after);
  const double rl = length_reward(verdict.answer_len, cfg);
  b.format_ok = true;
  b.goal_after = goal_after;
  b.raw_delta = goal_after - goal_before;
  b.scaled_delta = scaled;
  b.answer_reward = ra;
  b.length_reward = rl;
  b.total = ra * rl;
  return b;
}

namespace {

std::optional<double> score_field(const nlohmann::json& j) {
  if (!j.is_object()) return std::nullopt;
  if (auto it = j.find("score"); it != j.end()) {
    if (it->is_number()) return it->get<double>();
    if (it->is_string()) {
      const std::string s = it->get<std::string>();
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (!s.empty() && end == s.c_str() + s.size()) return v;
    }
    return std::nullopt;
  }
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      if (auto inner = value.find("score"); inner != value.end()) return score_field(value);
    }
  }
  return std::nullopt;
}

}  // namespace

double parse_judge_score(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw JudgeError(std::string("judge response is not JSON: ") + e.what());
  }
  const auto score = score_field(j);
  if (!score || !std::isfinite(*score)) throw JudgeError("judge response has no usable score field");
  if (*score < 0.0 || *score > 10.0) {
    std::cerr << "warning: judge score " << *score << " outside [0, 10], clamping\n";
    return std::clamp(*score, 0.0, 10.0);
  }
  return *score;
}

nlohmann::json judge_request(const SocialState& state) {
  auto history = nlohmann::json::array();
  for (const auto& u : state.history) {
    history.push_back({{"speaker", u.speaker == Speaker::Learner ? "learner" : "partner"}, {"tokens", token_names(u.tokens)}});
  }
  return {{"history", history},
          {"goal", {{"difficulty", state.scenario.difficulty}, {"target", token_name(state.scenario.target)}}}};
}

HttpJudge::HttpJudge(HttpJudgeConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.url.empty()) throw std::invalid_argument("remote judge URL is empty");
}

double HttpJudge::score(const SocialState& state, const FormatVerdict& verdict) const {
  if (!verdict.valid) throw std::invalid_argument("remote judge called on a malformed output");
  SocialState after = state;
  after.history.push_back({Speaker::Learner, verdict.answer_tokens});
  const std::string body = judge_request(after).dump();

  httplib::Client client(cfg_.url);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());

  std::string last_error;
  for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
    auto res = client.Post("/score", body, "application/json");
    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP status " + std::to_string(res->status);
      continue;
    }
    try {
      return parse_judge_score(res->body);
    } catch (const JudgeError& e) {
      last_error = e.what();
    }
  }
  throw JudgeError("remote judge failed after " + std::to_string(cfg_.retries + 1) + " attempts: " + last_error);
}

}  // namespace ampo
