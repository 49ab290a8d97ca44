#include "ampo/env.hpp"

#include <algorithm>
#include <stdexcept>

namespace ampo {

SampledOutput ExpertPolicy::act(const SocialState& state, Rng& rng, std::size_t max_len) const {
  const int mode = forced_mode_.value_or(state.scenario.difficulty);
  TokenSeq answer{state.scenario.target};
  const int fillers = rng.uniform_int(0, 3);
  answer.insert(answer.end(), static_cast<std::size_t>(fillers), Token::Filler);
  SampledOutput out{canonical_scaffold(mode, answer), {}};
  if (out.tokens.size() > max_len) out.tokens.resize(max_len);
  return out;
}

Scenario sample_scenario(Rng& rng, const EnvConfig& cfg, int id) {
  Scenario s;
  s.id = id;
  s.difficulty = rng.uniform_int(1, 4);
  s.target = strategy_token(rng.uniform_int(1, kNumStrategies));
  s.max_turns = cfg.max_turns;
  return s;
}

double judge_score(const SocialState& state, const FormatVerdict& verdict, const EnvConfig& cfg) {
  if (!verdict.valid || !verdict.mode) throw std::invalid_argument("judge_score requires a well-formed output");
  const auto& answer = verdict.answer_tokens;
  const bool hit = std::find(answer.begin(), answer.end(), state.scenario.target) != answer.end();
  const double cap = *verdict.mode >= state.scenario.difficulty ? cfg.max_score : cfg.shallow_cap;
  const double proposed = std::min(cap, state.goal_score + (hit ? cfg.gain : 0.0));
  return std::max(state.goal_score, proposed);
}

TokenSeq partner_reply(const SocialState& /*state*/, Rng& rng) {
  const int len = rng.uniform_int(3, 6);
  TokenSeq reply(static_cast<std::size_t>(len), Token::Filler);
  reply.front() = strategy_token(rng.uniform_int(1, kNumStrategies));
  reply.back() = strategy_token(rng.uniform_int(1, kNumStrategies));
  return reply;
}

Episode run_episode(const Policy& policy, const Scenario& scenario, Rng& rng, std::size_t max_output_len,
                    const Judge& judge, const EnvConfig& cfg) {
  Rng learner_rng(rng.next_u64());
  Rng partner_rng(rng.next_u64());

  Episode ep;
  ep.scenario = scenario;
  SocialState state;
  state.scenario = scenario;

  while (state.turn < scenario.max_turns && state.goal_score < cfg.max_score) {
    EpisodeTurn turn;
    turn.state = state;
    turn.output = policy.act(state, learner_rng, max_output_len);
    turn.verdict = check_format(turn.output.tokens);
    turn.post_score = turn.verdict.valid ? judge.score(state, turn.verdict) : state.goal_score;

    state.history.push_back({Speaker::Learner, turn.verdict.valid ? turn.verdict.answer_tokens : turn.output.tokens});
    state.goal_score = turn.post_score;
    state.turn += 1;
    ep.turns.push_back(std::move(turn));

    state.history.push_back({Speaker::Partner, partner_reply(state, partner_rng)});
  }
  ep.terminal_score = state.goal_score;
  return ep;
}

nlohmann::json to_json(const Scenario& s) {
  return {{"id", s.id}, {"difficulty", s.difficulty}, {"target", token_name(s.target)}, {"max_turns", s.max_turns}};
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  s.id = j.at("id").get<int>();
  s.difficulty = j.at("difficulty").get<int>();
  const auto target = token_from_name(j.at("target").get<std::string>());
  if (!target || !is_strategy(*target)) throw std::invalid_argument("scenario target must be a strategy token");
  if (s.difficulty < 1 || s.difficulty > 4) throw std::invalid_argument("scenario difficulty out of range");
  s.target = *target;
  s.max_turns = j.at("max_turns").get<int>();
  return s;
}

nlohmann::json to_json(const SocialState& s) {
  auto history = nlohmann::json::array();
  for (const auto& u : s.history) {
    history.push_back({{"speaker", u.speaker == Speaker::Learner ? "learner" : "partner"}, {"tokens", token_names(u.tokens)}});
  }
  return {{"scenario", to_json(s.scenario)}, {"turn", s.turn}, {"goal_score", s.goal_score}, {"history", history}};
}

SocialState state_from_json(const nlohmann::json& j) {
  SocialState s;
  s.scenario = scenario_from_json(j.at("scenario"));
  s.turn = j.at("turn").get<int>();
  s.goal_score = j.at("goal_score").get<double>();
  for (const auto& u : j.at("history")) {
    const auto speaker = u.at("speaker").get<std::string>() == "learner" ? Speaker::Learner : Speaker::Partner;
    s.history.push_back({speaker, tokens_from_names(u.at("tokens"))});
  }
  return s;
}

nlohmann::json to_json(const Episode& e) {
  auto turns = nlohmann::json::array();
  for (const auto& t : e.turns) {
    turns.push_back({{"state_score", t.state.goal_score},
                     {"tokens", token_names(t.output.tokens)},
                     {"verdict", to_json(t.verdict)},
                     {"post_score", t.post_score}});
  }
  return {{"scenario", to_json(e.scenario)}, {"turns", turns}, {"terminal_score", e.terminal_score}};
}

}  // namespace ampo
