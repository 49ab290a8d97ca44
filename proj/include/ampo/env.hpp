#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ampo/modes.hpp"
#include "ampo/rng.hpp"

namespace ampo {

/// Scorer and horizon constants for the synthetic social game.
struct EnvConfig {
  double gain = 3.0;          // score gained when the answer names the target strategy
  double shallow_cap = 6.0;   // ceiling for modes shallower than the scenario difficulty
  double max_score = 10.0;
  int max_turns = 8;
};

struct Scenario {
  int id = 0;
  int difficulty = 1;  // 1..4
  Token target = Token::S1;
  int max_turns = 8;
};

enum class Speaker { Learner, Partner };

struct Utterance {
  Speaker speaker;
  TokenSeq tokens;
};

struct SocialState {
  Scenario scenario;
  int turn = 0;  // learner turns completed so far
  double goal_score = 0.0;
  std::vector<Utterance> history;
};

struct SampledOutput {
  TokenSeq tokens;
  std::vector<double> logprobs;  // empty for scripted policies
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual SampledOutput act(const SocialState& state, Rng& rng, std::size_t max_len) const = 0;
};

/// Scripted expert: emits mode = difficulty (or a forced mode) and an answer
/// holding the target strategy followed by 0..3 fillers.
class ExpertPolicy final : public Policy {
 public:
  explicit ExpertPolicy(std::optional<int> forced_mode = std::nullopt) : forced_mode_(forced_mode) {}
  SampledOutput act(const SocialState& state, Rng& rng, std::size_t max_len) const override;

 private:
  std::optional<int> forced_mode_;
};

/// Goal-score port; the oracle is the default, a remote client lives in reward.hpp.
class Judge {
 public:
  virtual ~Judge() = default;
  /// Post-turn goal score in [0, 10] for a well-formed output.
  virtual double score(const SocialState& state, const FormatVerdict& verdict) const = 0;
};

Scenario sample_scenario(Rng& rng, const EnvConfig& cfg = {}, int id = 0);

/// min(cap, s + gain) where cap is the full score when mode >= difficulty and
/// the shallow cap otherwise; never below the current score. Throws
/// std::invalid_argument for an invalid verdict.
double judge_score(const SocialState& state, const FormatVerdict& verdict, const EnvConfig& cfg = {});

class OracleJudge final : public Judge {
 public:
  explicit OracleJudge(EnvConfig cfg = {}) : cfg_(cfg) {}
  double score(const SocialState& state, const FormatVerdict& verdict) const override {
    return judge_score(state, verdict, cfg_);
  }

 private:
  EnvConfig cfg_;
};

/// Scripted partner: 3..6 content tokens.
TokenSeq partner_reply(const SocialState& state, Rng& rng);

struct EpisodeTurn {
  SocialState state;  // before the learner speaks
  SampledOutput output;
  FormatVerdict verdict;
  double post_score = 0.0;
};

struct Episode {
  Scenario scenario;
  std::vector<EpisodeTurn> turns;
  double terminal_score = 0.0;
};

Episode run_episode(const Policy& policy, const Scenario& scenario, Rng& rng, std::size_t max_output_len,
                    const Judge& judge, const EnvConfig& cfg = {});

nlohmann::json to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SocialState& s);
SocialState state_from_json(const nlohmann::json& j);
/// One JSON-lines record: {scenario, turns:[{state_score, tokens, verdict, post_score}]}.
nlohmann::json to_json(const Episode& e);

}  // namespace ampo
