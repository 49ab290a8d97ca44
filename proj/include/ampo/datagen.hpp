#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ampo/env.hpp"
#include "ampo/modes.hpp"
#include "ampo/policy.hpp"

namespace ampo {

inline constexpr int kCorpusSchemaVersion = 1;

struct BcRow {
  int difficulty = 1;
  Token target = Token::S1;
  int mode = 1;
  TokenSeq tokens;
};

enum class StateCategory { EarlyUnachieved, LateUnachieved, LateAchieved };

std::string_view category_name(StateCategory c);

struct RlStateRow {
  SocialState state;
  StateCategory category;
};

struct RlCorpusConfig {
  int episodes = 1000;
  int early_turns = 3;          // N
  double goal_threshold = 8.0;  // scores at or below this are unachieved
  std::size_t max_len = 40;
};

/// Expert corpus: mode = difficulty, empty action bodies, answer = target
/// strategy plus 0..3 fillers.
std::vector<BcRow> gen_bc_corpus(int n, Rng& rng, const EnvConfig& env = {});

/// Category for a state at 1-based turn `turn` with pre-turn score `score`;
/// nullopt for early turns that already exceed the threshold.
std::optional<StateCategory> categorize(int turn, double score, int early_turns, double goal_threshold);

/// Rolls episodes with `policy` and keeps, per episode, every early-unachieved
/// state, up to two late-unachieved and up to one late-achieved state (sampled
/// without replacement, emitted in turn order).
std::vector<RlStateRow> gen_rl_corpus(const Policy& policy, const RlCorpusConfig& cfg, Rng& rng,
                                      const Judge& judge, const EnvConfig& env = {});

void write_bc_corpus(std::span<const BcRow> rows, const std::filesystem::path& path);
std::vector<BcRow> read_bc_corpus(const std::filesystem::path& path);
void write_rl_corpus(std::span<const RlStateRow> rows, const std::filesystem::path& path);
std::vector<RlStateRow> read_rl_corpus(const std::filesystem::path& path);

}  // namespace ampo
