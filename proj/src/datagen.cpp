#include "ampo/datagen.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace ampo {

std::string_view category_name(StateCategory c) {
  switch (c) {
    case StateCategory::EarlyUnachieved: return "early_unachieved";
    case StateCategory::LateUnachieved: return "late_unachieved";
    case StateCategory::LateAchieved: return "late_achieved";
  }
  return "?";
}

namespace {

StateCategory category_from_name(std::string_view name) {
  for (auto c : {StateCategory::EarlyUnachieved, StateCategory::LateUnachieved, StateCategory::LateAchieved}) {
    if (category_name(c) == name) return c;
  }
  throw std::invalid_argument("unknown state category: " + std::string(name));
}

void check_schema(const nlohmann::json& j, const std::filesystem::path& path) {
  if (j.value("schema_version", -1) != kCorpusSchemaVersion)
    throw std::runtime_error("unsupported corpus schema version in " + path.string());
}

// Picks up to k of `items` without replacement, preserving their order.
std::vector<std::size_t> pick(std::vector<std::size_t> items, std::size_t k, Rng& rng) {
  if (items.size() <= k) return items;
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(items.size() - i - 1)));
    std::swap(items[i], items[j]);
  }
  items.resize(k);
  std::sort(items.begin(), items.end());
  return items;
}

}  // namespace

std::vector<BcRow> gen_bc_corpus(int n, Rng& rng, const EnvConfig& env) {
  if (n < 1) throw std::invalid_argument("corpus size must be at least 1");
  const ExpertPolicy expert;
  std::vector<BcRow> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    SocialState state;
    state.scenario = sample_scenario(rng, env, i);
    auto out = expert.act(state, rng, 64);
    rows.push_back({state.scenario.difficulty, state.scenario.target, state.scenario.difficulty, std::move(out.tokens)});
  }
  return rows;
}

std::optional<StateCategory> categorize(int turn, double score, int early_turns, double goal_threshold) {
  const bool achieved = score > goal_threshold;
  if (turn <= early_turns) return achieved ? std::nullopt : std::optional(StateCategory::EarlyUnachieved);
  return achieved ? StateCategory::LateAchieved : StateCategory::LateUnachieved;
}

std::vector<RlStateRow> gen_rl_corpus(const Policy& policy, const RlCorpusConfig& cfg, Rng& rng, const Judge& judge,
                                      const EnvConfig& env) {
  std::vector<RlStateRow> rows;
  for (int e = 0; e < cfg.episodes; ++e) {
    const Scenario scenario = sample_scenario(rng, env, e);
    const Episode ep = run_episode(policy, scenario, rng, cfg.max_len, judge, env);

    std::vector<std::size_t> early, late_open, late_done;
    for (std::size_t i = 0; i < ep.turns.size(); ++i) {
      const auto& s = ep.turns[i].state;
      const auto cat = categorize(s.turn + 1, s.goal_score, cfg.early_turns, cfg.goal_threshold);
      if (!cat) continue;
      switch (*cat) {
        case StateCategory::EarlyUnachieved: early.push_back(i); break;
        case StateCategory::LateUnachieved: late_open.push_back(i); break;
        case StateCategory::LateAchieved: late_done.push_back(i); break;
      }
    }
    std::vector<std::pair<std::size_t, StateCategory>> kept;
    for (auto i : early) kept.emplace_back(i, StateCategory::EarlyUnachieved);
    for (auto i : pick(late_open, 2, rng)) kept.emplace_back(i, StateCategory::LateUnachieved);
    for (auto i : pick(late_done, 1, rng)) kept.emplace_back(i, StateCategory::LateAchieved);
    std::sort(kept.begin(), kept.end());
    for (const auto& [i, cat] : kept) rows.push_back({ep.turns[i].state, cat});
  }
  return rows;
}

void write_bc_corpus(std::span<const BcRow> rows, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  for (const auto& r : rows) {
    nlohmann::json j = {{"schema_version", kCorpusSchemaVersion},
                        {"difficulty", r.difficulty},
                        {"target", token_name(r.target)},
                        {"mode", r.mode},
                        {"tokens", token_names(r.tokens)}};
    os << j.dump() << '\n';
  }
}

std::vector<BcRow> read_bc_corpus(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("missing corpus: " + path.string());
  std::vector<BcRow> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    check_schema(j, path);
    BcRow r;
    r.difficulty = j.at("difficulty").get<int>();
    r.target = token_from_name(j.at("target").get<std::string>()).value_or(Token::S1);
    r.mode = j.at("mode").get<int>();
    r.tokens = tokens_from_names(j.at("tokens"));
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_rl_corpus(std::span<const RlStateRow> rows, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  for (const auto& r : rows) {
    nlohmann::json j = {
        {"schema_version", kCorpusSchemaVersion}, {"category", category_name(r.category)}, {"state", to_json(r.state)}};
    os << j.dump() << '\n';
  }
}

std::vector<RlStateRow> read_rl_corpus(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("missing corpus: " + path.string());
  std::vector<RlStateRow> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    check_schema(j, path);
    rows.push_back({state_from_json(j.at("state")), category_from_name(j.at("category").get<std::string>())});
  }
  return rows;
}

}  // namespace ampo
