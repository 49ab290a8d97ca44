#include "ampo/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <utility>
#include <vector>

namespace ampo {

double EvalReport::max_mode_frequency() const {
  return *std::max_element(mode_overall.begin() + 1, mode_overall.end());
}

namespace {

void normalize(ModeDistribution& d) {
  double total = 0.0;
  for (double x : d) total += x;
  if (total > 0.0)
    for (double& x : d) x /= total;
}

nlohmann::json dist_json(const ModeDistribution& d) {
  return {{"invalid", d[0]}, {"mode1", d[1]}, {"mode2", d[2]}, {"mode3", d[3]}, {"mode4", d[4]}};
}

std::vector<std::pair<std::string, double>> headline(const EvalReport& r) {
  std::vector<std::pair<std::string, double>> rows = {
      {"mean_terminal_goal", r.mean_terminal_goal},
      {"mean_tokens_per_turn", r.mean_tokens_per_turn},
      {"format_violation_rate", r.format_violation_rate},
      {"mode_match_rate", r.mode_match_rate},
  };
  for (int k = 1; k <= 4; ++k) rows.emplace_back("frac_mode" + std::to_string(k), r.mode_overall[static_cast<std::size_t>(k)]);
  rows.emplace_back("frac_invalid", r.mode_overall[0]);
  return rows;
}

}  // namespace

EvalReport evaluate(const Policy& policy, const EvalConfig& cfg, const Judge& judge) {
  EvalReport r;
  r.episodes = cfg.episodes;
  if (cfg.episodes <= 0) {
    r.episodes = 0;
    return r;
  }
  Rng rng(cfg.seed);
  int matched = 0, invalid = 0;
  double tokens = 0.0, goal = 0.0;

  for (int e = 0; e < cfg.episodes; ++e) {
    Scenario sc;
    sc.id = e;
    sc.difficulty = e % 4 + 1;
    sc.target = strategy_token(rng.uniform_int(1, kNumStrategies));
    sc.max_turns = cfg.env.max_turns;
    const Episode ep = run_episode(policy, sc, rng, cfg.max_len, judge, cfg.env);
    goal += ep.terminal_score;

    for (const auto& t : ep.turns) {
      const int mode = t.verdict.valid ? *t.verdict.mode : 0;
      const auto m = static_cast<std::size_t>(mode);
      const auto bucket = static_cast<std::size_t>(std::min(t.state.turn / 2, kTurnBuckets - 1));
      r.mode_overall[m] += 1;
      r.mode_by_turn[bucket][m] += 1;
      r.mode_by_difficulty[static_cast<std::size_t>(sc.difficulty - 1)][m] += 1;
      tokens += static_cast<double>(t.output.tokens.size());
      invalid += t.verdict.valid ? 0 : 1;
      matched += mode == sc.difficulty ? 1 : 0;
      ++r.turns;
    }
  }
  r.mean_terminal_goal = goal / cfg.episodes;
  if (r.turns > 0) {
    r.mean_tokens_per_turn = tokens / r.turns;
    r.format_violation_rate = static_cast<double>(invalid) / r.turns;
    r.mode_match_rate = static_cast<double>(matched) / r.turns;
  }
  normalize(r.mode_overall);
  for (auto& d : r.mode_by_turn) normalize(d);
  for (auto& d : r.mode_by_difficulty) normalize(d);
  return r;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j = {{"episodes", r.episodes},
                      {"turns", r.turns},
                      {"mean_terminal_goal", r.mean_terminal_goal},
                      {"mean_tokens_per_turn", r.mean_tokens_per_turn},
                      {"format_violation_rate", r.format_violation_rate},
                      {"mode_match_rate", r.mode_match_rate},
                      {"mode_distribution", dist_json(r.mode_overall)}};
  const char* buckets[kTurnBuckets] = {"turns_1_2", "turns_3_4", "turns_5_6", "turns_7_plus"};
  for (int b = 0; b < kTurnBuckets; ++b)
    j["mode_by_turn"][buckets[b]] = dist_json(r.mode_by_turn[static_cast<std::size_t>(b)]);
  for (int d = 0; d < 4; ++d)
    j["mode_by_difficulty"]["d" + std::to_string(d + 1)] = dist_json(r.mode_by_difficulty[static_cast<std::size_t>(d)]);
  return j;
}

std::string compare_csv(const EvalReport& a, const EvalReport& b) {
  std::string out = "metric,a,b,delta\n";
  const auto ra = headline(a), rb = headline(b);
  char buf[128];
  for (std::size_t i = 0; i < ra.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s,%.9g,%.9g,%.9g\n", ra[i].first.c_str(), ra[i].second, rb[i].second,
                  rb[i].second - ra[i].second);
    out += buf;
  }
  return out;
}

std::string compare_text(const EvalReport& a, const EvalReport& b, const std::string& label_a,
                         const std::string& label_b) {
  const auto ra = headline(a), rb = headline(b);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-24s %12s %12s %12s\n", "metric", label_a.c_str(), label_b.c_str(), "delta");
  std::string out = buf;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%-24s %12.4f %12.4f %+12.4f\n", ra[i].first.c_str(), ra[i].second, rb[i].second,
                  rb[i].second - ra[i].second);
    out += buf;
  }
  return out;
}

}  // namespace ampo
