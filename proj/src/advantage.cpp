#include "ampo/advantage.hpp"

#include <map>
#include <stdexcept>

namespace ampo {

std::vector<int> RolloutGroup::modes() const {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.mode);
  return out;
}

Eigen::VectorXd RolloutGroup::rewards() const {
  Eigen::VectorXd r(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) r(static_cast<Eigen::Index>(i)) = samples[i].reward;
  return r;
}

Eigen::VectorXd RolloutGroup::lengths() const {
  Eigen::VectorXd l(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) l(static_cast<Eigen::Index>(i)) = samples[i].total_len;
  return l;
}

namespace {

std::vector<ModeAggregate> aggregate(std::span<const int> modes, const Eigen::VectorXd& rewards,
                                     const Eigen::VectorXd& lengths) {
  std::map<int, ModeAggregate> acc;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    auto [it, fresh] = acc.try_emplace(modes[i], ModeAggregate{modes[i], 0, 0.0, 0.0});
    it->second.count += 1;
    it->second.mean_reward += rewards(static_cast<Eigen::Index>(i));
    it->second.mean_length += lengths(static_cast<Eigen::Index>(i));
  }
  std::vector<ModeAggregate> out;
  for (auto& [mode, a] : acc) {
    a.mean_reward /= a.count;
    a.mean_length /= a.count;
    out.push_back(a);
  }
  return out;
}

}  // namespace

std::vector<ModeAggregate> RolloutGroup::mode_aggregates() const {
  const auto m = modes();
  return aggregate(m, rewards(), lengths());
}

Eigen::VectorXd mode_advantage(std::span<const int> modes, const Eigen::VectorXd& rewards,
                               const Eigen::VectorXd& lengths) {
  const auto g = static_cast<Eigen::Index>(modes.size());
  if (rewards.size() != g || lengths.size() != g) throw std::invalid_argument("mode_advantage: size mismatch");
  if (g < 2) throw std::invalid_argument("group size must be at least 2");

  const auto aggs = aggregate(modes, rewards, lengths);
  const auto k = static_cast<Eigen::Index>(aggs.size());
  const bool rewards_differ = rewards.maxCoeff() - rewards.minCoeff() > kRewardTieTol;

  Eigen::VectorXd per_mode(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    per_mode(j) = rewards_differ ? aggs[static_cast<std::size_t>(j)].mean_reward
                                 : aggs[static_cast<std::size_t>(j)].mean_length;
  }
  Eigen::VectorXd z = zscore(per_mode);
  if (!rewards_differ) z = -z.array().tanh();

  Eigen::VectorXd out(g);
  for (Eigen::Index i = 0; i < g; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      if (aggs[static_cast<std::size_t>(j)].mode == modes[static_cast<std::size_t>(i)]) out(i) = z(j);
    }
  }
  return out;
}

Eigen::VectorXd mode_advantage(const RolloutGroup& group) {
  const auto m = group.modes();
  return mode_advantage(m, group.rewards(), group.lengths());
}

AdvantagePair combine(const Eigen::VectorXd& mode_adv, const Eigen::VectorXd& sample_adv) {
  if (mode_adv.size() != sample_adv.size()) throw std::invalid_argument("combine: size mismatch");
  return {mode_adv, sample_adv, mode_adv + sample_adv};
}

}  // namespace ampo
