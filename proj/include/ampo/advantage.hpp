#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ampo/modes.hpp"
#include "ampo/reward.hpp"

namespace ampo {

/// Mode id used to aggregate malformed outputs.
inline constexpr int kInvalidMode = 0;

inline constexpr double kStdFloor = 1e-8;
inline constexpr double kRewardTieTol = 1e-12;

struct RolloutSample {
  TokenSeq tokens;
  std::vector<double> old_logprobs;
  int mode = kInvalidMode;
  double reward = 0.0;
  int total_len = 0;
  int answer_len = 0;
  RewardBreakdown breakdown;
};

struct ModeAggregate {
  int mode;
  int count;
  double mean_reward;
  double mean_length;
};

struct RolloutGroup {
  int state_id = 0;
  int difficulty = 1;
  std::vector<RolloutSample> samples;

  std::vector<int> modes() const;
  Eigen::VectorXd rewards() const;
  Eigen::VectorXd lengths() const;
  /// Per present mode, in ascending mode id (Invalid first).
  std::vector<ModeAggregate> mode_aggregates() const;
};

/// Population mean / standard deviation z-score; zeros when std < kStdFloor.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> zscore(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Vec v = x;
  const Scalar mean = v.mean();
  const Scalar std = std::sqrt((v.array() - mean).square().mean());
  if (std < Scalar(kStdFloor)) return Vec::Zero(v.size());
  return (v.array() - mean) / std;
}

/// Sample-level advantage (identical to the GRPO baseline). Requires G >= 2.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> sample_advantage(const Eigen::MatrixBase<Derived>& rewards) {
  if (rewards.size() < 2) throw std::invalid_argument("group size must be at least 2");
  return zscore(rewards);
}

/// Mode-level advantage. When any two rewards differ, the z-score of the
/// sample's mode mean reward across present modes; otherwise the negated tanh
/// of the z-score of the mode mean length.
Eigen::VectorXd mode_advantage(std::span<const int> modes, const Eigen::VectorXd& rewards,
                               const Eigen::VectorXd& lengths);
Eigen::VectorXd mode_advantage(const RolloutGroup& group);

struct AdvantagePair {
  Eigen::VectorXd mode;      // A^M
  Eigen::VectorXd sample;    // A^S
  Eigen::VectorXd combined;  // A^M + A^S, applied to every token of the sample
};

AdvantagePair combine(const Eigen::VectorXd& mode_adv, const Eigen::VectorXd& sample_adv);

}  // namespace ampo
