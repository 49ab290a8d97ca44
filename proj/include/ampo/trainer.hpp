#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ampo/advantage.hpp"
#include "ampo/datagen.hpp"
#include "ampo/env.hpp"
#include "ampo/policy.hpp"
#include "ampo/reward.hpp"

namespace ampo {

enum class Algorithm { Ampo, Grpo };

std::string_view algorithm_name(Algorithm a);
Algorithm algorithm_from_name(std::string_view name);  // "ampo" | "grpo"

struct TrainConfig {
  Algorithm algorithm = Algorithm::Ampo;
  int group_size = 8;
  double clip_eps = 0.2;
  double kl_coef = 0.001;
  double learning_rate = 5e-3;
  int epochs_per_batch = 1;
  int batch_size = 8;
  int total_steps = 500;
  std::uint64_t seed = 17;
  std::size_t max_len = 40;
  RewardConfig reward;

  void validate() const;
};

struct BcConfig {
  int epochs = 100;
  int batch_size = 100;
  double learning_rate = 0.1;
  std::uint64_t seed = 17;
};

struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- behavioral cloning ----------------------------------------------------

struct BcLoss {
  double loss;
  ParamTable<double> grad;
};

/// Mean over rows of the negative sequence log-likelihood, and its gradient.
BcLoss bc_loss_and_grad(const PolicyParams& params, std::span<const BcRow> batch);

// ---- objective pieces --------------------------------------------------------

/// rho - log(rho) - 1 with rho = pi_ref / pi_theta.
inline double kl_k3(double logp_theta, double logp_ref) {
  const double log_rho = logp_ref - logp_theta;
  return std::exp(log_rho) - log_rho - 1.0;
}

struct SurrogateTerm {
  double value;
  bool clipped;  // the clipped branch is strictly smaller
};

inline SurrogateTerm surrogate_term(double ratio, double advantage, double eps) {
  const double plain = ratio * advantage;
  const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps) * advantage;
  return clipped < plain ? SurrogateTerm{clipped, true} : SurrogateTerm{plain, false};
}

template <typename Scalar>
struct Adam {
  ParamTable<Scalar> m = ParamTable<Scalar>::Zero(kFeatureCount, kVocabSize);
  ParamTable<Scalar> v = ParamTable<Scalar>::Zero(kFeatureCount, kVocabSize);
  int t = 0;
  Scalar beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  /// One descent step along `grad`.
  template <typename Derived>
  void descend(ParamTable<Scalar>& theta, const Eigen::MatrixBase<Derived>& grad, Scalar lr) {
    ++t;
    m = beta1 * m + (1 - beta1) * grad;
    v = beta2 * v + (1 - beta2) * grad.cwiseAbs2();
    const Scalar c1 = 1 - std::pow(beta1, t);
    const Scalar c2 = 1 - std::pow(beta2, t);
    theta.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }
};

// ---- RL phase ------------------------------------------------------------------

/// One rollout group with its advantages and cached feature paths.
struct ScoredGroup {
  RolloutGroup group;
  AdvantagePair advantage;
  std::vector<std::vector<int>> features;
};

struct ObjectiveEval {
  double value = 0.0;
  ParamTable<double> grad;
  double mean_kl = 0.0;
  double clip_frac = 0.0;
};

/// Mean over samples of the token-mean of (clipped surrogate - beta * k3),
/// with its analytic gradient with respect to `theta`.
ObjectiveEval rl_objective(const PolicyParams& theta, const PolicyParams& ref, std::span<const ScoredGroup> groups,
                           const TrainConfig& cfg);

/// Samples G outputs per state from `old_policy`, scores them and computes
/// advantages per cfg.algorithm.
std::vector<ScoredGroup> collect_rollouts(const PolicyParams& old_policy, std::span<const SocialState> batch,
                                          const TrainConfig& cfg, const Judge& judge, Rng& rng);

struct StepReport {
  int step = 0;
  double mean_reward = 0.0;
  double mean_goal_delta = 0.0;
  double format_violation_rate = 0.0;
  double mean_total_len = 0.0;
  double mean_answer_len = 0.0;
  std::array<double, kNumModes + 1> mode_freq{};  // [0] = invalid, [k] = mode k
  double mean_kl = 0.0;
  double clip_frac = 0.0;
  double surrogate = 0.0;
  double grad_norm = 0.0;
};

struct RlState {
  PolicyParams policy;
  PolicyParams reference;
  Adam<double> adam;
  int step = 0;

  /// Reference snapshot frozen from the starting policy.
  explicit RlState(const PolicyParams& start);
};

using AdvantageSink = std::function<void(int step, const ScoredGroup&)>;

StepReport rl_step(RlState& state, std::span<const SocialState> batch, const TrainConfig& cfg, const Judge& judge,
                   Rng& rng, const AdvantageSink& sink = {});

std::string metrics_csv_header();
std::string metrics_csv_row(const StepReport& r);

// ---- drivers --------------------------------------------------------------------

PolicyParams train_bc(std::span<const BcRow> corpus, const BcConfig& cfg,
                      const std::function<void(int epoch, double loss)>& on_epoch = {});

struct RlRun {
  PolicyParams policy;
  std::vector<StepReport> reports;
};

RlRun train_rl(const PolicyParams& start, std::span<const RlStateRow> corpus, const TrainConfig& cfg,
               const Judge& judge, const std::function<void(const StepReport&)>& on_step = {},
               const AdvantageSink& sink = {});

}  // namespace ampo
