#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "ampo/env.hpp"
#include "ampo/modes.hpp"
#include "ampo/rng.hpp"

namespace ampo {

enum class SlotClass : std::uint8_t { Mode = 0, Think = 1, Answer = 2 };

/// Conditioning context of one token decision: (difficulty, slot, previous token).
struct Feature {
  int difficulty = 1;
  SlotClass slot = SlotClass::Mode;
  std::optional<Token> prev;  // nullopt = sequence start

  int index() const {
    const int prev_id = prev ? ampo::index(*prev) : kVocabSize;
    return ((difficulty - 1) * 3 + static_cast<int>(slot)) * (kVocabSize + 1) + prev_id;
  }
};

inline constexpr int kFeatureCount = 4 * 3 * (kVocabSize + 1);

/// Walks a token sequence and yields the feature of the next decision.
class SlotTracker {
 public:
  explicit SlotTracker(int difficulty) : difficulty_(difficulty) {}

  Feature next() const {
    if (!prev_) return {difficulty_, SlotClass::Mode, std::nullopt};
    return {difficulty_, in_think_ ? SlotClass::Think : SlotClass::Answer, prev_};
  }

  void push(Token t) {
    if (t == Token::ThinkOpen) in_think_ = true;
    if (t == Token::ThinkClose) in_think_ = false;
    prev_ = t;
  }

 private:
  int difficulty_;
  bool in_think_ = false;
  std::optional<Token> prev_;
};

template <typename Scalar>
using ParamTable = Eigen::Matrix<Scalar, Eigen::Dynamic, kVocabSize, Eigen::RowMajor>;
template <typename Scalar>
using VocabRow = Eigen::Matrix<Scalar, 1, kVocabSize>;

/// Parameter table theta[feature, token] plus a tag naming the snapshot role.
template <typename Scalar>
struct BasicPolicyParams {
  ParamTable<Scalar> theta = ParamTable<Scalar>::Zero(kFeatureCount, kVocabSize);
  std::string version = "theta";

  auto row(const Feature& f) const { return theta.row(f.index()); }
};

using PolicyParams = BasicPolicyParams<double>;

template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::MatrixBase<Derived>& x) {
  const auto m = x.maxCoeff();
  return m + std::log((x.array() - m).exp().sum());
}

template <typename Derived>
auto log_softmax(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Scalar lse = log_sum_exp(x);
  return (x.array() - lse).matrix().eval();
}

template <typename Derived>
auto softmax(const Eigen::MatrixBase<Derived>& x) {
  return log_softmax(x).array().exp().matrix().eval();
}

inline void check_feature(const Feature& f) {
  if (f.difficulty < 1 || f.difficulty > 4) throw std::out_of_range("feature difficulty out of range");
}

template <typename Scalar>
VocabRow<Scalar> logits(const BasicPolicyParams<Scalar>& params, const Feature& f) {
  check_feature(f);
  return params.row(f);
}

template <typename Scalar>
Scalar token_logprob(const BasicPolicyParams<Scalar>& params, const Feature& f, Token token) {
  check_feature(f);
  const auto row = params.row(f);
  return row(index(token)) - log_sum_exp(row);
}

/// d log pi(token | f) / d theta[f, .] = onehot(token) - softmax(theta[f, .]).
template <typename Scalar>
struct RowGradient {
  int feature_index;
  VocabRow<Scalar> values;
};

template <typename Scalar>
RowGradient<Scalar> grad_logprob(const BasicPolicyParams<Scalar>& params, const Feature& f, Token token) {
  check_feature(f);
  RowGradient<Scalar> g{f.index(), -softmax(params.row(f))};
  g.values(index(token)) += Scalar(1);
  return g;
}

/// Ancestral sampling until ANS_CLOSE or max_len tokens.
SampledOutput sample_output(const PolicyParams& params, const SocialState& state, Rng& rng, std::size_t max_len);

class SoftmaxPolicy final : public Policy {
 public:
  explicit SoftmaxPolicy(const PolicyParams& params) : params_(params) {}
  SampledOutput act(const SocialState& state, Rng& rng, std::size_t max_len) const override {
    return sample_output(params_, state, rng, max_len);
  }

 private:
  const PolicyParams& params_;
};

/// Feature indices along a sequence, as seen by sample_output.
std::vector<int> feature_path(int difficulty, std::span<const Token> seq);

/// Sum of token log-probabilities of `seq` under `params`.
double sequence_logprob(const PolicyParams& params, int difficulty, std::span<const Token> seq);

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// "AMPO-CKPT v1", "<rows> <cols>", then rows of 17-significant-digit values.
void save_checkpoint(const PolicyParams& params, const std::filesystem::path& path);
PolicyParams load_checkpoint(const std::filesystem::path& path);

/// FNV-1a over the raw bytes of theta; used to verify frozen snapshots.
std::uint64_t checksum(const PolicyParams& params);

}  // namespace ampo
