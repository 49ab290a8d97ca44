#pragma once

#include <filesystem>
#include <memory>
#include <stdexcept>

#include "ampo/config.hpp"
#include "ampo/eval.hpp"

namespace ampo {

/// A prerequisite artifact is absent; the CLI maps this to exit code 2.
struct MissingInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fixed run-directory layout.
struct RunPaths {
  std::filesystem::path root;

  std::filesystem::path config() const { return root / "config.json"; }
  std::filesystem::path vocab() const { return root / "vocab.json"; }
  std::filesystem::path bc_corpus() const { return root / "corpora" / "bc.jsonl"; }
  std::filesystem::path rl_corpus() const { return root / "corpora" / "rl.jsonl"; }
  std::filesystem::path bc_checkpoint() const { return root / "checkpoints" / "bc.ckpt"; }
  std::filesystem::path policy_checkpoint(Algorithm a) const {
    return root / "checkpoints" / (std::string(algorithm_name(a)) + ".ckpt");
  }
  std::filesystem::path metrics() const { return root / "metrics.csv"; }
  std::filesystem::path advantages() const { return root / "advantages.jsonl"; }
  std::filesystem::path eval() const { return root / "eval.json"; }
};

std::unique_ptr<Judge> make_judge(const RunConfig& cfg);

/// Writes the resolved configuration to <out>/config.json and creates the
/// directory layout.
RunPaths prepare_run(const RunConfig& cfg);

/// BC corpus, plus the RL state corpus when a BC checkpoint already exists.
void cmd_gen_data(const RunConfig& cfg);
/// BC training from the BC corpus, then the RL state corpus rolled with the
/// cloned policy.
void cmd_bc(const RunConfig& cfg);
/// RL phase from the BC checkpoint; writes the policy checkpoint and metrics.csv.
void cmd_train(const RunConfig& cfg, bool debug_advantages = false);
EvalReport cmd_eval(const RunConfig& cfg, const std::filesystem::path& checkpoint);
/// Evaluates both checkpoints with the same seed; writes compare.csv and
/// compare.txt and returns the text table.
std::string cmd_compare(const RunConfig& cfg, const std::filesystem::path& a, const std::filesystem::path& b);

}  // namespace ampo
