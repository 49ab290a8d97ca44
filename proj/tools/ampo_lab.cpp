// ampo_lab: data generation, behavioral cloning, RL training, evaluation and
// AMPO-vs-GRPO comparison on the synthetic social game.
//
//   ampo_lab gen-data --out run
//   ampo_lab bc       --out run
//   ampo_lab train    --out run --algorithm grpo --total_steps=200
//   ampo_lab eval     --out run --checkpoint run/checkpoints/ampo.ckpt
//   ampo_lab compare  --out run --checkpoint-a a.ckpt --checkpoint-b b.ckpt

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ampo/pipeline.hpp"

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string algorithm;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON run configuration");
  cmd->add_option("--seed", c.seed, "Run seed");
  cmd->add_option("--algorithm", c.algorithm, "ampo or grpo")->check(CLI::IsMember({"ampo", "grpo", "AMPO", "GRPO"}));
  cmd->add_option("--out", c.out, "Run directory");
  cmd->allow_extras();
}

ampo::RunConfig resolve(const Common& c, const std::vector<std::string>& extras) {
  ampo::RunConfig cfg;
  if (!c.config_path.empty()) cfg.merge_file(c.config_path);
  for (const auto& arg : extras) {
    const auto eq = arg.find('=');
    if (arg.rfind("--", 0) != 0 || eq == std::string::npos)
      throw ampo::ConfigError("unrecognized argument '" + arg + "' (expected --key=value)");
    cfg.set(arg.substr(2, eq - 2), arg.substr(eq + 1));
  }
  if (c.seed) cfg.set("seed", std::to_string(*c.seed));
  if (!c.algorithm.empty()) cfg.set("algorithm", c.algorithm);
  if (!c.out.empty()) cfg.set("out", c.out);
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive mode policy optimization lab"};
  app.require_subcommand(1);

  Common common;
  bool debug_advantages = false;
  std::string checkpoint, checkpoint_a, checkpoint_b;
  std::optional<int> episodes;

  auto* gen = app.add_subcommand("gen-data", "Generate BC corpus (and RL state corpus once a BC checkpoint exists)");
  auto* bc = app.add_subcommand("bc", "Behavioral cloning, then roll the RL state corpus");
  auto* train = app.add_subcommand("train", "RL phase (AMPO or GRPO) from the BC checkpoint");
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  auto* compare = app.add_subcommand("compare", "Evaluate two checkpoints side by side");
  auto* vocab = app.add_subcommand("vocab", "Print the vocabulary table as JSON");

  for (auto* cmd : {gen, bc, train, eval, compare}) add_common(cmd, common);
  train->add_flag("--debug-advantages", debug_advantages, "Dump per-group advantages to advantages.jsonl");
  eval->add_option("--checkpoint", checkpoint, "Checkpoint to evaluate (default: <out>/checkpoints/<algorithm>.ckpt)");
  eval->add_option("--episodes", episodes, "Number of evaluation episodes");
  compare->add_option("--checkpoint-a,a", checkpoint_a, "Baseline checkpoint")->required();
  compare->add_option("--checkpoint-b,b", checkpoint_b, "Candidate checkpoint")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (vocab->parsed()) {
      std::cout << ampo::vocab_json().dump(2) << '\n';
      return 0;
    }
    CLI::App* cmd = app.get_subcommands().front();
    ampo::RunConfig cfg = resolve(common, cmd->remaining());
    if (episodes) cfg.set("eval_episodes", std::to_string(*episodes));

    if (cmd == gen) {
      ampo::cmd_gen_data(cfg);
    } else if (cmd == bc) {
      ampo::cmd_bc(cfg);
    } else if (cmd == train) {
      ampo::cmd_train(cfg, debug_advantages);
    } else if (cmd == eval) {
      const ampo::RunPaths paths{cfg.out_dir()};
      const auto ckpt = checkpoint.empty() ? paths.policy_checkpoint(cfg.algorithm()) : std::filesystem::path(checkpoint);
      const auto report = ampo::cmd_eval(cfg, ckpt);
      std::cout << ampo::to_json(report).dump(2) << '\n';
    } else if (cmd == compare) {
      std::cout << ampo::cmd_compare(cfg, checkpoint_a, checkpoint_b);
    }
  } catch (const ampo::MissingInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ampo::CheckpointError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
