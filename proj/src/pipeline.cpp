#include "ampo/pipeline.hpp"

#include <fstream>
#include <iostream>

namespace ampo {

namespace fs = std::filesystem;

namespace {

void require(const fs::path& p, std::string_view what) {
  if (!fs::exists(p)) throw MissingInput("missing " + std::string(what) + ": " + p.string());
}

PolicyParams load_required(const fs::path& p) {
  require(p, "checkpoint");
  return load_checkpoint(p);
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << text;
}

void write_rl_corpus_from(const RunConfig& cfg, const RunPaths& paths, const PolicyParams& bc_params) {
  const SoftmaxPolicy policy(bc_params);
  const auto judge = make_judge(cfg);
  Rng rng(stage_seed(cfg.seed(), "rl-corpus"));
  const auto rows = gen_rl_corpus(policy, cfg.rl_corpus(), rng, *judge, cfg.env());
  write_rl_corpus(rows, paths.rl_corpus());
}

}  // namespace

std::unique_ptr<Judge> make_judge(const RunConfig& cfg) {
  if (auto remote = cfg.remote_judge()) return std::make_unique<HttpJudge>(*remote);
  return std::make_unique<OracleJudge>(cfg.env());
}

RunPaths prepare_run(const RunConfig& cfg) {
  cfg.validate();
  RunPaths paths{cfg.out_dir()};
  fs::create_directories(paths.root / "corpora");
  fs::create_directories(paths.root / "checkpoints");
  write_text(paths.config(), cfg.json().dump(2) + "\n");
  return paths;
}

void cmd_gen_data(const RunConfig& cfg) {
  const RunPaths paths = prepare_run(cfg);
  write_text(paths.vocab(), vocab_json().dump(2) + "\n");
  Rng rng(stage_seed(cfg.seed(), "bc-corpus"));
  write_bc_corpus(gen_bc_corpus(cfg.bc_rows(), rng, cfg.env()), paths.bc_corpus());
  if (fs::exists(paths.bc_checkpoint())) write_rl_corpus_from(cfg, paths, load_checkpoint(paths.bc_checkpoint()));
}

void cmd_bc(const RunConfig& cfg) {
  const RunPaths paths = prepare_run(cfg);
  require(paths.bc_corpus(), "corpus");
  const auto corpus = read_bc_corpus(paths.bc_corpus());
  PolicyParams params = train_bc(corpus, cfg.bc());
  save_checkpoint(params, paths.bc_checkpoint());
  write_rl_corpus_from(cfg, paths, params);
}

void cmd_train(const RunConfig& cfg, bool debug_advantages) {
  const RunPaths paths = prepare_run(cfg);
  const PolicyParams start = load_required(paths.bc_checkpoint());
  require(paths.rl_corpus(), "corpus");
  const auto corpus = read_rl_corpus(paths.rl_corpus());
  const TrainConfig tc = cfg.train();
  const auto judge = make_judge(cfg);

  std::ofstream metrics(paths.metrics());
  if (!metrics) throw std::runtime_error("cannot write " + paths.metrics().string());
  metrics << metrics_csv_header() << '\n';

  std::ofstream adv_log;
  AdvantageSink sink;
  if (debug_advantages) {
    adv_log.open(paths.advantages());
    sink = [&adv_log](int step, const ScoredGroup& g) {
      auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
      nlohmann::json j = {{"step", step},
                          {"state_id", g.group.state_id},
                          {"difficulty", g.group.difficulty},
                          {"modes", g.group.modes()},
                          {"rewards", vec(g.group.rewards())},
                          {"lengths", vec(g.group.lengths())},
                          {"mode_advantage", vec(g.advantage.mode)},
                          {"sample_advantage", vec(g.advantage.sample)},
                          {"advantage", vec(g.advantage.combined)}};
      adv_log << j.dump() << '\n';
    };
  }

  const RlRun run =
      train_rl(start, corpus, tc, *judge, [&metrics](const StepReport& r) { metrics << metrics_csv_row(r) << '\n'; },
               sink);
  save_checkpoint(run.policy, paths.policy_checkpoint(tc.algorithm));
}

EvalReport cmd_eval(const RunConfig& cfg, const fs::path& checkpoint) {
  const RunPaths paths = prepare_run(cfg);
  const PolicyParams params = load_required(checkpoint);
  const SoftmaxPolicy policy(params);
  const auto judge = make_judge(cfg);
  const EvalReport report = evaluate(policy, cfg.eval(), *judge);
  write_text(paths.eval(), to_json(report).dump(2) + "\n");
  return report;
}

std::string cmd_compare(const RunConfig& cfg, const fs::path& a, const fs::path& b) {
  const RunPaths paths = prepare_run(cfg);
  const PolicyParams pa = load_required(a);
  const PolicyParams pb = load_required(b);
  const auto judge = make_judge(cfg);
  const EvalReport ra = evaluate(SoftmaxPolicy(pa), cfg.eval(), *judge);
  const EvalReport rb = evaluate(SoftmaxPolicy(pb), cfg.eval(), *judge);
  const std::string text = compare_text(ra, rb, a.stem().string(), b.stem().string());
  write_text(paths.root / "compare.csv", compare_csv(ra, rb));
  write_text(paths.root / "compare.txt", text);
  return text;
}

}  // namespace ampo
