#include "ampo/trainer.hpp"

#include <cstdio>
#include <numeric>
#include <sstream>

namespace ampo {

std::string_view algorithm_name(Algorithm a) { return a == Algorithm::Ampo ? "ampo" : "grpo"; }

Algorithm algorithm_from_name(std::string_view name) {
  if (name == "ampo" || name == "AMPO") return Algorithm::Ampo;
  if (name == "grpo" || name == "GRPO") return Algorithm::Grpo;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "' (expected ampo or grpo)");
}

void TrainConfig::validate() const {
  if (!(clip_eps > 0.0 && clip_eps < 1.0)) throw std::invalid_argument("clip_eps must lie in (0, 1)");
  if (kl_coef < 0.0) throw std::invalid_argument("kl_coef must be non-negative");
  if (group_size < 2) throw std::invalid_argument("group_size must be at least 2");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be at least 1");
  if (epochs_per_batch < 1) throw std::invalid_argument("epochs_per_batch must be at least 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (max_len < 1) throw std::invalid_argument("max_len must be positive");
  if (reward.target_answer_len < 1) throw std::invalid_argument("target_answer_len must be at least 1");
  if (!(reward.length_alpha > 0.0)) throw std::invalid_argument("length_alpha must be positive");
}

BcLoss bc_loss_and_grad(const PolicyParams& params, std::span<const BcRow> batch) {
  if (batch.empty()) throw std::invalid_argument("empty BC batch");
  BcLoss out{0.0, ParamTable<double>::Zero(kFeatureCount, kVocabSize)};
  for (const auto& row : batch) {
    SlotTracker tracker(row.difficulty);
    for (Token t : row.tokens) {
      const int f = tracker.next().index();
      const VocabRow<double> logp = log_softmax(params.theta.row(f));
      out.loss -= logp(index(t));
      out.grad.row(f) += logp.array().exp().matrix();
      out.grad(f, index(t)) -= 1.0;
      tracker.push(t);
    }
  }
  const double n = static_cast<double>(batch.size());
  out.loss /= n;
  out.grad /= n;
  return out;
}

ObjectiveEval rl_objective(const PolicyParams& theta, const PolicyParams& ref, std::span<const ScoredGroup> groups,
                           const TrainConfig& cfg) {
  ObjectiveEval ev;
  ev.grad = ParamTable<double>::Zero(kFeatureCount, kVocabSize);

  std::size_t n_samples = 0;
  for (const auto& g : groups) n_samples += g.group.samples.size();
  if (n_samples == 0) return ev;
  const double inv_n = 1.0 / static_cast<double>(n_samples);

  std::size_t n_tokens = 0, n_clipped = 0;
  double kl_sum = 0.0;
  for (const auto& g : groups) {
    for (std::size_t i = 0; i < g.group.samples.size(); ++i) {
      const auto& sample = g.group.samples[i];
      const auto& path = g.features[i];
      const double adv = g.advantage.combined(static_cast<Eigen::Index>(i));
      const double w = inv_n / static_cast<double>(sample.tokens.size());

      for (std::size_t t = 0; t < sample.tokens.size(); ++t) {
        const int f = path[t];
        const int v = index(sample.tokens[t]);
        const VocabRow<double> logp = log_softmax(theta.theta.row(f));
        const double lp = logp(v);
        const double lp_ref = ref.theta(f, v) - log_sum_exp(ref.theta.row(f));
        const double ratio = std::exp(lp - sample.old_logprobs[t]);

        const SurrogateTerm s = surrogate_term(ratio, adv, cfg.clip_eps);
        const double k3 = kl_k3(lp, lp_ref);
        ev.value += w * (s.value - cfg.kl_coef * k3);

        // d/d lp of the token term; d lp / d theta[f, .] = onehot - softmax.
        const double coef = (s.clipped ? 0.0 : ratio * adv) + cfg.kl_coef * (std::exp(lp_ref - lp) - 1.0);
        if (coef != 0.0) {
          ev.grad.row(f) -= (w * coef) * logp.array().exp().matrix();
          ev.grad(f, v) += w * coef;
        }
        kl_sum += k3;
        n_clipped += s.clipped ? 1 : 0;
        ++n_tokens;
      }
    }
  }
  ev.mean_kl = kl_sum / static_cast<double>(n_tokens);
  ev.clip_frac = static_cast<double>(n_clipped) / static_cast<double>(n_tokens);
  return ev;
}

std::vector<ScoredGroup> collect_rollouts(const PolicyParams& old_policy, std::span<const SocialState> batch,
                                          const TrainConfig& cfg, const Judge& judge, Rng& rng) {
  const std::uint64_t base = rng.next_u64();
  std::vector<ScoredGroup> groups;
  groups.reserve(batch.size());

  for (std::size_t b = 0; b < batch.size(); ++b) {
    const SocialState& state = batch[b];
    ScoredGroup sg;
    sg.group.state_id = static_cast<int>(b);
    sg.group.difficulty = state.scenario.difficulty;

    for (int i = 0; i < cfg.group_size; ++i) {
      Rng stream(derive_seed(base, {b, static_cast<std::uint64_t>(i)}));
      SampledOutput out = sample_output(old_policy, state, stream, cfg.max_len);
      const FormatVerdict verdict = check_format(out.tokens);
      const double after = verdict.valid ? judge.score(state, verdict) : state.goal_score;

      RolloutSample s;
      s.breakdown = total_reward(verdict, state.goal_score, after, cfg.reward);
      s.reward = s.breakdown.total;
      s.mode = verdict.valid ? *verdict.mode : kInvalidMode;
      s.total_len = static_cast<int>(out.tokens.size());
      s.answer_len = verdict.answer_len;
      s.tokens = std::move(out.tokens);
      s.old_logprobs = std::move(out.logprobs);
      sg.features.push_back(feature_path(state.scenario.difficulty, s.tokens));
      sg.group.samples.push_back(std::move(s));
    }

    const Eigen::VectorXd sample_adv = sample_advantage(sg.group.rewards());
    const Eigen::VectorXd mode_adv = cfg.algorithm == Algorithm::Ampo
                                         ? mode_advantage(sg.group)
                                         : Eigen::VectorXd::Zero(sample_adv.size()).eval();
    sg.advantage = combine(mode_adv, sample_adv);
    groups.push_back(std::move(sg));
  }
  return groups;
}

RlState::RlState(const PolicyParams& start) : policy(start), reference(start) {
  policy.version = "theta";
  reference.version = "ref";
}

StepReport rl_step(RlState& state, std::span<const SocialState> batch, const TrainConfig& cfg, const Judge& judge,
                   Rng& rng, const AdvantageSink& sink) {
  PolicyParams old_policy = state.policy;
  old_policy.version = "theta_old";
  const auto groups = collect_rollouts(old_policy, batch, cfg, judge, rng);

  StepReport rep;
  rep.step = ++state.step;
  for (int epoch = 0; epoch < cfg.epochs_per_batch; ++epoch) {
    ObjectiveEval ev = rl_objective(state.policy, state.reference, groups, cfg);
    if (!ev.grad.allFinite() || !std::isfinite(ev.value)) {
      std::ostringstream msg;
      msg << "non-finite gradient at step " << rep.step << " epoch " << epoch << " (objective " << ev.value
          << ", max |theta| " << state.policy.theta.cwiseAbs().maxCoeff() << ")";
      throw TrainingError(msg.str());
    }
    if (epoch == 0) {
      rep.mean_kl = ev.mean_kl;
      rep.clip_frac = ev.clip_frac;
      rep.surrogate = ev.value;
      rep.grad_norm = ev.grad.norm();
    }
    state.adam.descend(state.policy.theta, -ev.grad, cfg.learning_rate);
  }

  std::size_t n = 0, n_valid = 0;
  for (const auto& g : groups) {
    for (const auto& s : g.group.samples) {
      ++n;
      rep.mean_reward += s.reward;
      rep.mean_goal_delta += s.breakdown.raw_delta;
      rep.mean_total_len += s.total_len;
      rep.mode_freq[static_cast<std::size_t>(s.mode)] += 1.0;
      if (s.mode != kInvalidMode) {
        ++n_valid;
        rep.mean_answer_len += s.answer_len;
      }
    }
    if (sink) sink(rep.step, g);
  }
  const double dn = static_cast<double>(n);
  rep.mean_reward /= dn;
  rep.mean_goal_delta /= dn;
  rep.mean_total_len /= dn;
  for (auto& f : rep.mode_freq) f /= dn;
  rep.format_violation_rate = rep.mode_freq[kInvalidMode];
  rep.mean_answer_len = n_valid ? rep.mean_answer_len / static_cast<double>(n_valid) : 0.0;
  return rep;
}

std::string metrics_csv_header() {
  return "step,mean_reward,mean_goal_delta,format_violation_rate,mean_total_len,mean_answer_len,"
         "frac_mode1,frac_mode2,frac_mode3,frac_mode4,frac_invalid,mean_kl,clip_frac,grad_norm";
}

std::string metrics_csv_row(const StepReport& r) {
  std::string out = std::to_string(r.step);
  char buf[40];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, ",%.9g", x);
    out += buf;
  };
  put(r.mean_reward);
  put(r.mean_goal_delta);
  put(r.format_violation_rate);
  put(r.mean_total_len);
  put(r.mean_answer_len);
  for (int k = 1; k <= kNumModes; ++k) put(r.mode_freq[static_cast<std::size_t>(k)]);
  put(r.mode_freq[kInvalidMode]);
  put(r.mean_kl);
  put(r.clip_frac);
  put(r.grad_norm);
  return out;
}

namespace {

void shuffle(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i - 1)));
    std::swap(idx[i - 1], idx[j]);
  }
}

}  // namespace

PolicyParams train_bc(std::span<const BcRow> corpus, const BcConfig& cfg,
                      const std::function<void(int, double)>& on_epoch) {
  if (corpus.empty()) throw std::invalid_argument("empty BC corpus");
  PolicyParams params;
  Adam<double> adam;
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  const auto bs = static_cast<std::size_t>(std::max(1, cfg.batch_size));

  std::vector<BcRow> batch;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle(order, rng);
    double loss_sum = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += bs) {
      batch.clear();
      for (std::size_t k = start; k < std::min(order.size(), start + bs); ++k) batch.push_back(corpus[order[k]]);
      const BcLoss l = bc_loss_and_grad(params, batch);
      adam.descend(params.theta, l.grad, cfg.learning_rate);
      loss_sum += l.loss;
      ++batches;
    }
    if (on_epoch) on_epoch(epoch, loss_sum / batches);
  }
  return params;
}

RlRun train_rl(const PolicyParams& start, std::span<const RlStateRow> corpus, const TrainConfig& cfg,
               const Judge& judge, const std::function<void(const StepReport&)>& on_step, const AdvantageSink& sink) {
  cfg.validate();
  if (corpus.empty()) throw std::invalid_argument("empty RL corpus");
  RlState state(start);
  Rng root(cfg.seed);
  Rng order_rng = root.split(1);
  Rng step_rng = root.split(2);

  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();

  RlRun run;
  std::vector<SocialState> batch;
  for (int step = 0; step < cfg.total_steps; ++step) {
    batch.clear();
    while (batch.size() < static_cast<std::size_t>(cfg.batch_size)) {
      if (cursor == order.size()) {
        shuffle(order, order_rng);
        cursor = 0;
      }
      batch.push_back(corpus[order[cursor++]].state);
    }
    StepReport rep = rl_step(state, batch, cfg, judge, step_rng, sink);
    if (on_step) on_step(rep);
    run.reports.push_back(rep);
  }
  run.policy = std::move(state.policy);
  return run;
}

}  // namespace ampo
