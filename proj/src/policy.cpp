#include "ampo/policy.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ampo {

SampledOutput sample_output(const PolicyParams& params, const SocialState& state, Rng& rng, std::size_t max_len) {
  if (max_len == 0) throw std::invalid_argument("max_len must be positive");
  SlotTracker tracker(state.scenario.difficulty);
  SampledOutput out;
  out.tokens.reserve(max_len);
  out.logprobs.reserve(max_len);

  while (out.tokens.size() < max_len) {
    const Feature f = tracker.next();
    check_feature(f);
    const VocabRow<double> logp = log_softmax(params.row(f));

    const double u = rng.uniform();
    double acc = 0.0;
    int chosen = kVocabSize - 1;
    for (int v = 0; v < kVocabSize; ++v) {
      acc += std::exp(logp(v));
      if (u < acc) {
        chosen = v;
        break;
      }
    }
    const Token t = token_from_index(chosen);
    out.tokens.push_back(t);
    out.logprobs.push_back(logp(chosen));
    tracker.push(t);
    if (t == Token::AnsClose) break;
  }
  return out;
}

std::vector<int> feature_path(int difficulty, std::span<const Token> seq) {
  SlotTracker tracker(difficulty);
  std::vector<int> path;
  path.reserve(seq.size());
  for (Token t : seq) {
    path.push_back(tracker.next().index());
    tracker.push(t);
  }
  return path;
}

double sequence_logprob(const PolicyParams& params, int difficulty, std::span<const Token> seq) {
  SlotTracker tracker(difficulty);
  double total = 0.0;
  for (Token t : seq) {
    total += token_logprob(params, tracker.next(), t);
    tracker.push(t);
  }
  return total;
}

void save_checkpoint(const PolicyParams& params, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw CheckpointError("cannot open checkpoint for writing: " + path.string());
  os << "AMPO-CKPT v1\n" << params.theta.rows() << ' ' << params.theta.cols() << '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < params.theta.rows(); ++r) {
    for (Eigen::Index c = 0; c < params.theta.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", params.theta(r, c));
      if (c) os << ' ';
      os << buf;
    }
    os << '\n';
  }
  if (!os) throw CheckpointError("failed writing checkpoint: " + path.string());
}

PolicyParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw CheckpointError("missing checkpoint: " + path.string());
  std::string header;
  std::getline(is, header);
  if (header != "AMPO-CKPT v1") throw CheckpointError("unsupported checkpoint header: '" + header + "'");

  std::string dims;
  std::getline(is, dims);
  std::istringstream ds(dims);
  long rows = -1, cols = -1;
  if (!(ds >> rows >> cols)) throw CheckpointError("malformed dimensions line");
  if (rows != kFeatureCount || cols != kVocabSize) {
    throw CheckpointError("dimension mismatch: file has " + std::to_string(rows) + "x" + std::to_string(cols) +
                          ", expected " + std::to_string(kFeatureCount) + "x" + std::to_string(kVocabSize));
  }

  PolicyParams p;
  std::string tok;
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      if (!(is >> tok)) throw CheckpointError("checkpoint truncated");
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size() || !std::isfinite(v)) throw CheckpointError("malformed entry: " + tok);
      p.theta(r, c) = v;
    }
  }
  if (is >> tok) throw CheckpointError("trailing data in checkpoint");
  return p;
}

std::uint64_t checksum(const PolicyParams& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(params.theta.data());
  const std::size_t n = static_cast<std::size_t>(params.theta.size()) * sizeof(double);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ampo
