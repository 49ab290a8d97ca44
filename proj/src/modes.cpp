#include "ampo/modes.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace ampo {

namespace {

constexpr std::array<std::string_view, kVocabSize> kNames = {
    "MODE_1",   "MODE_2", "MODE_3",    "MODE_4",      "THINK_OPEN", "THINK_CLOSE", "ANS_OPEN",
    "ANS_CLOSE", "HISTORY", "GOAL",    "INTENT",      "ASSESS",     "STRATEGY",    "DEDUCTION",
    "INTEGRATION", "STYLE", "RESPONSE", "S1",         "S2",         "S3",          "S4",
    "S5",       "S6",     "S7",        "S8",          "FILLER",
};

using enum Token;

constexpr std::array<Token, 0> kM1Actions{};
constexpr std::array kM2Actions{Intent, Style, Response};
constexpr std::array kM3Actions{History, Goal, Intent, Assess, Strategy, Style, Response};
constexpr std::array kM4Actions{History, Goal,      Intent,      Assess,  Strategy,
                                Deduction, Integration, Style, Response};

const std::array<ModeSpec, kNumModes> kModes = {{
    {1, kM1Actions, false},
    {2, kM2Actions, true},
    {3, kM3Actions, true},
    {4, kM4Actions, true},
}};

FormatVerdict reject(FormatError why, std::size_t len) {
  FormatVerdict v;
  v.reason = why;
  v.total_len = static_cast<int>(len);
  return v;
}

}  // namespace

Token token_from_index(int id) {
  if (id < 0 || id >= kVocabSize) throw std::out_of_range("token id out of range: " + std::to_string(id));
  return static_cast<Token>(id);
}

std::string_view token_name(Token t) { return kNames[static_cast<std::size_t>(index(t))]; }

std::optional<Token> token_from_name(std::string_view name) {
  auto it = std::find(kNames.begin(), kNames.end(), name);
  if (it == kNames.end()) return std::nullopt;
  return static_cast<Token>(it - kNames.begin());
}

std::string_view class_name(TokenClass c) {
  switch (c) {
    case TokenClass::Mode: return "mode";
    case TokenClass::Tag: return "tag";
    case TokenClass::Action: return "action";
    case TokenClass::Content: return "content";
  }
  return "?";
}

nlohmann::json vocab_json() {
  auto out = nlohmann::json::array();
  for (int id = 0; id < kVocabSize; ++id) {
    const Token t = token_from_index(id);
    out.push_back({{"id", id}, {"name", token_name(t)}, {"class", class_name(token_class(t))}});
  }
  return out;
}

const ModeSpec& mode_spec(int mode) {
  if (mode < 1 || mode > kNumModes) throw std::invalid_argument("unknown mode id " + std::to_string(mode));
  return kModes[static_cast<std::size_t>(mode - 1)];
}

std::string_view format_error_name(FormatError e) {
  switch (e) {
    case FormatError::MissingModeToken: return "MissingModeToken";
    case FormatError::UnexpectedToken: return "UnexpectedToken";
    case FormatError::ActionOrder: return "ActionOrder";
    case FormatError::EmptyAnswer: return "EmptyAnswer";
    case FormatError::TrailingTokens: return "TrailingTokens";
    case FormatError::Truncated: return "Truncated";
  }
  return "?";
}

nlohmann::json to_json(const FormatVerdict& v) {
  nlohmann::json j = {{"valid", v.valid}, {"total_len", v.total_len}, {"answer_len", v.answer_len}};
  j["mode"] = v.mode ? nlohmann::json(*v.mode) : nlohmann::json(nullptr);
  j["reason"] = v.reason ? nlohmann::json(format_error_name(*v.reason)) : nlohmann::json(nullptr);
  return j;
}

TokenSeq canonical_scaffold(int mode, const TokenSeq& answer, const ActionBodies& bodies) {
  const ModeSpec& spec = mode_spec(mode);
  if (answer.empty()) throw std::invalid_argument("answer must be nonempty");
  if (!std::all_of(answer.begin(), answer.end(), is_content))
    throw std::invalid_argument("answer may only contain content tokens");
  for (const auto& [action, body] : bodies) {
    if (std::find(spec.action_sequence.begin(), spec.action_sequence.end(), action) == spec.action_sequence.end())
      throw std::invalid_argument("body for action " + std::string(token_name(action)) + " not in mode " +
                                  std::to_string(mode));
    if (!std::all_of(body.begin(), body.end(), is_content))
      throw std::invalid_argument("action bodies may only contain content tokens");
  }

  TokenSeq out{mode_token(mode)};
  if (spec.has_thinking_block) {
    out.push_back(ThinkOpen);
    for (Token action : spec.action_sequence) {
      out.push_back(action);
      if (auto it = bodies.find(action); it != bodies.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    }
    out.push_back(ThinkClose);
  }
  out.push_back(AnsOpen);
  out.insert(out.end(), answer.begin(), answer.end());
  out.push_back(AnsClose);
  return out;
}

FormatVerdict check_format(std::span<const Token> seq) {
  const std::size_t n = seq.size();
  if (std::find(seq.begin(), seq.end(), AnsClose) == seq.end()) return reject(FormatError::Truncated, n);
  if (token_class(seq[0]) != TokenClass::Mode) return reject(FormatError::MissingModeToken, n);

  const int mode = index(seq[0]) + 1;
  const ModeSpec& spec = mode_spec(mode);
  std::size_t i = 1;

  // Returns the position of the next structural token, or n.
  auto skip_content = [&](std::size_t pos) {
    while (pos < n && is_content(seq[pos])) ++pos;
    return pos;
  };

  if (spec.has_thinking_block) {
    if (i >= n || seq[i] != ThinkOpen) return reject(FormatError::UnexpectedToken, n);
    ++i;
    for (Token expected : spec.action_sequence) {
      if (i >= n) return reject(FormatError::Truncated, n);
      if (seq[i] != expected) {
        return reject(token_class(seq[i]) == TokenClass::Action ? FormatError::ActionOrder
                                                                 : FormatError::UnexpectedToken,
                      n);
      }
      i = skip_content(i + 1);
    }
    if (i >= n) return reject(FormatError::Truncated, n);
    if (seq[i] != ThinkClose) {
      return reject(token_class(seq[i]) == TokenClass::Action ? FormatError::ActionOrder : FormatError::UnexpectedToken,
                    n);
    }
    ++i;
  }

  if (i >= n || seq[i] != AnsOpen) return reject(FormatError::UnexpectedToken, n);
  const std::size_t answer_begin = ++i;
  i = skip_content(i);
  if (i >= n) return reject(FormatError::Truncated, n);
  if (seq[i] != AnsClose) return reject(FormatError::UnexpectedToken, n);
  if (i == answer_begin) return reject(FormatError::EmptyAnswer, n);
  if (i + 1 != n) return reject(FormatError::TrailingTokens, n);

  FormatVerdict v;
  v.valid = true;
  v.mode = mode;
  v.total_len = static_cast<int>(n);
  v.answer_tokens.assign(seq.begin() + static_cast<std::ptrdiff_t>(answer_begin),
                         seq.begin() + static_cast<std::ptrdiff_t>(i));
  v.answer_len = static_cast<int>(v.answer_tokens.size());
  return v;
}

std::vector<std::string> token_names(std::span<const Token> seq) {
  std::vector<std::string> out;
  out.reserve(seq.size());
  for (Token t : seq) out.emplace_back(token_name(t));
  return out;
}

TokenSeq tokens_from_names(const nlohmann::json& names) {
  TokenSeq out;
  for (const auto& n : names) {
    auto t = token_from_name(n.get<std::string>());
    if (!t) throw std::invalid_argument("unknown token name: " + n.get<std::string>());
    out.push_back(*t);
  }
  return out;
}

}  // namespace ampo
