#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace ampo {

// Vocabulary layout: mode control tokens, structural tags, reasoning actions,
// then content (eight strategies and a filler).
enum class Token : std::uint8_t {
  Mode1, Mode2, Mode3, Mode4,
  ThinkOpen, ThinkClose, AnsOpen, AnsClose,
  History, Goal, Intent, Assess, Strategy, Deduction, Integration, Style, Response,
  S1, S2, S3, S4, S5, S6, S7, S8,
  Filler,
};

inline constexpr int kVocabSize = 26;
inline constexpr int kNumModes = 4;
inline constexpr int kNumStrategies = 8;

using TokenSeq = std::vector<Token>;

enum class TokenClass { Mode, Tag, Action, Content };

constexpr int index(Token t) { return static_cast<int>(t); }
Token token_from_index(int id);  // throws std::out_of_range

constexpr TokenClass token_class(Token t) {
  const int i = index(t);
  if (i < 4) return TokenClass::Mode;
  if (i < 8) return TokenClass::Tag;
  if (i < 17) return TokenClass::Action;
  return TokenClass::Content;
}

constexpr bool is_content(Token t) { return token_class(t) == TokenClass::Content; }
constexpr bool is_structural(Token t) { return !is_content(t); }
constexpr bool is_strategy(Token t) { return index(t) >= index(Token::S1) && index(t) <= index(Token::S8); }

constexpr Token mode_token(int mode) { return static_cast<Token>(mode - 1); }
constexpr Token strategy_token(int k) { return static_cast<Token>(index(Token::S1) + k - 1); }

std::string_view token_name(Token t);
std::optional<Token> token_from_name(std::string_view name);
std::string_view class_name(TokenClass c);

/// Vocabulary table as [{id, name, class}].
nlohmann::json vocab_json();

struct ModeSpec {
  int mode_id;
  std::span<const Token> action_sequence;
  bool has_thinking_block;
};

/// Throws std::invalid_argument for ids outside 1..4.
const ModeSpec& mode_spec(int mode);

enum class FormatError {
  MissingModeToken,
  UnexpectedToken,
  ActionOrder,
  EmptyAnswer,
  TrailingTokens,
  Truncated,
};

std::string_view format_error_name(FormatError e);

struct FormatVerdict {
  bool valid = false;
  std::optional<int> mode;
  int total_len = 0;
  int answer_len = 0;
  TokenSeq answer_tokens;
  std::optional<FormatError> reason;
};

nlohmann::json to_json(const FormatVerdict& v);

using ActionBodies = std::map<Token, TokenSeq>;

/// Serializes a mode's output; actions missing from `bodies` get an empty
/// body. Throws std::invalid_argument on an unknown mode, an empty or
/// non-content answer, or a body keyed by an action the mode does not use.
TokenSeq canonical_scaffold(int mode, const TokenSeq& answer, const ActionBodies& bodies = {});

/// Grammar check. Any sequence without ANS_CLOSE is reported as Truncated.
FormatVerdict check_format(std::span<const Token> seq);

std::vector<std::string> token_names(std::span<const Token> seq);
TokenSeq tokens_from_names(const nlohmann::json& names);

}  // namespace ampo
