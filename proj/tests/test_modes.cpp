#include <doctest.h>

#include <set>

#include "ampo/modes.hpp"
#include "ampo/rng.hpp"

using namespace ampo;
using enum Token;

namespace {

TokenSeq random_content(Rng& rng, int lo, int hi) {
  TokenSeq out(static_cast<std::size_t>(rng.uniform_int(lo, hi)));
  for (auto& t : out) t = token_from_index(rng.uniform_int(index(S1), index(Filler)));
  return out;
}

ActionBodies random_bodies(int mode, Rng& rng) {
  ActionBodies b;
  for (Token a : mode_spec(mode).action_sequence) b[a] = random_content(rng, 0, 3);
  return b;
}

}  // namespace

TEST_CASE("vocabulary partitions into four classes") {
  std::map<TokenClass, int> counts;
  std::set<std::string_view> names;
  for (int id = 0; id < kVocabSize; ++id) {
    const Token t = token_from_index(id);
    CHECK(index(t) == id);
    ++counts[token_class(t)];
    names.insert(token_name(t));
    CHECK(token_from_name(token_name(t)) == t);
  }
  CHECK(names.size() == kVocabSize);
  CHECK(counts[TokenClass::Mode] == 4);
  CHECK(counts[TokenClass::Tag] == 4);
  CHECK(counts[TokenClass::Action] == 9);
  CHECK(counts[TokenClass::Content] == 9);
  CHECK_THROWS_AS(token_from_index(kVocabSize), std::out_of_range);
  CHECK_THROWS_AS(token_from_index(-1), std::out_of_range);
}

TEST_CASE("vocab json lists id, name and class") {
  const auto j = vocab_json();
  REQUIRE(j.size() == kVocabSize);
  CHECK(j[0]["name"] == "MODE_1");
  CHECK(j[0]["class"] == "mode");
  CHECK(j[7]["name"] == "ANS_CLOSE");
  CHECK(j[16]["name"] == "RESPONSE");
  CHECK(j[25]["name"] == "FILLER");
  CHECK(j[25]["class"] == "content");
  for (int id = 0; id < kVocabSize; ++id) CHECK(j[static_cast<std::size_t>(id)]["id"] == id);
}

TEST_CASE("mode action sequences") {
  CHECK(mode_spec(1).action_sequence.empty());
  CHECK_FALSE(mode_spec(1).has_thinking_block);
  const TokenSeq m2(mode_spec(2).action_sequence.begin(), mode_spec(2).action_sequence.end());
  const TokenSeq m3(mode_spec(3).action_sequence.begin(), mode_spec(3).action_sequence.end());
  const TokenSeq m4(mode_spec(4).action_sequence.begin(), mode_spec(4).action_sequence.end());
  CHECK(m2 == TokenSeq{Intent, Style, Response});
  CHECK(m3 == TokenSeq{History, Goal, Intent, Assess, Strategy, Style, Response});
  CHECK(m4 == TokenSeq{History, Goal, Intent, Assess, Strategy, Deduction, Integration, Style, Response});
  for (Token a : m2) CHECK(std::find(m3.begin(), m3.end(), a) != m3.end());
  for (Token a : m3) CHECK(std::find(m4.begin(), m4.end(), a) != m4.end());
  CHECK_THROWS_AS(mode_spec(0), std::invalid_argument);
  CHECK_THROWS_AS(mode_spec(5), std::invalid_argument);
}

TEST_CASE("canonical scaffold examples") {
  CHECK(canonical_scaffold(1, {S3}) == TokenSeq{Mode1, AnsOpen, S3, AnsClose});
  CHECK(canonical_scaffold(2, {S1}, {{Intent, {}}, {Style, {}}, {Response, {}}}) ==
        TokenSeq{Mode2, ThinkOpen, Intent, Style, Response, ThinkClose, AnsOpen, S1, AnsClose});

  ActionBodies fillers;
  for (Token a : mode_spec(4).action_sequence) fillers[a] = {Filler};
  const TokenSeq m4 = canonical_scaffold(4, {S7, Filler}, fillers);
  CHECK(m4.size() == 25);
  TokenSeq actions;
  for (Token t : m4)
    if (token_class(t) == TokenClass::Action) actions.push_back(t);
  CHECK(actions == TokenSeq(mode_spec(4).action_sequence.begin(), mode_spec(4).action_sequence.end()));
  const auto v = check_format(m4);
  CHECK(v.valid);
  CHECK(v.mode == 4);
  CHECK(v.total_len == 25);
  CHECK(v.answer_len == 2);
}

TEST_CASE("canonical scaffold rejects bad input") {
  CHECK_THROWS_AS(canonical_scaffold(0, {S1}), std::invalid_argument);
  CHECK_THROWS_AS(canonical_scaffold(5, {S1}), std::invalid_argument);
  CHECK_THROWS_AS(canonical_scaffold(2, {}), std::invalid_argument);
  CHECK_THROWS_AS(canonical_scaffold(2, {Style}), std::invalid_argument);
  CHECK_THROWS_AS(canonical_scaffold(2, {S1}, {{History, {}}}), std::invalid_argument);
  CHECK_THROWS_AS(canonical_scaffold(1, {S1}, {{Intent, {}}}), std::invalid_argument);
  CHECK_THROWS_AS(canonical_scaffold(2, {S1}, {{Intent, {Goal}}}), std::invalid_argument);
}

TEST_CASE("check_format examples") {
  const TokenSeq m1{Mode1, AnsOpen, S3, AnsClose};
  auto v = check_format(m1);
  CHECK(v.valid);
  CHECK(v.mode == 1);
  CHECK(v.total_len == 4);
  CHECK(v.answer_len == 1);
  CHECK(v.answer_tokens == TokenSeq{S3});
  CHECK_FALSE(v.reason);

  v = check_format(TokenSeq{Mode2, ThinkOpen, Style, Intent, Response, ThinkClose, AnsOpen, S1, AnsClose});
  CHECK_FALSE(v.valid);
  CHECK(v.reason == FormatError::ActionOrder);

  const TokenSeq m3{Mode3,    ThinkOpen, History,    Goal,    Intent, Assess, Strategy,
                    Style,    Response,  ThinkClose, AnsOpen, S2,     Filler, AnsClose};
  v = check_format(m3);
  CHECK(v.valid);
  CHECK(v.mode == 3);
  CHECK(v.total_len == 14);
  CHECK(v.answer_len == 2);
  CHECK(canonical_scaffold(3, {S2, Filler}) == m3);
}

TEST_CASE("check_format failure reasons") {
  CHECK(check_format(TokenSeq{Mode1, AnsOpen, S3}).reason == FormatError::Truncated);
  CHECK(check_format(TokenSeq{Mode1, AnsOpen}).reason == FormatError::Truncated);
  CHECK(check_format(TokenSeq{AnsOpen, S3, AnsClose}).reason == FormatError::MissingModeToken);
  CHECK(check_format(TokenSeq{Mode1, AnsOpen, AnsClose}).reason == FormatError::EmptyAnswer);
  CHECK(check_format(TokenSeq{Mode1, AnsOpen, S1, AnsClose, S1}).reason == FormatError::TrailingTokens);
  CHECK(check_format(TokenSeq{Mode1, ThinkOpen, ThinkClose, AnsOpen, S1, AnsClose}).reason ==
        FormatError::UnexpectedToken);
  CHECK(check_format(TokenSeq{Mode2, AnsOpen, S1, AnsClose}).reason == FormatError::UnexpectedToken);
  CHECK(check_format(TokenSeq{Mode2, ThinkOpen, Intent, Style, ThinkClose, AnsOpen, S1, AnsClose}).reason ==
        FormatError::UnexpectedToken);
  CHECK(check_format(TokenSeq{Mode2, ThinkOpen, Intent, Style, Response, Goal, ThinkClose, AnsOpen, S1, AnsClose})
            .reason == FormatError::ActionOrder);
  CHECK(check_format(TokenSeq{Mode1, AnsOpen, S1, Goal, AnsClose}).reason == FormatError::UnexpectedToken);
}

TEST_CASE("round trip through the scaffold") {
  Rng rng(101);
  for (int trial = 0; trial < 2000; ++trial) {
    const int mode = rng.uniform_int(1, 4);
    TokenSeq answer = random_content(rng, 1, 6);
    const auto bodies = random_bodies(mode, rng);
    const TokenSeq seq = canonical_scaffold(mode, answer, bodies);
    const auto v = check_format(seq);
    REQUIRE(v.valid);
    CHECK(v.mode == mode);
    CHECK(v.total_len == static_cast<int>(seq.size()));
    CHECK(v.answer_len == static_cast<int>(answer.size()));
    CHECK(v.answer_tokens == answer);
  }
}

TEST_CASE("single structural edits invalidate a valid sequence") {
  Rng rng(202);
  int edits = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int mode = rng.uniform_int(1, 4);
    const TokenSeq seq = canonical_scaffold(mode, random_content(rng, 1, 4), random_bodies(mode, rng));
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (is_content(seq[i])) continue;
      TokenSeq del = seq;
      del.erase(del.begin() + static_cast<std::ptrdiff_t>(i));
      CHECK_FALSE(check_format(del).valid);
      TokenSeq dup = seq;
      dup.insert(dup.begin() + static_cast<std::ptrdiff_t>(i), seq[i]);
      CHECK_FALSE(check_format(dup).valid);
      edits += 2;
      std::size_t j = i + 1;
      while (j < seq.size() && is_content(seq[j])) ++j;
      if (j < seq.size()) {
        TokenSeq swp = seq;
        std::swap(swp[i], swp[j]);
        CHECK_FALSE(check_format(swp).valid);
        ++edits;
      }
    }
  }
  CHECK(edits > 1000);
}

TEST_CASE("deeper modes are strictly longer") {
  Rng rng(303);
  for (int trial = 0; trial < 200; ++trial) {
    const TokenSeq answer = random_content(rng, 1, 5);
    const TokenSeq body = random_content(rng, 0, 2);
    std::size_t prev = 0;
    for (int m = 1; m <= 4; ++m) {
      ActionBodies b;
      for (Token a : mode_spec(m).action_sequence) b[a] = body;
      const std::size_t len = canonical_scaffold(m, answer, b).size();
      CHECK(len > prev);
      prev = len;
    }
  }
}

TEST_CASE("verdict json and name conversion") {
  const auto j = to_json(check_format(TokenSeq{Mode1, AnsOpen, S3, AnsClose}));
  CHECK(j["valid"] == true);
  CHECK(j["mode"] == 1);
  CHECK(j["reason"].is_null());
  const auto bad = to_json(check_format(TokenSeq{Mode1}));
  CHECK(bad["reason"] == "Truncated");
  CHECK(bad["mode"].is_null());

  const TokenSeq seq{Mode2, ThinkOpen, Intent, S4};
  CHECK(tokens_from_names(token_names(seq)) == seq);
  CHECK_THROWS_AS(tokens_from_names(nlohmann::json::array({"NOPE"})), std::invalid_argument);
}
