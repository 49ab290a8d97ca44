#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "ampo/reward.hpp"

using namespace ampo;
using enum Token;

namespace {

FormatVerdict valid_with_answer(int len) {
  TokenSeq answer(static_cast<std::size_t>(len), Filler);
  answer[0] = S1;
  return check_format(canonical_scaffold(1, answer));
}

class StubServer {
 public:
  explicit StubServer(std::string body, int status = 200) : body_(std::move(body)), status_(status) {
    server_.Post("/score", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      last_request = req.body;
      res.status = status_;
      res.set_content(body_, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> hits{0};
  std::string last_request;

 private:
  std::string body_;
  int status_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

SocialState judged_state() {
  SocialState s;
  s.scenario = {1, 3, S6, 8};
  s.goal_score = 4.0;
  s.history.push_back({Speaker::Partner, {S2, Filler, S3}});
  return s;
}

HttpJudgeConfig config_for(const StubServer& srv, int retries = 2) {
  return {srv.url(), std::chrono::milliseconds(2000), retries};
}

}  // namespace

TEST_CASE("answer reward examples") {
  auto r = answer_reward(5, 7);
  CHECK(std::abs(r.scaled_delta - 0.4) <= 1e-12);
  CHECK(std::abs(r.reward - 0.7) <= 1e-12);
  r = answer_reward(0, 10);
  CHECK(r.scaled_delta == 1.0);
  CHECK(r.reward == 1.0);
  r = answer_reward(5, 3);
  CHECK(std::abs(r.scaled_delta + 0.4) <= 1e-12);
  CHECK(std::abs(r.reward - 0.3) <= 1e-12);
  CHECK(answer_reward(10, 10).scaled_delta == 0.0);
  CHECK(answer_reward(0, 0).scaled_delta == 0.0);
  CHECK(answer_reward(0, 0).reward == 0.5);
  CHECK_THROWS_AS(answer_reward(-0.1, 3), std::invalid_argument);
  CHECK_THROWS_AS(answer_reward(3, 10.5), std::invalid_argument);
}

TEST_CASE("length reward examples") {
  CHECK(std::abs(length_reward(5) - 0.5) <= 1e-12);
  CHECK(std::abs(length_reward(2) - 1.0) <= 1e-12);
  CHECK(std::abs(length_reward(8) - 0.0) <= 1e-12);
  CHECK(length_reward(0) == 1.0);
  CHECK(length_reward(40) == 0.0);
  CHECK(std::abs(length_reward(6) - 1.0 / 3.0) <= 1e-12);
  const RewardConfig long_form{250, 1.0 / 75, -2.0};
  CHECK(std::abs(length_reward(250, long_form) - 0.5) <= 1e-12);
  CHECK(std::abs(length_reward(325, long_form)) <= 1e-12);
}

TEST_CASE("total reward examples") {
  auto b = total_reward(valid_with_answer(2), 5, 7);
  CHECK(b.format_ok);
  CHECK(std::abs(b.total - 0.7) <= 1e-12);
  CHECK(std::abs(*b.answer_reward - 0.7) <= 1e-12);
  CHECK(*b.length_reward == 1.0);
  CHECK(b.raw_delta == 2.0);

  b = total_reward(check_format(TokenSeq{Mode1, AnsOpen}), 5, 7);
  CHECK_FALSE(b.format_ok);
  CHECK(b.total == -2.0);
  CHECK_FALSE(b.answer_reward);
  CHECK_FALSE(b.length_reward);

  b = total_reward(valid_with_answer(5), 4, 4);
  CHECK(std::abs(b.total - 0.25) <= 1e-12);
  CHECK(b.scaled_delta == 0.0);
}

TEST_CASE("reward monotonicity and bounds") {
  for (int s = 0; s <= 10; ++s) {
    double prev = -1.0;
    for (int k = 0; k <= 40; ++k) {
      const double after = k * 0.25;
      const double ra = answer_reward(s, after).reward;
      CHECK(ra >= 0.0);
      CHECK(ra <= 1.0);
      CHECK(ra > prev);
      prev = ra;
    }
    if (s < 10) CHECK(answer_reward(s, 10).scaled_delta == 1.0);
    if (s > 0) CHECK(answer_reward(s, 0).scaled_delta == -1.0);
  }
  double prev = 2.0;
  for (int l = 0; l <= 40; ++l) {
    const double rl = length_reward(l);
    CHECK(rl <= prev);
    CHECK(rl >= 0.0);
    CHECK(rl <= 1.0);
    prev = rl;
  }
  for (int l = 1; l <= 10; ++l)
    for (int s = 0; s <= 10; ++s)
      for (int a = s; a <= 10; ++a) {
        const double r = total_reward(valid_with_answer(l), s, a).total;
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
      }
}

TEST_CASE("judge response parsing") {
  CHECK(parse_judge_score(R"({"score": 6.5})") == 6.5);
  CHECK(parse_judge_score(R"({"score": "3"})") == 3.0);
  CHECK(parse_judge_score(R"({"agent1": {"score": "7"}})") == 7.0);
  CHECK(parse_judge_score(R"({"score": "11"})") == 10.0);
  CHECK(parse_judge_score(R"({"score": -4})") == 0.0);
  CHECK_THROWS_AS(parse_judge_score("not json"), JudgeError);
  CHECK_THROWS_AS(parse_judge_score(R"({"reason": "x"})"), JudgeError);
  CHECK_THROWS_AS(parse_judge_score(R"({"score": "high"})"), JudgeError);
  CHECK_THROWS_AS(parse_judge_score("[7]"), JudgeError);
}

TEST_CASE("judge request layout") {
  const auto j = judge_request(judged_state());
  CHECK(j["goal"]["difficulty"] == 3);
  CHECK(j["goal"]["target"] == "S6");
  REQUIRE(j["history"].size() == 1);
  CHECK(j["history"][0]["speaker"] == "partner");
  CHECK(j["history"][0]["tokens"] == nlohmann::json::array({"S2", "FILLER", "S3"}));
}

TEST_CASE("remote judge over http") {
  const FormatVerdict v = check_format(canonical_scaffold(3, {S6, Filler}));

  SUBCASE("nested string score") {
    StubServer srv(R"({"agent1":{"score":"7"}})");
    const HttpJudge judge(config_for(srv));
    CHECK(judge.score(judged_state(), v) == 7.0);
    CHECK(srv.hits == 1);
    const auto req = nlohmann::json::parse(srv.last_request);
    CHECK(req["history"].size() == 2);
    CHECK(req["history"][1]["speaker"] == "learner");
    CHECK(req["history"][1]["tokens"] == nlohmann::json::array({"S6", "FILLER"}));
  }
  SUBCASE("out of range score is clamped") {
    StubServer srv(R"({"score":"11"})");
    CHECK(HttpJudge(config_for(srv)).score(judged_state(), v) == 10.0);
  }
  SUBCASE("non-json body fails after retries") {
    StubServer srv("<html>oops</html>");
    CHECK_THROWS_AS(HttpJudge(config_for(srv, 3)).score(judged_state(), v), JudgeError);
    CHECK(srv.hits == 4);
  }
  SUBCASE("server error fails after retries") {
    StubServer srv(R"({"score":5})", 500);
    CHECK_THROWS_AS(HttpJudge(config_for(srv, 1)).score(judged_state(), v), JudgeError);
    CHECK(srv.hits == 2);
  }
  SUBCASE("unreachable endpoint") {
    int port = 0;
    {
      httplib::Server probe;
      port = probe.bind_to_any_port("127.0.0.1");
    }
    const HttpJudge judge({"http://127.0.0.1:" + std::to_string(port), std::chrono::milliseconds(300), 1});
    CHECK_THROWS_AS(judge.score(judged_state(), v), JudgeError);
  }
  CHECK_THROWS_AS(HttpJudge(HttpJudgeConfig{}), std::invalid_argument);
}
