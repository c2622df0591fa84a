#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "sqleq/errors.hpp"
#include "sqleq/judge.hpp"
#include "sqleq/provider.hpp"
#include "sqleq/universes.hpp"

using namespace sqleq;

namespace {

PromptInputs sample_inputs(const Schema* schema = nullptr) {
  PromptInputs inputs;
  inputs.nl_question = "Which customers placed an order?";
  inputs.sql1 = "SELECT customer_name FROM customers WHERE customer_id IN "
                "(SELECT customer_id FROM orders)";
  inputs.sql2 = "SELECT DISTINCT customers.customer_name FROM customers JOIN orders "
                "ON customers.customer_id = orders.customer_id";
  inputs.schema = schema;
  return inputs;
}

std::string response_for(RunVerdict verdict) {
  switch (verdict) {
    case RunVerdict::Equivalent:
      return R"(Reasoning text. {"reasoning": "same rows", "equivalence": "equivalent"})";
    case RunVerdict::NotEquivalent:
      return R"({"reasoning": "filters differ", "equivalence": "not equivalent"})";
    case RunVerdict::Undetermined:
      return "I cannot tell.";
  }
  return "";
}

std::vector<std::string> script(const std::vector<RunVerdict>& verdicts) {
  std::vector<std::string> out;
  for (RunVerdict v : verdicts) out.push_back(response_for(v));
  return out;
}

}  // namespace

TEST_CASE("prompts embed the queries and end with the answer format") {
  PromptInputs inputs = sample_inputs();

  std::string basic = build_prompt(TemplateKind::Basic, inputs);
  REQUIRE(basic.find(inputs.sql1) != std::string::npos);
  REQUIRE(basic.find(inputs.sql2) != std::string::npos);
  REQUIRE(basic.find(inputs.nl_question) != std::string::npos);
  REQUIRE(basic.find("\"equivalence\"") != std::string::npos);
  REQUIRE(basic.find("think step by step") != std::string::npos);
  // The format instruction is the tail of the prompt.
  REQUIRE(basic.rfind("\"equivalence\"") > basic.find(inputs.sql2));

  std::string improved = build_prompt(TemplateKind::Improved, inputs);
  REQUIRE(improved.find("\"overall assessment\"") != std::string::npos);
  REQUIRE(improved.find("minor difference") != std::string::npos);

  const Schema& commerce = universe("commerce");
  PromptInputs with_schema = sample_inputs(&commerce);
  std::string mm = build_prompt(TemplateKind::MiniatureMull, with_schema);
  REQUIRE(mm.find("TABLE customers") != std::string::npos);
  REQUIRE(mm.find("decision = \"equivalent\"") != std::string::npos);
  REQUIRE(mm.find("case-sensitive") != std::string::npos);

  std::string combined = build_prompt(TemplateKind::CombinedDetailedMM, with_schema);
  REQUIRE(combined.find("\"overall_assessment\"") != std::string::npos);
  REQUIRE(combined.find("TABLE orders") != std::string::npos);
}

TEST_CASE("prompt assembly is deterministic and validates slots") {
  const Schema& commerce = universe("commerce");
  PromptInputs inputs = sample_inputs(&commerce);
  REQUIRE(build_prompt(TemplateKind::Improved, inputs) ==
          build_prompt(TemplateKind::Improved, inputs));

  SECTION("simulated-execution templates require a schema") {
    PromptInputs no_schema = sample_inputs();
    REQUIRE_THROWS_AS(build_prompt(TemplateKind::MiniatureMull, no_schema), MissingSlot);
    REQUIRE_THROWS_AS(build_prompt(TemplateKind::CombinedDetailedMM, no_schema), MissingSlot);
    try {
      build_prompt(TemplateKind::MiniatureMull, no_schema);
    } catch (const MissingSlot& e) {
      REQUIRE(e.slot() == "schema");
    }
  }
  SECTION("queries are mandatory for every template") {
    PromptInputs empty = sample_inputs(&commerce);
    empty.sql2.clear();
    REQUIRE_THROWS_AS(build_prompt(TemplateKind::Basic, empty), MissingSlot);
  }
  SECTION("optional execution results appear when given") {
    PromptInputs with_results = sample_inputs(&commerce);
    with_results.execution_results = "Q1 rows: 2; Q2 rows: 2";
    std::string text = build_prompt(TemplateKind::Improved, with_results);
    REQUIRE(text.find("Q1 rows: 2; Q2 rows: 2") != std::string::npos);
    std::string without = build_prompt(TemplateKind::Improved, sample_inputs(&commerce));
    REQUIRE(without.find("execution results") == std::string::npos);
  }
}

TEST_CASE("responses parse from the binary equivalence key") {
  RunRecord rec = parse_response(
      R"(Let me think. {"reasoning": "both dedupe", "equivalence": "equivalent"})");
  REQUIRE(rec.verdict == RunVerdict::Equivalent);
  REQUIRE(rec.reasoning == "both dedupe");

  rec = parse_response(R"({"equivalence": "not equivalent"})");
  REQUIRE(rec.verdict == RunVerdict::NotEquivalent);

  rec = parse_response(R"({"equivalence": "NOT_EQUIVALENT"})");
  REQUIRE(rec.verdict == RunVerdict::NotEquivalent);

  rec = parse_response("free text with no structured answer");
  REQUIRE(rec.verdict == RunVerdict::Undetermined);
  REQUIRE(rec.raw_response == "free text with no structured answer");
}

TEST_CASE("grade mapping is total and strict mode flips minor differences") {
  const std::vector<std::pair<AssessmentGrade, RunVerdict>> weak = {
      {AssessmentGrade::Equivalent, RunVerdict::Equivalent},
      {AssessmentGrade::MinorDifference, RunVerdict::Equivalent},
      {AssessmentGrade::SignificantDifference, RunVerdict::NotEquivalent},
      {AssessmentGrade::NotEquivalent, RunVerdict::NotEquivalent},
      {AssessmentGrade::Undetermined, RunVerdict::Undetermined},
  };
  for (const auto& [grade, expected] : weak) {
    REQUIRE(verdict_of(grade, false) == expected);
    std::string raw = std::string(R"({"overall assessment": ")") + to_string(grade) + "\"}";
    RunRecord rec = parse_response(raw);
    INFO(raw);
    REQUIRE(rec.verdict == expected);
    REQUIRE(rec.grade == grade);
  }
  REQUIRE(verdict_of(AssessmentGrade::MinorDifference, true) == RunVerdict::NotEquivalent);
  RunRecord strict = parse_response(R"({"overall assessment": "minor difference"})", true);
  REQUIRE(strict.verdict == RunVerdict::NotEquivalent);
}

TEST_CASE("assessment key spellings and grade misspellings are accepted") {
  REQUIRE(parse_response(R"({"overall accessment": "minor difference"})").verdict ==
          RunVerdict::Equivalent);
  REQUIRE(parse_response(R"({"overall_assessment": "significant_difference"})").verdict ==
          RunVerdict::NotEquivalent);
  RunRecord undermined = parse_response(R"({"overall accessment": "undermined"})");
  REQUIRE(undermined.verdict == RunVerdict::Undetermined);
  REQUIRE(undermined.grade == AssessmentGrade::Undetermined);
  REQUIRE(parse_response(R"({"overall assessment": "excellent"})").verdict ==
          RunVerdict::Undetermined);
}

TEST_CASE("the last well-formed JSON object wins") {
  RunRecord rec = parse_response(
      R"(First try: {"equivalence": "equivalent"} but on reflection )"
      R"({"equivalence": "not equivalent"})");
  REQUIRE(rec.verdict == RunVerdict::NotEquivalent);

  SECTION("braces inside strings do not confuse the scan") {
    rec = parse_response(
        R"({"reasoning": "the set {1,2} vs {2,1}", "equivalence": "equivalent"})");
    REQUIRE(rec.verdict == RunVerdict::Equivalent);
    REQUIRE(rec.reasoning == "the set {1,2} vs {2,1}");
  }
  SECTION("a well-formed object inside a truncated one is recovered") {
    rec = parse_response(
        R"({"outer": "never closed", "inner": {"equivalence": "equivalent"})");
    REQUIRE(rec.verdict == RunVerdict::Equivalent);
  }
  SECTION("failure category is retained when present") {
    rec = parse_response(
        R"({"equivalence": "not equivalent", "failure_category": "missing-join"})");
    REQUIRE(rec.failure_category == "missing-join");
  }
}

TEST_CASE("bare decision lines parse as a fallback") {
  REQUIRE(parse_response("... decision = \"equivalent\"").verdict == RunVerdict::Equivalent);
  REQUIRE(parse_response("decision = \"inequivalent\"").verdict == RunVerdict::NotEquivalent);
  REQUIRE(parse_response("Decision = equivalent").verdict == RunVerdict::Equivalent);
  REQUIRE(parse_response("decision = not equivalent").verdict == RunVerdict::NotEquivalent);
  // The last stated decision wins.
  REQUIRE(parse_response("decision = \"equivalent\"\nwait...\ndecision = \"inequivalent\"")
              .verdict == RunVerdict::NotEquivalent);
}

TEST_CASE("unanimous first waves finish early and are stable") {
  JudgeConfig config;
  config.kind = TemplateKind::Basic;

  SECTION("all equivalent") {
    ScriptedProvider provider(script({RunVerdict::Equivalent, RunVerdict::Equivalent,
                                      RunVerdict::Equivalent}));
    Judgment j = judge(sample_inputs(), provider, config);
    REQUIRE(j.verdict == JudgeVerdict::Equivalent);
    REQUIRE(j.stable);
    REQUIRE(j.runs.size() == 3);
    REQUIRE(provider.calls() == 3);
  }
  SECTION("agreement among determinate votes tolerates an undetermined run") {
    ScriptedProvider provider(script({RunVerdict::NotEquivalent, RunVerdict::Undetermined,
                                      RunVerdict::NotEquivalent}));
    Judgment j = judge(sample_inputs(), provider, config);
    REQUIRE(j.verdict == JudgeVerdict::NotEquivalent);
    REQUIRE(j.stable);
    REQUIRE(provider.calls() == 3);
    REQUIRE(j.vote_counts.at(RunVerdict::Undetermined) == 1);
  }
  SECTION("an all-undetermined first wave is not unanimous") {
    ScriptedProvider provider(script({RunVerdict::Undetermined, RunVerdict::Undetermined,
                                      RunVerdict::Undetermined, RunVerdict::Equivalent,
                                      RunVerdict::Equivalent}));
    Judgment j = judge(sample_inputs(), provider, config);
    REQUIRE(j.verdict == JudgeVerdict::Equivalent);
    REQUIRE_FALSE(j.stable);
    REQUIRE(provider.calls() == 5);
  }
}

TEST_CASE("split first waves extend to the full budget and take the majority") {
  JudgeConfig config;
  config.kind = TemplateKind::Basic;

  SECTION("3-2 majority") {
    ScriptedProvider provider(script({RunVerdict::Equivalent, RunVerdict::NotEquivalent,
                                      RunVerdict::Equivalent, RunVerdict::NotEquivalent,
                                      RunVerdict::NotEquivalent}));
    Judgment j = judge(sample_inputs(), provider, config);
    REQUIRE(j.verdict == JudgeVerdict::NotEquivalent);
    REQUIRE_FALSE(j.stable);
    REQUIRE(provider.calls() == 5);
    REQUIRE(j.vote_counts.at(RunVerdict::NotEquivalent) == 3);
    REQUIRE(j.vote_counts.at(RunVerdict::Equivalent) == 2);
  }
  SECTION("determinate tie is unstable") {
    ScriptedProvider provider(script({RunVerdict::Equivalent, RunVerdict::NotEquivalent,
                                      RunVerdict::Undetermined, RunVerdict::Equivalent,
                                      RunVerdict::NotEquivalent}));
    Judgment j = judge(sample_inputs(), provider, config);
    REQUIRE(j.verdict == JudgeVerdict::Unstable);
    REQUIRE_FALSE(j.stable);
  }
}

TEST_CASE("protocol outcomes across every verdict sequence") {
  // Reference model: first wave of 3; unanimity = some determinate votes, all
  // agreeing; otherwise run all 5 and take the strict determinate majority.
  JudgeConfig config;
  config.kind = TemplateKind::Basic;
  const RunVerdict kinds[3] = {RunVerdict::Equivalent, RunVerdict::NotEquivalent,
                               RunVerdict::Undetermined};

  // verdict keyed by the multiset of *executed* run verdicts, to confirm
  // order-independence of the final decision.
  std::map<std::vector<int>, JudgeVerdict> by_multiset;

  for (int code = 0; code < 3 * 3 * 3 * 3 * 3; ++code) {
    int digits[5];
    int rest = code;
    for (int i = 0; i < 5; ++i) {
      digits[i] = rest % 3;
      rest /= 3;
    }
    std::vector<RunVerdict> seq;
    for (int i = 0; i < 5; ++i) seq.push_back(kinds[digits[i]]);

    int e3 = 0, n3 = 0;
    for (int i = 0; i < 3; ++i) {
      if (seq[i] == RunVerdict::Equivalent) ++e3;
      if (seq[i] == RunVerdict::NotEquivalent) ++n3;
    }
    bool early = (e3 > 0) != (n3 > 0);
    std::size_t expected_calls = early ? 3 : 5;
    JudgeVerdict expected;
    if (early) {
      expected = e3 > 0 ? JudgeVerdict::Equivalent : JudgeVerdict::NotEquivalent;
    } else {
      int e5 = 0, n5 = 0;
      for (RunVerdict v : seq) {
        if (v == RunVerdict::Equivalent) ++e5;
        if (v == RunVerdict::NotEquivalent) ++n5;
      }
      expected = e5 > n5   ? JudgeVerdict::Equivalent
                 : n5 > e5 ? JudgeVerdict::NotEquivalent
                           : JudgeVerdict::Unstable;
    }

    ScriptedProvider provider(script(seq));
    Judgment j = judge(sample_inputs(), provider, config);
    INFO("sequence code " << code);
    REQUIRE(j.verdict == expected);
    REQUIRE(provider.calls() == expected_calls);
    REQUIRE(j.runs.size() == expected_calls);
    REQUIRE(j.stable == early);
    int total = 0;
    for (const auto& [v, count] : j.vote_counts) total += count;
    REQUIRE(total == static_cast<int>(expected_calls));

    std::vector<int> multiset;
    for (std::size_t i = 0; i < expected_calls; ++i) multiset.push_back(digits[i]);
    std::sort(multiset.begin(), multiset.end());
    auto [it, inserted] = by_multiset.emplace(multiset, j.verdict);
    REQUIRE(it->second == j.verdict);
  }
}

TEST_CASE("judge budgets respect custom run counts") {
  JudgeConfig config;
  config.kind = TemplateKind::Basic;
  config.default_runs = 1;
  config.max_runs = 1;

  SECTION("a single determinate run decides") {
    ScriptedProvider provider(script({RunVerdict::Equivalent}));
    Judgment j = judge(sample_inputs(), provider, config);
    REQUIRE(j.verdict == JudgeVerdict::Equivalent);
    REQUIRE(j.stable);
    REQUIRE(provider.calls() == 1);
  }
  SECTION("a single undetermined run is unstable") {
    ScriptedProvider provider(script({RunVerdict::Undetermined}));
    Judgment j = judge(sample_inputs(), provider, config);
    REQUIRE(j.verdict == JudgeVerdict::Unstable);
    REQUIRE_FALSE(j.stable);
    REQUIRE(provider.calls() == 1);
  }
  SECTION("invalid budgets are rejected") {
    ScriptedProvider provider(script({RunVerdict::Equivalent}));
    JudgeConfig bad;
    bad.default_runs = 0;
    REQUIRE_THROWS_AS(judge(sample_inputs(), provider, bad), InputFormatError);
    bad.default_runs = 6;
    bad.max_runs = 5;
    REQUIRE_THROWS_AS(judge(sample_inputs(), provider, bad), InputFormatError);
  }
}

TEST_CASE("provider failures surface as ProviderError") {
  ScriptedProvider provider(script({RunVerdict::Equivalent, RunVerdict::NotEquivalent}));
  JudgeConfig config;
  config.kind = TemplateKind::Basic;
  REQUIRE_THROWS_AS(judge(sample_inputs(), provider, config), ProviderError);
}

TEST_CASE("scripted responses load from JSONL") {
  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() / "sqleq_scripted_responses.jsonl";
  {
    std::ofstream out(path);
    out << R"("line one\nwith a newline")" << "\n";
    out << "plain text line" << "\n";
    out << "\n";  // blank lines are skipped
    out << R"({"equivalence": "equivalent"})" << "\n";
  }
  ScriptedProvider provider = ScriptedProvider::from_jsonl(path.string());
  REQUIRE(provider.complete("p", 0.0) == "line one\nwith a newline");
  REQUIRE(provider.complete("p", 0.0) == "plain text line");
  // A JSON object line is kept verbatim (it is a response body, not a string).
  REQUIRE(parse_response(provider.complete("p", 0.0)).verdict == RunVerdict::Equivalent);
  REQUIRE_THROWS_AS(provider.complete("p", 0.0), ProviderError);
  fs::remove(path);

  REQUIRE_THROWS_AS(ScriptedProvider::from_jsonl("/nonexistent/file.jsonl"), InputFormatError);
}

TEST_CASE("token bucket enforces rate and burst") {
  TokenBucket bucket(2.0, 3.0);  // 2 per second, burst of 3

  REQUIRE(bucket.try_acquire(0.0));
  REQUIRE(bucket.try_acquire(0.0));
  REQUIRE(bucket.try_acquire(0.0));
  REQUIRE_FALSE(bucket.try_acquire(0.0));
  REQUIRE(bucket.next_available(0.0) == Catch::Approx(0.5));

  REQUIRE_FALSE(bucket.try_acquire(0.4));
  REQUIRE(bucket.try_acquire(0.5));
  REQUIRE_FALSE(bucket.try_acquire(0.5));

  // Long idle refills to the burst cap, no further.
  REQUIRE(bucket.try_acquire(100.0));
  REQUIRE(bucket.try_acquire(100.0));
  REQUIRE(bucket.try_acquire(100.0));
  REQUIRE_FALSE(bucket.try_acquire(100.0));

  // Steady acquisitions at the sustained rate always succeed.
  TokenBucket steady(4.0, 1.0);
  for (int i = 0; i < 40; ++i) REQUIRE(steady.try_acquire(i * 0.25));

  REQUIRE_THROWS_AS(TokenBucket(0.0, 3.0), InputFormatError);
  REQUIRE_THROWS_AS(TokenBucket(1.0, 0.5), InputFormatError);
}

TEST_CASE("HTTP provider speaks chat-completion shape with retries") {
  httplib::Server server;
  int hits = 0;
  int fail_first = 0;
  std::string seen_auth;
  std::string seen_body;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    seen_auth = req.get_header_value("Authorization");
    seen_body = req.body;
    if (hits <= fail_first) {
      res.status = 500;
      return;
    }
    nlohmann::json content = {{"equivalence", "equivalent"}};
    nlohmann::json reply = {
        {"choices",
         nlohmann::json::array(
             {nlohmann::json{{"message", nlohmann::json{{"role", "assistant"},
                                                        {"content", content.dump()}}}}})}};
    res.set_content(reply.dump(), "application/json");
  });
  server.Post("/missing-model", [](const httplib::Request&, httplib::Response& res) {
    res.status = 404;
    res.set_content("no such model", "text/plain");
  });

  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  setenv("SQLEQ_TEST_KEY", "secret-token", 1);
  HttpProviderConfig config;
  config.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  config.api_key_env = "SQLEQ_TEST_KEY";
  config.model = "test-model";
  config.retry_limit = 3;

  SECTION("success path carries auth, model and prompt") {
    HttpProvider provider(config);
    std::string content = provider.complete("compare the queries", 0.25);
    REQUIRE(parse_response(content).verdict == RunVerdict::Equivalent);
    REQUIRE(seen_auth == "Bearer secret-token");
    nlohmann::json body = nlohmann::json::parse(seen_body);
    REQUIRE(body["model"] == "test-model");
    REQUIRE(body["temperature"] == Catch::Approx(0.25));
    REQUIRE(body["messages"][0]["content"] == "compare the queries");
    REQUIRE(hits == 1);
  }
  SECTION("transient server errors are retried") {
    hits = 0;
    fail_first = 2;
    HttpProvider provider(config);
    std::string content = provider.complete("p", 0.0);
    REQUIRE(parse_response(content).verdict == RunVerdict::Equivalent);
    REQUIRE(hits == 3);
  }
  SECTION("exhausted retries raise ProviderError") {
    hits = 0;
    fail_first = 1000;
    HttpProvider provider(config);
    REQUIRE_THROWS_AS(provider.complete("p", 0.0), ProviderError);
    REQUIRE(hits == 3);
  }
  SECTION("client errors fail immediately") {
    hits = 0;
    HttpProviderConfig bad = config;
    bad.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/missing-model";
    HttpProvider provider(bad);
    REQUIRE_THROWS_AS(provider.complete("p", 0.0), ProviderError);
  }
  SECTION("unreachable endpoints raise ProviderError") {
    HttpProviderConfig dead = config;
    dead.endpoint = "http://127.0.0.1:1/v1/chat/completions";
    dead.timeout_seconds = 1;
    dead.retry_limit = 1;
    HttpProvider provider(dead);
    REQUIRE_THROWS_AS(provider.complete("p", 0.0), ProviderError);
  }

  server.stop();
  listener.join();
  unsetenv("SQLEQ_TEST_KEY");
}
