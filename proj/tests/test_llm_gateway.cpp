#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "pdoc/errors.hpp"
#include "pdoc/llm_gateway.hpp"
#include "pdoc/prompt_builder.hpp"

using namespace pdoc;
using doctest::Contains;

namespace {

std::string write_tmp(const std::string& name, const std::string& content) {
  std::string path = std::string("/tmp/pdoc_gateway_") + name;
  std::ofstream out(path);
  out << content;
  return path;
}

PromptBundle tiny_bundle(const std::string& body = "hello") {
  PromptBundle bundle;
  bundle.system = "sys";
  bundle.user_sections = {{"instructions", body + "\n"}};
  return bundle;
}

// Backend with provider-reported token counts, for testing the charging rule.
class CountedReplyBackend : public LlmBackend {
 public:
  CountedReplyBackend(std::string text, std::optional<std::int64_t> prompt,
                      std::optional<std::int64_t> completion)
      : text_(std::move(text)), prompt_(prompt), completion_(completion) {}

  BackendReply complete(const std::string& system, const std::string& user,
                        const LlmParams&) override {
    last_system = system;
    last_user = user;
    ++calls;
    return BackendReply{text_, prompt_, completion_};
  }

  std::string last_system, last_user;
  int calls = 0;

 private:
  std::string text_;
  std::optional<std::int64_t> prompt_, completion_;
};

DiagnosisResult sample_result() {
  DiagnosisResult r;
  r.pairs = {{"the heuristic ignores acceleration", "add acceleration_cost"},
             {"too coarse", "refine the grid"}};
  r.patched_heuristic = "velocity + 2 * time_cost";
  r.primitive_set_id = "V_0.0_20.0_Vstep_2.0_SA_-1.066_1.066_SAstep_0.18_T_0.5_Model_BMW_320i";
  return r;
}

}  // namespace

TEST_CASE("token estimate is ceil of a quarter of the character count") {
  CHECK(estimate_tokens("") == 0);
  CHECK(estimate_tokens("a") == 1);
  CHECK(estimate_tokens("abcd") == 1);
  CHECK(estimate_tokens("abcde") == 2);
  CHECK(estimate_tokens("12345678") == 2);
  CHECK(estimate_tokens("123456789") == 3);
  CHECK(estimate_tokens(std::string(8000, 'x')) == 2000);
  for (int n = 0; n <= 64; ++n) {
    CAPTURE(n);
    CHECK(estimate_tokens(std::string(n, 'q')) == (n + 4 - 1) / 4);
  }
}

TEST_CASE("budget bookkeeping") {
  TokenBudget b{100, 0};
  CHECK_FALSE(b.exhausted());
  CHECK(b.remaining() == 100);
  b.consumed = 40;
  CHECK(b.remaining() == 60);
  b.consumed = 100;
  CHECK(b.exhausted());
  CHECK(b.remaining() == 0);
  b.consumed = 150;  // over-consumption clamps, never goes negative
  CHECK(b.exhausted());
  CHECK(b.remaining() == 0);

  TokenBudget zero{0, 0};
  CHECK(zero.exhausted());
}

TEST_CASE("mock backend replays a script in order") {
  MockBackend backend(std::vector<std::string>{"one", "two", "three"});
  CHECK(backend.remaining() == 3);
  LlmParams params;
  CHECK(backend.complete("s", "u", params).text == "one");
  CHECK(backend.complete("s", "u", params).text == "two");
  CHECK(backend.remaining() == 1);
  BackendReply last = backend.complete("s", "u", params);
  CHECK(last.text == "three");
  CHECK_FALSE(last.prompt_tokens.has_value());
  CHECK_FALSE(last.completion_tokens.has_value());
  CHECK(backend.remaining() == 0);
  CHECK_THROWS_WITH_AS(backend.complete("s", "u", params),
                       "mock script exhausted after 3 responses",
                       ScriptExhaustedError);
  // stays exhausted
  CHECK_THROWS_AS(backend.complete("s", "u", params), ScriptExhaustedError);
}

TEST_CASE("mock script files skip blank lines and keep literal text") {
  std::string path = write_tmp("ok.jsonl",
                               "\n"
                               "\"first response\"\n"
                               "   \t \n"
                               "\"second\\nwith a newline\"\n"
                               "\n");
  MockBackend backend(path);
  CHECK(backend.remaining() == 2);
  LlmParams params;
  CHECK(backend.complete("s", "u", params).text == "first response");
  CHECK(backend.complete("s", "u", params).text == "second\nwith a newline");
  CHECK_THROWS_WITH_AS(backend.complete("s", "u", params),
                       "mock script exhausted after 2 responses",
                       ScriptExhaustedError);
  std::remove(path.c_str());
}

TEST_CASE("mock script errors carry the path and line number") {
  CHECK_THROWS_WITH_AS((MockBackend("/no/such/dir/script.jsonl")),
                       "cannot open mock script: /no/such/dir/script.jsonl",
                       IoError);

  std::string bad_json = write_tmp("bad.jsonl", "\"fine\"\n{not json\n");
  CHECK_THROWS_WITH_AS((MockBackend(bad_json)),
                       Contains(("mock script " + bad_json + " line 2: ").c_str()),
                       Error);

  // blank lines still advance the reported line number
  std::string not_string = write_tmp("notstring.jsonl", "\n\n42\n");
  CHECK_THROWS_WITH_AS(
      (MockBackend(not_string)),
      ("mock script " + not_string + " line 3: expected a JSON string literal").c_str(),
      Error);

  std::string array = write_tmp("array.jsonl", "[\"x\"]\n");
  CHECK_THROWS_WITH_AS(
      (MockBackend(array)),
      ("mock script " + array + " line 1: expected a JSON string literal").c_str(),
      Error);

  std::remove(bad_json.c_str());
  std::remove(not_string.c_str());
  std::remove(array.c_str());
}

TEST_CASE("query charges estimates when the provider reports no usage") {
  PromptBundle bundle = tiny_bundle();
  MockBackend backend(std::vector<std::string>{"reply text"});
  TokenBudget budget{10000, 0};
  LlmParams params;

  std::string text = query(bundle, params, backend, budget);
  CHECK(text == "reply text");
  std::int64_t expected = estimate_tokens(bundle.system + assemble(bundle)) +
                          estimate_tokens("reply text");
  CHECK(budget.consumed == expected);
}

TEST_CASE("query hands the backend the assembled sections") {
  PromptBundle bundle = tiny_bundle("say hi");
  CountedReplyBackend backend("ok", std::nullopt, std::nullopt);
  TokenBudget budget{10000, 0};
  LlmParams params;
  query(bundle, params, backend, budget);
  CHECK(backend.calls == 1);
  CHECK(backend.last_system == "sys");
  CHECK(backend.last_user == assemble(bundle));
  CHECK(backend.last_user == "## instructions\nsay hi\n\n");
}

TEST_CASE("query prefers provider token counts over estimates") {
  PromptBundle bundle = tiny_bundle();
  LlmParams params;

  {
    CountedReplyBackend backend("a very long reply that would estimate high", 7, 11);
    TokenBudget budget{10000, 0};
    query(bundle, params, backend, budget);
    CHECK(budget.consumed == 18);
  }
  {
    // mixed: reported prompt, estimated completion
    CountedReplyBackend backend("12345678", 7, std::nullopt);
    TokenBudget budget{10000, 0};
    query(bundle, params, backend, budget);
    CHECK(budget.consumed == 7 + 2);
  }
  {
    CountedReplyBackend backend("12345678", std::nullopt, 11);
    TokenBudget budget{10000, 0};
    query(bundle, params, backend, budget);
    CHECK(budget.consumed ==
          estimate_tokens(bundle.system + assemble(bundle)) + 11);
  }
}

TEST_CASE("query refuses an exhausted budget before calling the backend") {
  PromptBundle bundle = tiny_bundle();
  CountedReplyBackend backend("ok", std::nullopt, std::nullopt);
  LlmParams params;

  TokenBudget budget{100, 100};
  CHECK_THROWS_WITH_AS(query(bundle, params, backend, budget),
                       "token budget exhausted: consumed 100 of 100",
                       BudgetExhaustedError);
  budget = TokenBudget{100, 230};
  CHECK_THROWS_WITH_AS(query(bundle, params, backend, budget),
                       "token budget exhausted: consumed 230 of 100",
                       BudgetExhaustedError);
  CHECK(backend.calls == 0);
}

TEST_CASE("query refuses a prompt that cannot fit in the remaining budget") {
  PromptBundle bundle = tiny_bundle(std::string(400, 'p'));
  CountedReplyBackend backend("ok", std::nullopt, std::nullopt);
  LlmParams params;

  std::int64_t need = estimate_tokens(bundle.system + assemble(bundle));
  REQUIRE(need > 5);
  TokenBudget budget{20, 15};
  std::string expected = "prompt of " + std::to_string(need) +
                         " estimated tokens exceeds the remaining budget of 5";
  CHECK_THROWS_WITH_AS(query(bundle, params, backend, budget), expected.c_str(),
                       BudgetExhaustedError);
  CHECK(backend.calls == 0);
  CHECK(budget.consumed == 15);  // refusal charges nothing
}

TEST_CASE("responses parse into structured diagnoses") {
  std::string raw = R"({
    "diagnoses": [
      {"diagnosis": "no acceleration term", "prescription": "add one"},
      {"diagnosis": "coarse sampling", "prescription": "use the finer set", "note": "extra keys are fine"}
    ],
    "patched_heuristic": "velocity + acceleration_cost",
    "motion_primitives_id": "V_0.0_20.0_Vstep_2.0_SA_-1.066_1.066_SAstep_0.18_T_0.5_Model_BMW_320i",
    "confidence": 0.9
  })";
  DiagnosisResult r = parse_response(raw);
  REQUIRE(r.pairs.size() == 2);
  CHECK(r.pairs[0].diagnosis == "no acceleration term");
  CHECK(r.pairs[0].prescription == "add one");
  CHECK(r.pairs[1].diagnosis == "coarse sampling");
  CHECK(r.pairs[1].prescription == "use the finer set");
  CHECK(r.patched_heuristic == "velocity + acceleration_cost");
  CHECK(r.primitive_set_id ==
        "V_0.0_20.0_Vstep_2.0_SA_-1.066_1.066_SAstep_0.18_T_0.5_Model_BMW_320i");
}

TEST_CASE("response validation rejects every malformed shape") {
  CHECK_THROWS_WITH_AS(parse_response("not json at all"),
                       Contains("malformed response JSON: "), ResponseParseError);
  CHECK_THROWS_WITH_AS(parse_response("[1, 2]"), "response must be a JSON object",
                       ResponseParseError);
  CHECK_THROWS_WITH_AS(parse_response("\"just a string\""),
                       "response must be a JSON object", ResponseParseError);

  CHECK_THROWS_WITH_AS(parse_response(R"({"patched_heuristic": "h"})"),
                       "missing response key: diagnoses", MissingKeyError);
  CHECK_THROWS_WITH_AS(parse_response(R"({"diagnoses": "oops"})"),
                       "response key \"diagnoses\" must be a list",
                       ResponseParseError);
  CHECK_THROWS_WITH_AS(parse_response(R"({"diagnoses": [42]})"),
                       "each diagnosis must be an object", ResponseParseError);
  CHECK_THROWS_WITH_AS(
      parse_response(
          R"({"diagnoses": [], "patched_heuristic": "h", "motion_primitives_id": "m"})"),
      "response contains an empty diagnoses list", ResponseParseError);
  CHECK_THROWS_WITH_AS(parse_response(R"({"diagnoses": [{"diagnosis": "d"}]})"),
                       "missing response key: prescription", MissingKeyError);
  CHECK_THROWS_WITH_AS(
      parse_response(R"({"diagnoses": [{"diagnosis": 3, "prescription": "p"}]})"),
      "response key \"diagnosis\" must be a string", ResponseParseError);
  CHECK_THROWS_WITH_AS(
      parse_response(R"({"diagnoses": [{"diagnosis": "d", "prescription": "p"}]})"),
      "missing response key: patched_heuristic", MissingKeyError);
  CHECK_THROWS_WITH_AS(
      parse_response(
          R"({"diagnoses": [{"diagnosis": "d", "prescription": "p"}], "patched_heuristic": 1})"),
      "response key \"patched_heuristic\" must be a string", ResponseParseError);
  CHECK_THROWS_WITH_AS(
      parse_response(
          R"({"diagnoses": [{"diagnosis": "d", "prescription": "p"}], "patched_heuristic": "h"})"),
      "missing response key: motion_primitives_id", MissingKeyError);
  CHECK_THROWS_WITH_AS(
      parse_response(
          R"({"diagnoses": [{"diagnosis": "d", "prescription": "p"}], "patched_heuristic": "h", "motion_primitives_id": null})"),
      "response key \"motion_primitives_id\" must be a string", ResponseParseError);

  try {
    parse_response(R"({"diagnoses": [{"prescription": "p"}]})");
    FAIL("expected MissingKeyError");
  } catch (const MissingKeyError& e) {
    CHECK(e.key == "diagnosis");
  }
}

TEST_CASE("serialize and parse are inverse on valid results") {
  DiagnosisResult r = sample_result();
  CHECK(parse_response(serialize(r)) == r);

  DiagnosisResult tricky;
  tricky.pairs = {{"quotes \" and\nnewlines", "unicode: grüße"}};
  tricky.patched_heuristic = "min(velocity, 1e6) / 4";
  tricky.primitive_set_id = "whatever_raw_text";  // validity is apply_patch's job
  CHECK(parse_response(serialize(tricky)) == tricky);

  // equality is structural
  DiagnosisResult other = sample_result();
  CHECK(r == other);
  other.pairs[1].prescription = "different";
  CHECK_FALSE(r == other);
  other = sample_result();
  other.primitive_set_id += "x";
  CHECK_FALSE(r == other);
  other = sample_result();
  other.pairs.pop_back();
  CHECK_FALSE(r == other);
}

TEST_CASE("http backend requires its API key environment variable") {
  // default env name
  unsetenv("PLANNER_DOCTOR_API_KEY");
  CHECK_THROWS_WITH_AS((HttpBackend(HttpBackendConfig{})),
                       "environment variable PLANNER_DOCTOR_API_KEY is not set; "
                       "required for the HTTP backend",
                       ConfigError);
  setenv("PLANNER_DOCTOR_API_KEY", "", 1);  // empty counts as unset
  CHECK_THROWS_AS((HttpBackend(HttpBackendConfig{})), ConfigError);
  setenv("PLANNER_DOCTOR_API_KEY", "sk-test-not-a-real-key", 1);
  CHECK_NOTHROW((HttpBackend(HttpBackendConfig{})));
  unsetenv("PLANNER_DOCTOR_API_KEY");

  // the variable name is configurable and quoted in the error
  HttpBackendConfig cfg;
  cfg.api_key_env = "PDOC_GATEWAY_TEST_KEY";
  unsetenv("PDOC_GATEWAY_TEST_KEY");
  CHECK_THROWS_WITH_AS((HttpBackend(cfg)),
                       "environment variable PDOC_GATEWAY_TEST_KEY is not set; "
                       "required for the HTTP backend",
                       ConfigError);
  setenv("PDOC_GATEWAY_TEST_KEY", "k", 1);
  CHECK_NOTHROW((HttpBackend(cfg)));
  unsetenv("PDOC_GATEWAY_TEST_KEY");
}

TEST_CASE("default parameters match the documented configuration") {
  LlmParams params;
  CHECK(params.temperature == doctest::Approx(0.6));
  CHECK(params.token_limit == 8000);
  CHECK(params.model_name == "gpt-4");

  HttpBackendConfig cfg;
  CHECK(cfg.base_url == "https://api.openai.com");
  CHECK(cfg.path == "/v1/chat/completions");
  CHECK(cfg.api_key_env == "PLANNER_DOCTOR_API_KEY");
  CHECK(cfg.timeout_seconds == 120);
}
