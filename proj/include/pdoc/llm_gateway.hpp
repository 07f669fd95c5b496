#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pdoc/prompt_builder.hpp"

namespace pdoc {

struct LlmParams {
  double temperature = 0.6;  // in [0, 2]
  int token_limit = 8000;
  std::string model_name = "gpt-4";
};

// Structured diagnosis: the pair list plus both patch fields. Patch texts
// are kept raw here; syntactic validity is checked by apply_patch so that
// a bad patch becomes feedback instead of a hard failure.
struct DiagnosisResult {
  std::vector<DiagnosisEntry> pairs;  // non-empty
  std::string patched_heuristic;
  std::string primitive_set_id;

  friend bool operator==(const DiagnosisResult& a, const DiagnosisResult& b) {
    auto proj = [](const DiagnosisEntry& e) { return std::pair(e.diagnosis, e.prescription); };
    if (a.pairs.size() != b.pairs.size()) return false;
    for (std::size_t i = 0; i < a.pairs.size(); ++i)
      if (proj(a.pairs[i]) != proj(b.pairs[i])) return false;
    return a.patched_heuristic == b.patched_heuristic &&
           a.primitive_set_id == b.primitive_set_id;
  }
};

struct TokenBudget {
  std::int64_t limit = 0;
  std::int64_t consumed = 0;

  bool exhausted() const { return consumed >= limit; }
  std::int64_t remaining() const { return std::max<std::int64_t>(0, limit - consumed); }
};

struct BackendReply {
  std::string text;
  // Provider-reported counts; absent values fall back to estimate_tokens.
  std::optional<std::int64_t> prompt_tokens;
  std::optional<std::int64_t> completion_tokens;
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual BackendReply complete(const std::string& system, const std::string& user,
                                const LlmParams& params) = 0;
};

// Replays canned responses from a JSONL script: one JSON string literal
// per line, consumed in order. Throws ScriptExhaustedError past the end.
class MockBackend : public LlmBackend {
 public:
  explicit MockBackend(const std::string& script_path);
  explicit MockBackend(std::vector<std::string> responses);

  BackendReply complete(const std::string& system, const std::string& user,
                        const LlmParams& params) override;
  std::size_t remaining() const { return responses_.size() - next_; }

 private:
  std::vector<std::string> responses_;
  std::size_t next_ = 0;
};

struct HttpBackendConfig {
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string api_key_env = "PLANNER_DOCTOR_API_KEY";
  int timeout_seconds = 120;
};

// Generic chat-completion endpoint. The API key is read from the
// environment at construction; a missing key is a ConfigError. Transport
// and protocol failures surface as TransportError (retriable).
class HttpBackend : public LlmBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  BackendReply complete(const std::string& system, const std::string& user,
                        const LlmParams& params) override;

 private:
  HttpBackendConfig config_;
  std::string api_key_;
};

// ceil(characters / 4)
std::int64_t estimate_tokens(const std::string& text);

// One round-trip: checks the budget (BudgetExhaustedError when already
// exhausted or the prompt alone overflows what is left), invokes the
// backend with system + assembled user sections, charges prompt and
// response tokens, returns the raw response text.
std::string query(const PromptBundle& bundle, const LlmParams& params,
                  LlmBackend& backend, TokenBudget& budget);

// Validates the response schema; throws ResponseParseError (malformed
// JSON / wrong types / empty pair list) or MissingKeyError (absent key,
// message embeds the key name).
DiagnosisResult parse_response(const std::string& raw);

// Inverse of parse_response on valid values.
std::string serialize(const DiagnosisResult& result);

}  // namespace pdoc
