#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "pdoc/llm_gateway.hpp"

#include <cstdlib>
#include <fstream>

#include "httplib.h"
#include "json.hpp"
#include "pdoc/errors.hpp"

namespace pdoc {

using nlohmann::json;

MockBackend::MockBackend(const std::string& script_path) {
  std::ifstream in(script_path);
  if (!in) throw IoError("cannot open mock script: " + script_path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error("mock script " + script_path + " line " + std::to_string(lineno) +
                  ": " + e.what());
    }
    if (!j.is_string())
      throw Error("mock script " + script_path + " line " + std::to_string(lineno) +
                  ": expected a JSON string literal");
    responses_.push_back(j.get<std::string>());
  }
}

MockBackend::MockBackend(std::vector<std::string> responses)
    : responses_(std::move(responses)) {}

BackendReply MockBackend::complete(const std::string&, const std::string&,
                                   const LlmParams&) {
  if (next_ >= responses_.size())
    throw ScriptExhaustedError("mock script exhausted after " +
                               std::to_string(responses_.size()) + " responses");
  return BackendReply{responses_[next_++], std::nullopt, std::nullopt};
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0')
    throw ConfigError("environment variable " + config_.api_key_env +
                      " is not set; required for the HTTP backend");
  api_key_ = key;
}

BackendReply HttpBackend::complete(const std::string& system, const std::string& user,
                                   const LlmParams& params) {
  json body = {
      {"model", params.model_name},
      {"temperature", params.temperature},
      {"messages",
       json::array({json{{"role", "system"}, {"content", system}},
                    json{{"role", "user"}, {"content", user}}})},
  };

  httplib::Client client(config_.base_url);
  client.set_connection_timeout(config_.timeout_seconds);
  client.set_read_timeout(config_.timeout_seconds);
  client.set_bearer_token_auth(api_key_);

  auto res = client.Post(config_.path, body.dump(), "application/json");
  if (!res)
    throw TransportError("request to " + config_.base_url + config_.path +
                         " failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw TransportError("HTTP status " + std::to_string(res->status) + ": " + res->body);

  json payload;
  try {
    payload = json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw TransportError(std::string("unparseable completion payload: ") + e.what());
  }
  if (!payload.contains("choices") || !payload["choices"].is_array() ||
      payload["choices"].empty() || !payload["choices"][0].contains("message") ||
      !payload["choices"][0]["message"].contains("content") ||
      !payload["choices"][0]["message"]["content"].is_string())
    throw TransportError("completion payload lacks choices[0].message.content");

  BackendReply reply;
  reply.text = payload["choices"][0]["message"]["content"].get<std::string>();
  if (payload.contains("usage") && payload["usage"].is_object()) {
    const json& usage = payload["usage"];
    if (usage.contains("prompt_tokens") && usage["prompt_tokens"].is_number_integer())
      reply.prompt_tokens = usage["prompt_tokens"].get<std::int64_t>();
    if (usage.contains("completion_tokens") &&
        usage["completion_tokens"].is_number_integer())
      reply.completion_tokens = usage["completion_tokens"].get<std::int64_t>();
  }
  return reply;
}

std::int64_t estimate_tokens(const std::string& text) {
  return static_cast<std::int64_t>((text.size() + 3) / 4);
}

std::string query(const PromptBundle& bundle, const LlmParams& params,
                  LlmBackend& backend, TokenBudget& budget) {
  if (budget.exhausted())
    throw BudgetExhaustedError("token budget exhausted: consumed " +
                               std::to_string(budget.consumed) + " of " +
                               std::to_string(budget.limit));
  std::string user = assemble(bundle);
  std::int64_t prompt_estimate = estimate_tokens(bundle.system + user);
  if (prompt_estimate > budget.remaining())
    throw BudgetExhaustedError(
        "prompt of " + std::to_string(prompt_estimate) +
        " estimated tokens exceeds the remaining budget of " +
        std::to_string(budget.remaining()));

  BackendReply reply = backend.complete(bundle.system, user, params);
  std::int64_t charged = reply.prompt_tokens.value_or(prompt_estimate) +
                         reply.completion_tokens.value_or(estimate_tokens(reply.text));
  budget.consumed += charged;
  return reply.text;
}

namespace {

const json& require_key(const json& obj, const std::string& key) {
  if (!obj.contains(key)) throw MissingKeyError(key);
  return obj.at(key);
}

std::string require_string(const json& obj, const std::string& key) {
  const json& v = require_key(obj, key);
  if (!v.is_string())
    throw ResponseParseError("response key \"" + key + "\" must be a string");
  return v.get<std::string>();
}

}  // namespace

DiagnosisResult parse_response(const std::string& raw) {
  json j;
  try {
    j = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ResponseParseError(std::string("malformed response JSON: ") + e.what());
  }
  if (!j.is_object()) throw ResponseParseError("response must be a JSON object");

  DiagnosisResult result;
  const json& diagnoses = require_key(j, "diagnoses");
  if (!diagnoses.is_array())
    throw ResponseParseError("response key \"diagnoses\" must be a list");
  for (const json& entry : diagnoses) {
    if (!entry.is_object())
      throw ResponseParseError("each diagnosis must be an object");
    result.pairs.push_back(DiagnosisEntry{require_string(entry, "diagnosis"),
                                          require_string(entry, "prescription")});
  }
  if (result.pairs.empty())
    throw ResponseParseError("response contains an empty diagnoses list");
  result.patched_heuristic = require_string(j, "patched_heuristic");
  result.primitive_set_id = require_string(j, "motion_primitives_id");
  return result;
}

std::string serialize(const DiagnosisResult& result) {
  json pairs = json::array();
  for (const DiagnosisEntry& e : result.pairs)
    pairs.push_back(json{{"diagnosis", e.diagnosis}, {"prescription", e.prescription}});
  json j = {{"diagnoses", pairs},
            {"patched_heuristic", result.patched_heuristic},
            {"motion_primitives_id", result.primitive_set_id}};
  return j.dump();
}

}  // namespace pdoc
