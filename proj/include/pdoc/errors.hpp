#pragma once

#include <stdexcept>
#include <string>

namespace pdoc {

// Base class for everything thrown by this library on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Scenario / trajectory file problems: bad JSON shape, missing fields,
// violated invariants. The message names the offending field.
struct SchemaError : Error {
  using Error::Error;
};

// Primitive-set ID string that does not match the grammar or violates
// range invariants. Carries the offending token.
struct MalformedIdError : Error {
  std::string token;
  MalformedIdError(const std::string& msg, std::string tok)
      : Error(msg), token(std::move(tok)) {}
};

struct EmptyPrimitiveSetError : Error {
  using Error::Error;
};

// Anchor state does not match a primitive's start velocity/steering.
struct ConnectivityError : Error {
  using Error::Error;
};

// Scenario has no lanelets; lane offsets are undefined.
struct NoLaneInformationError : Error {
  using Error::Error;
};

// Initial state too far from the primitive sample grid to snap.
struct InfeasibleStartError : Error {
  using Error::Error;
};

// A state's time step lies beyond the scenario horizon.
struct HorizonExceededError : Error {
  using Error::Error;
};

// Heuristic expression text rejected by the parser. Message carries
// position and expectation; reused verbatim as LLM feedback.
struct DslError : Error {
  using Error::Error;
};

// LLM response was not valid JSON.
struct ResponseParseError : Error {
  using Error::Error;
};

// LLM response lacked a required key. The key appears verbatim in the
// message so feedback prompts can quote it.
struct MissingKeyError : Error {
  std::string key;
  explicit MissingKeyError(const std::string& k)
      : Error("missing response key: " + k), key(k) {}
};

// HTTP-level failure talking to a live backend. Retriable.
struct TransportError : Error {
  using Error::Error;
};

// Mock backend ran out of scripted responses.
struct ScriptExhaustedError : Error {
  using Error::Error;
};

// Token budget cannot cover the next query.
struct BudgetExhaustedError : Error {
  using Error::Error;
};

// A proposed patch could not be applied (bad DSL, bad ID, unknown feature).
struct PatchError : Error {
  using Error::Error;
};

// The planner failed on the unpatched configuration; nothing to repair.
struct InitialPlanFailureError : Error {
  using Error::Error;
};

// Missing API key / endpoint configuration for the HTTP backend.
struct ConfigError : Error {
  using Error::Error;
};

// File could not be opened or written at all (as opposed to content
// problems, which are SchemaError).
struct IoError : Error {
  using Error::Error;
};

}  // namespace pdoc
