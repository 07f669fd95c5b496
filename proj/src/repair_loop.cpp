#include "pdoc/repair_loop.hpp"

#include <fstream>
#include <map>
#include <memory>

#include "json.hpp"
#include "pdoc/errors.hpp"

namespace pdoc {

using nlohmann::json;

namespace {

// Primitive sets are expensive to generate and patches often reuse IDs.
class PrimitiveSetCache {
 public:
  const PrimitiveSet& get(const PrimitiveSetId& id, double dt) {
    std::string key = format_primitive_id(id);
    auto it = sets_.find(key);
    if (it == sets_.end()) {
      auto set = std::make_shared<PrimitiveSet>(
          generate_primitive_set(id, default_model_params(id.model), dt));
      it = sets_.emplace(key, std::move(set)).first;
    }
    return *it->second;
  }

 private:
  std::map<std::string, std::shared_ptr<const PrimitiveSet>> sets_;
};

// Salvages the diagnosis pairs from a response that failed strict
// parsing, so the feedback can still reference them.
std::vector<DiagnosisEntry> extract_pairs_best_effort(const std::string& raw) {
  std::vector<DiagnosisEntry> pairs;
  json j = json::parse(raw, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("diagnoses") ||
      !j["diagnoses"].is_array())
    return pairs;
  for (const json& entry : j["diagnoses"]) {
    if (entry.is_object() && entry.contains("diagnosis") &&
        entry["diagnosis"].is_string() && entry.contains("prescription") &&
        entry["prescription"].is_string())
      pairs.push_back(DiagnosisEntry{entry["diagnosis"].get<std::string>(),
                                     entry["prescription"].get<std::string>()});
  }
  return pairs;
}

json record_to_json(const IterationRecord& r) {
  json j = {{"type", "iteration"},
            {"index", r.index},
            {"patch_outcome", to_string(r.patch_outcome)},
            {"tokens_after", r.tokens_after},
            {"feedback_kind", r.feedback.kind == FeedbackRecord::Kind::evaluation
                                  ? "evaluation"
                                  : "execution_error"},
            {"feedback_detail", r.feedback.detail}};
  j["J_rep"] = r.J_rep ? json(*r.J_rep) : json(nullptr);
  if (r.diagnosis) {
    json pairs = json::array();
    for (const DiagnosisEntry& e : r.diagnosis->pairs)
      pairs.push_back({{"diagnosis", e.diagnosis}, {"prescription", e.prescription}});
    j["diagnosis"] = {{"diagnoses", pairs},
                      {"patched_heuristic", r.diagnosis->patched_heuristic},
                      {"motion_primitives_id", r.diagnosis->primitive_set_id}};
  } else {
    j["diagnosis"] = nullptr;
    j["diagnosis_error"] = r.diagnosis_error;
  }
  return j;
}

void write_log(const std::string& path, const SessionOutcome& outcome) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write session log: " + path);
  for (const IterationRecord& r : outcome.log) out << record_to_json(r).dump() << "\n";
  json terminal = {{"type", "outcome"},
                   {"J_initial", outcome.J_initial},
                   {"J_min", outcome.J_min},
                   {"stop_reason", to_string(outcome.stop_reason)},
                   {"iterations", outcome.log.size()}};
  if (outcome.best_config) {
    terminal["best_heuristic"] = outcome.best_config->heuristic_text;
    terminal["best_primitives_id"] =
        format_primitive_id(outcome.best_config->primitive_set_id);
  } else {
    terminal["best_heuristic"] = nullptr;
    terminal["best_primitives_id"] = nullptr;
  }
  out << terminal.dump() << "\n";
}

}  // namespace

const char* to_string(IterationRecord::PatchOutcome outcome) {
  switch (outcome) {
    case IterationRecord::PatchOutcome::applied: return "applied";
    case IterationRecord::PatchOutcome::parse_error: return "parse_error";
    case IterationRecord::PatchOutcome::plan_failed: return "plan_failed";
  }
  return "?";
}

const char* to_string(SessionOutcome::StopReason reason) {
  switch (reason) {
    case SessionOutcome::StopReason::target_reached: return "target_reached";
    case SessionOutcome::StopReason::token_limit: return "token_limit";
    case SessionOutcome::StopReason::max_iterations: return "max_iterations";
  }
  return "?";
}

PlannerConfig apply_patch(const PlannerConfig& config, const DiagnosisResult& result) {
  PlannerConfig patched = config;
  try {
    patched.heuristic = parse_heuristic(result.patched_heuristic);
    patched.heuristic_text = result.patched_heuristic;
  } catch (const DslError& e) {
    throw PatchError(std::string("patched heuristic rejected: ") + e.what());
  }
  try {
    patched.primitive_set_id = parse_primitive_id(result.primitive_set_id);
  } catch (const MalformedIdError& e) {
    throw PatchError(std::string("patched primitive-set id rejected: ") + e.what());
  }
  return patched;
}

SessionOutcome run_session(const Scenario& scenario, const PlanningProblem& problem,
                           const PlannerConfig& initial_config,
                           const SessionParams& params, LlmBackend& backend) {
  PrimitiveSetCache cache;
  SessionOutcome outcome;

  const PrimitiveSet& initial_set =
      cache.get(initial_config.primitive_set_id, scenario.dt);
  PlanOutcome initial_plan = plan(scenario, problem, initial_config, initial_set);
  if (!initial_plan.trajectory)
    throw InitialPlanFailureError(
        "initial planner found no trajectory after " +
        std::to_string(initial_plan.expansions) + " expansions");
  outcome.initial_trajectory = *initial_plan.trajectory;

  CostBreakdown initial_breakdown =
      compute_partial_costs(outcome.initial_trajectory, scenario, problem);
  outcome.J_initial = aggregate(initial_breakdown, params.weights);
  outcome.J_min = outcome.J_initial;

  PromptBundle bundle = make_bundle(
      initial_config, list_features(), initial_breakdown, outcome.J_initial,
      params.J_target, params.weights, params.few_shots, params.available_ids,
      params.templates, params.with_few_shots);

  TokenBudget budget{params.token_limit, 0};
  LlmParams llm = params.llm;
  llm.token_limit = params.token_limit;

  bool budget_refused = false;
  while (!budget.exhausted() && outcome.J_min - params.J_target > params.epsilon &&
         static_cast<int>(outcome.log.size()) < params.max_iterations) {
    std::string raw;
    try {
      int failures = 0;
      for (;;) {
        try {
          raw = query(bundle, llm, backend, budget);
          break;
        } catch (const TransportError&) {
          if (++failures > 2) throw;
        }
      }
    } catch (const BudgetExhaustedError&) {
      budget_refused = true;  // prompt no longer fits; same stop as exhaustion
      break;
    }

    IterationRecord record;
    record.index = static_cast<int>(outcome.log.size()) + 1;
    record.tokens_after = budget.consumed;

    std::optional<PlannerConfig> patched;
    try {
      record.diagnosis = parse_response(raw);
      patched = apply_patch(initial_config, *record.diagnosis);
      record.patch_outcome = IterationRecord::PatchOutcome::applied;
    } catch (const Error& e) {
      if (!record.diagnosis) record.diagnosis_error = e.what();
      record.patch_outcome = IterationRecord::PatchOutcome::parse_error;
      record.feedback.kind = FeedbackRecord::Kind::execution_error;
      record.feedback.detail = e.what();
      record.feedback.prior_diagnoses = record.diagnosis
                                            ? record.diagnosis->pairs
                                            : extract_pairs_best_effort(raw);
    }

    if (patched) {
      try {
        const PrimitiveSet& set = cache.get(patched->primitive_set_id, scenario.dt);
        PlanOutcome rep_plan = plan(scenario, problem, *patched, set);
        if (!rep_plan.trajectory)
          throw Error("the patched planner found no trajectory after " +
                      std::to_string(rep_plan.expansions) + " expansions");
        CostBreakdown rep_breakdown =
            compute_partial_costs(*rep_plan.trajectory, scenario, problem);
        double J_rep = aggregate(rep_breakdown, params.weights);
        record.J_rep = J_rep;
        record.feedback.kind = FeedbackRecord::Kind::evaluation;
        record.feedback.prior_diagnoses = record.diagnosis->pairs;
        record.feedback.detail = describe_comparison(
            outcome.J_initial, J_rep,
            compare(initial_breakdown, outcome.J_initial, rep_breakdown, J_rep));
        if (J_rep < outcome.J_min) {
          outcome.J_min = J_rep;
          outcome.best_config = *patched;
          outcome.best_diagnoses = record.diagnosis->pairs;
          outcome.best_trajectory = *rep_plan.trajectory;
        }
      } catch (const Error& e) {
        record.patch_outcome = IterationRecord::PatchOutcome::plan_failed;
        record.feedback.kind = FeedbackRecord::Kind::execution_error;
        record.feedback.detail = e.what();
        record.feedback.prior_diagnoses = record.diagnosis->pairs;
      }
    }

    if (params.with_feedback) bundle = add_feedback(bundle, record.feedback);
    outcome.log.push_back(std::move(record));
  }

  if (budget.exhausted() || budget_refused)
    outcome.stop_reason = SessionOutcome::StopReason::token_limit;
  else if (outcome.J_min - params.J_target <= params.epsilon)
    outcome.stop_reason = SessionOutcome::StopReason::target_reached;
  else
    outcome.stop_reason = SessionOutcome::StopReason::max_iterations;

  write_log(params.log_path, outcome);
  return outcome;
}

}  // namespace pdoc
