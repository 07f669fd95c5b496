#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pdoc/astar_planner.hpp"
#include "pdoc/llm_gateway.hpp"
#include "pdoc/prompt_builder.hpp"
#include "pdoc/trajectory_evaluator.hpp"

namespace pdoc {

struct SessionParams {
  double J_target = 0.0;  // J*
  double epsilon = 10.0;  // stop once J_min - J_target <= epsilon
  int token_limit = 8000;
  int max_iterations = 10;  // safety cap on top of the two stop rules
  bool with_few_shots = true;
  bool with_feedback = true;
  LlmParams llm;
  CostWeights weights;
  std::vector<FewShotExample> few_shots = default_few_shots();
  std::vector<std::string> available_ids = default_available_ids();
  PromptTemplates templates = default_templates();
  std::string log_path;  // empty = no session log written
};

struct IterationRecord {
  int index = 0;  // 1-based
  std::optional<DiagnosisResult> diagnosis;  // absent on response parse failure
  std::string diagnosis_error;               // set when diagnosis is absent
  enum class PatchOutcome { applied, parse_error, plan_failed };
  PatchOutcome patch_outcome = PatchOutcome::parse_error;
  std::optional<double> J_rep;  // present iff patch_outcome == applied
  FeedbackRecord feedback;
  std::int64_t tokens_after = 0;
};

struct SessionOutcome {
  double J_initial = 0.0;
  double J_min = 0.0;
  std::optional<PlannerConfig> best_config;
  std::optional<std::vector<DiagnosisEntry>> best_diagnoses;
  std::optional<Trajectory> best_trajectory;
  Trajectory initial_trajectory;
  enum class StopReason { target_reached, token_limit, max_iterations };
  StopReason stop_reason = StopReason::max_iterations;
  std::vector<IterationRecord> log;
};

const char* to_string(IterationRecord::PatchOutcome outcome);
const char* to_string(SessionOutcome::StopReason reason);

// Parses both patch fields against the ORIGINAL config (patches never
// stack across iterations). Throws PatchError wrapping the DSL/ID error
// message so it can be fed back verbatim.
PlannerConfig apply_patch(const PlannerConfig& config, const DiagnosisResult& result);

// Full diagnose-and-repair session: plan + evaluate the initial config,
// describe it, then iterate query -> patch -> re-plan -> re-evaluate ->
// feedback while the token budget lasts, the target gap exceeds epsilon,
// and the iteration cap is not hit. Iteration-level failures (unparseable
// response, bad patch, failed re-plan) become execution_error feedback,
// never an abort. Throws InitialPlanFailureError when the initial config
// cannot produce a trajectory.
SessionOutcome run_session(const Scenario& scenario, const PlanningProblem& problem,
                           const PlannerConfig& initial_config,
                           const SessionParams& params, LlmBackend& backend);

}  // namespace pdoc
