#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pdoc/astar_planner.hpp"
#include "pdoc/heuristic_dsl.hpp"
#include "pdoc/trajectory_evaluator.hpp"

namespace pdoc {

struct DiagnosisEntry {
  std::string diagnosis;
  std::string prescription;
};

// The user-side prompt as ordered tagged sections:
// instructions, planner, evaluation, few_shots, feedback_1..N.
// Feedback sections are append-only; earlier sections never change.
struct PromptBundle {
  std::string system;
  std::vector<std::pair<std::string, std::string>> user_sections;

  int feedback_count() const;
};

struct FewShotExample {
  std::string input_heuristic;  // DSL text, must parse
  std::string diagnosis;
  std::string prescription;
  std::string output_heuristic;  // DSL text, must parse
};

struct FeedbackRecord {
  enum class Kind { execution_error, evaluation };
  Kind kind = Kind::execution_error;
  std::vector<DiagnosisEntry> prior_diagnoses;
  std::string detail;  // error message, or comparison narrative
};

// Manual-input slots of the prompt; everything else is fixed template text.
struct PromptTemplates {
  std::string planner_intro;
  std::string rule_of_thumb;
};

const PromptTemplates& default_templates();

// System prompt: role statement + response-format contract (the JSON keys
// the gateway expects back).
std::string build_system_prompt();

std::string build_instructions(const PromptTemplates& templates = default_templates());

// Algorithm intro, current heuristic source, feature listing
// ("{name}: {docstring}"), primitive-ID naming convention and current ID.
std::string describe_planner(const PlannerConfig& config, const FeatureCatalog& catalog,
                             const PromptTemplates& templates = default_templates());

// Narrative of one evaluation: per-component sentences, then total and target.
std::string describe_evaluation(const CostBreakdown& breakdown, double total,
                                double target, const CostWeights& weights);

// Helper catalog, worked repair examples, and the selectable primitive-set
// IDs. Throws MalformedIdError / DslError on unparseable inputs.
std::string build_few_shots(const FeatureCatalog& catalog,
                            const std::vector<FewShotExample>& examples,
                            const std::vector<std::string>& available_ids);

std::vector<FewShotExample> default_few_shots();
std::vector<std::string> default_available_ids();

// Before/after narrative for evaluation feedback; mentions both totals.
std::string describe_comparison(double before_total, double after_total,
                                const ComparisonReport& report);

// Full initial bundle. with_few_shots=false omits that section (ablation).
PromptBundle make_bundle(const PlannerConfig& config, const FeatureCatalog& catalog,
                         const CostBreakdown& breakdown, double total, double target,
                         const CostWeights& weights,
                         const std::vector<FewShotExample>& examples,
                         const std::vector<std::string>& available_ids,
                         const PromptTemplates& templates = default_templates(),
                         bool with_few_shots = true);

// Returns a new bundle with one more feedback section appended.
PromptBundle add_feedback(const PromptBundle& bundle, const FeedbackRecord& record);

// Concatenates the user sections, order preserved, with section headers.
std::string assemble(const PromptBundle& bundle);

}  // namespace pdoc
