#include "pdoc/prompt_builder.hpp"

#include <cstdio>
#include <sstream>

#include "pdoc/errors.hpp"
#include "pdoc/motion_primitives.hpp"

namespace pdoc {
namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string component_line(const std::string& name, double value, double weight) {
  return "the cost for " + name + " is " + fmt("%.4f", value) + " (weight " +
         fmt("%g", weight) + ")";
}

std::string feature_listing(const FeatureCatalog& catalog) {
  std::ostringstream out;
  for (const FeatureEntry& e : catalog.entries) out << e.name << ": " << e.docstring << "\n";
  return out.str();
}

}  // namespace

int PromptBundle::feedback_count() const {
  int n = 0;
  for (const auto& [tag, text] : user_sections)
    if (tag.rfind("feedback_", 0) == 0) ++n;
  return n;
}

const PromptTemplates& default_templates() {
  static const PromptTemplates t{
      // planner_intro
      "The planner under diagnosis is an A* search over a lattice of "
      "motion primitives. Starting from the initial state, it repeatedly "
      "appends short kinematically feasible maneuvers (primitives) to "
      "partial trajectories and expands them in order of accumulated "
      "duration plus the value of a user-defined heuristic function "
      "evaluated on the partial trajectory. The heuristic function and "
      "the primitive set are the two components you can change.",
      // rule_of_thumb
      "merely adjusting the weighting or coefficients is often cumbersome "
      "and not very effective"};
  return t;
}

std::string build_system_prompt() {
  return "You are an expert in diagnosing and repairing motion planners for "
         "autonomous vehicles. You analyse the description of an "
         "underperforming search-based planner, identify the flaws in its "
         "heuristic function and motion-primitive selection, and prescribe "
         "concrete repairs.\n"
         "Respond with a single JSON object containing exactly these keys: "
         "\"diagnoses\" (a list of objects with \"diagnosis\" and "
         "\"prescription\" strings), \"patched_heuristic\" (the full repaired "
         "heuristic expression), and \"motion_primitives_id\" (the name of "
         "the motion-primitive set to use). Do not output anything else.\n";
}

std::string build_instructions(const PromptTemplates& templates) {
  std::ostringstream out;
  out << "Your task is to improve the planned trajectory by repairing the "
         "planner described below. Diagnose what is wrong and prescribe how "
         "to fix it; every repair must follow from one of your diagnoses.\n"
      << "State each problem as a separate diagnosis with a matching "
         "prescription, then provide the repaired heuristic expression and "
         "the chosen motion-primitive set.\n"
      << "Keep in mind: " << templates.rule_of_thumb
      << ". Prefer structural changes, e.g. adding missing cost terms or "
         "switching to a different primitive set.\n";
  return out.str();
}

std::string describe_planner(const PlannerConfig& config, const FeatureCatalog& catalog,
                             const PromptTemplates& templates) {
  std::ostringstream out;
  out << templates.planner_intro << "\n\n";
  std::string source = config.heuristic_text.empty()
                           ? render_heuristic(config.heuristic)
                           : config.heuristic_text;
  out << "The current heuristic function is:\n" << source << "\n\n";
  out << "The heuristic is an arithmetic expression over these features, "
         "each evaluated on the partial trajectory:\n"
      << feature_listing(catalog) << "\n";
  out << "Motion-primitive sets are named "
         "V_{velocity min}_{velocity max}_Vstep_{velocity step}_"
         "SA_{steering min}_{steering max}_SAstep_{steering step}_"
         "T_{duration}_Model_{vehicle model}; Vstep and SAstep are the "
         "sampling resolutions of the velocity and steering grids, and T is "
         "the duration of one primitive in seconds.\n";
  out << "The current motion-primitive set is:\n"
      << format_primitive_id(config.primitive_set_id) << "\n";
  return out.str();
}

std::string describe_evaluation(const CostBreakdown& breakdown, double total,
                                double target, const CostWeights& weights) {
  std::ostringstream out;
  out << "The planned trajectory of the current planner was evaluated with a "
         "weighted sum of squared quantities:\n";
  out << component_line("acceleration (J_A)", breakdown.J_A, weights.w_A) << ",\n";
  out << component_line("steering angle (J_SA)", breakdown.J_SA, weights.w_SA) << ",\n";
  out << component_line("steering rate (J_SR)", breakdown.J_SR, weights.w_SR) << ",\n";
  out << component_line("distance to the lane center (J_LC)", breakdown.J_LC,
                        weights.w_LC)
      << ",\n";
  out << component_line("orientation offset to the lane (J_O)", breakdown.J_O,
                        weights.w_O)
      << ",\n";
  out << component_line("deviation from the desired velocity (J_V)", breakdown.J_V,
                        weights.w_V)
      << ".\n";
  out << "The total objective of the planned trajectory is " << fmt("%.2f", total)
      << ". The target value of the objective is " << fmt("%.2f", target) << ".\n";
  return out.str();
}

std::string build_few_shots(const FeatureCatalog& catalog,
                            const std::vector<FewShotExample>& examples,
                            const std::vector<std::string>& available_ids) {
  for (const std::string& id : available_ids) parse_primitive_id(id);
  for (const FewShotExample& ex : examples) {
    parse_heuristic(ex.input_heuristic);
    parse_heuristic(ex.output_heuristic);
  }
  std::ostringstream out;
  out << "There are some pre-defined helper functions that can be directly "
         "called in the heuristic function:\n"
      << feature_listing(catalog);
  if (!examples.empty()) {
    out << "\nExamples:\n";
    for (const FewShotExample& ex : examples) {
      out << "(input)\n" << ex.input_heuristic << "\n(output)\n";
      out << "Diagnosis: " << ex.diagnosis << "\n";
      out << "Prescription: " << ex.prescription << "\n";
      out << ex.output_heuristic << "\n";
    }
  }
  out << "\nFeasible motion primitives with the same name format that you "
         "can directly use:\n";
  for (const std::string& id : available_ids) out << "\"" << id << "\",\n";
  return out.str();
}

std::vector<FewShotExample> default_few_shots() {
  return {FewShotExample{
      "orientation_to_goal_diff",
      "the acceleration is not considered",
      "add the acceleration cost to the heuristic function",
      "orientation_to_goal_diff + acceleration_cost"}};
}

std::vector<std::string> default_available_ids() {
  return {"V_0.0_20.0_Vstep_1.0_SA_-1.066_1.066_SAstep_2.13_T_0.5_Model_BMW_320i",
          "V_0.0_20.0_Vstep_2.0_SA_-1.066_1.066_SAstep_0.18_T_0.5_Model_BMW_320i"};
}

std::string describe_comparison(double before_total, double after_total,
                                const ComparisonReport& report) {
  std::ostringstream out;
  out << "After your last repair the total objective changed from "
      << fmt("%.2f", before_total) << " to " << fmt("%.2f", after_total) << ". ";
  if (report.improvement) {
    out << "The planner improved";
    if (!report.before_total_zero)
      out << " (relative decrement " << fmt("%.4f", report.relative_decrement) << ")";
    out << ".";
  } else {
    out << "The repair failed to make the planner better; reconsider your "
           "previous diagnoses.";
  }
  return out.str();
}

PromptBundle make_bundle(const PlannerConfig& config, const FeatureCatalog& catalog,
                         const CostBreakdown& breakdown, double total, double target,
                         const CostWeights& weights,
                         const std::vector<FewShotExample>& examples,
                         const std::vector<std::string>& available_ids,
                         const PromptTemplates& templates, bool with_few_shots) {
  PromptBundle bundle;
  bundle.system = build_system_prompt();
  bundle.user_sections.emplace_back("instructions", build_instructions(templates));
  bundle.user_sections.emplace_back("planner",
                                    describe_planner(config, catalog, templates));
  bundle.user_sections.emplace_back(
      "evaluation", describe_evaluation(breakdown, total, target, weights));
  if (with_few_shots)
    bundle.user_sections.emplace_back(
        "few_shots", build_few_shots(catalog, examples, available_ids));
  return bundle;
}

PromptBundle add_feedback(const PromptBundle& bundle, const FeedbackRecord& record) {
  PromptBundle next = bundle;
  std::ostringstream out;
  if (record.kind == FeedbackRecord::Kind::execution_error) {
    out << "Your last repair could not be executed. " << record.detail << "\n";
  } else {
    out << record.detail << "\n";
  }
  if (record.prior_diagnoses.empty()) {
    out << "No diagnoses from the previous iteration are available.\n";
  } else {
    out << "Your diagnoses and prescriptions from the previous iteration "
           "were:\n";
    for (const DiagnosisEntry& d : record.prior_diagnoses)
      out << "- Diagnosis: " << d.diagnosis << " / Prescription: " << d.prescription
          << "\n";
    out << "Keep the parts that helped and revise the rest.\n";
  }
  std::string tag = "feedback_" + std::to_string(bundle.feedback_count() + 1);
  next.user_sections.emplace_back(tag, out.str());
  return next;
}

std::string assemble(const PromptBundle& bundle) {
  std::ostringstream out;
  for (const auto& [tag, text] : bundle.user_sections) {
    out << "## " << tag << "\n" << text;
    if (text.empty() || text.back() != '\n') out << "\n";
    out << "\n";
  }
  return out.str();
}

}  // namespace pdoc
