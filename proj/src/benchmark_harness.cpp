#include "pdoc/benchmark_harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pdoc/errors.hpp"
#include "pdoc/scenario.hpp"

namespace pdoc {

using nlohmann::json;

const char* to_string(Ablation ablation) {
  switch (ablation) {
    case Ablation::full: return "full";
    case Ablation::no_few_shots: return "no_few_shots";
    case Ablation::no_feedback: return "no_feedback";
  }
  return "?";
}

Ablation ablation_from_string(const std::string& name) {
  if (name == "full") return Ablation::full;
  if (name == "no_few_shots") return Ablation::no_few_shots;
  if (name == "no_feedback") return Ablation::no_feedback;
  throw ConfigError("unknown ablation \"" + name +
                    "\"; expected full, no_few_shots or no_feedback");
}

double pass_at_k(int n, int c, int k) {
  if (c < 0 || c > n || k < 1 || k > n) {
    std::ostringstream msg;
    msg << "pass@k preconditions violated: n=" << n << " c=" << c << " k=" << k
        << " (need 0 <= c <= n and 1 <= k <= n)";
    throw ConfigError(msg.str());
  }
  if (c == 0) return 0.0;
  if (n - c < k) return 1.0;
  double miss = 1.0;
  for (int i = 0; i < k; ++i)
    miss *= static_cast<double>(n - c - i) / static_cast<double>(n - i);
  return 1.0 - miss;
}

PassAtKReport run_benchmark(const std::vector<BenchmarkCase>& cases,
                            int samples_per_case, const std::vector<int>& k_values,
                            Ablation ablation, const BackendFactory& factory,
                            const SessionParams& base_params) {
  if (k_values.empty()) throw ConfigError("no k values requested");
  int k_max = *std::max_element(k_values.begin(), k_values.end());
  if (samples_per_case < k_max)
    throw ConfigError("samples_per_case " + std::to_string(samples_per_case) +
                      " is below the largest requested k " + std::to_string(k_max));

  PassAtKReport report;
  report.ablation = to_string(ablation);
  report.samples_per_case = samples_per_case;
  std::vector<double> decrements;

  for (const BenchmarkCase& bench_case : cases) {
    CaseStats stats;
    stats.case_id = bench_case.case_id;
    auto [scenario, problem] = load_scenario(bench_case.scenario_path);
    PlannerConfig config = make_planner_config(bench_case.heuristic_text,
                                               bench_case.primitive_id,
                                               kDefaultMaxExpansions);
    SessionParams params = base_params;
    params.J_target = bench_case.J_target;
    if (ablation == Ablation::no_few_shots) params.with_few_shots = false;
    if (ablation == Ablation::no_feedback) {
      params.with_feedback = false;
      params.max_iterations = 1;
    }

    std::vector<double> case_decrements;
    bool invalid = false;
    for (int sample = 0; sample < samples_per_case && !invalid; ++sample) {
      std::unique_ptr<LlmBackend> backend = factory(bench_case, sample);
      try {
        SessionOutcome outcome =
            run_session(scenario, problem, config, params, *backend);
        ++stats.n;
        if (outcome.J_min < outcome.J_initial) {
          ++stats.c;
          case_decrements.push_back(
              (outcome.J_initial - outcome.J_min) / outcome.J_initial);
        }
      } catch (const InitialPlanFailureError& e) {
        invalid = true;
        report.warnings.push_back("case " + bench_case.case_id +
                                  " excluded: " + e.what());
      }
    }
    stats.valid = !invalid;
    if (stats.valid)
      decrements.insert(decrements.end(), case_decrements.begin(),
                        case_decrements.end());
    report.cases.push_back(std::move(stats));
  }

  for (int k : k_values) {
    double sum = 0.0;
    int valid_cases = 0;
    for (const CaseStats& s : report.cases) {
      if (!s.valid) continue;
      sum += pass_at_k(s.n, s.c, k);
      ++valid_cases;
    }
    report.pass_at_k[k] = valid_cases > 0 ? sum / valid_cases : 0.0;
  }

  report.passing_samples = static_cast<int>(decrements.size());
  if (!decrements.empty()) {
    double mean = 0.0;
    for (double d : decrements) mean += d;
    mean /= decrements.size();
    double var = 0.0;
    for (double d : decrements) var += (d - mean) * (d - mean);
    var /= decrements.size();
    report.decrement_avg = mean;
    report.decrement_stddev = std::sqrt(var);
  }
  return report;
}

std::vector<BenchmarkCase> load_case_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open case manifest: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("case manifest " + path + ": " + e.what());
  }
  if (!j.is_array()) throw SchemaError("case manifest must be a JSON list");

  std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (base / fp).string();
  };

  std::vector<BenchmarkCase> cases;
  for (const json& entry : j) {
    if (!entry.is_object()) throw SchemaError("case manifest entries must be objects");
    BenchmarkCase c;
    for (const char* key : {"case_id", "scenario", "primitives"})
      if (!entry.contains(key) || !entry.at(key).is_string())
        throw SchemaError(std::string("case manifest entry needs string field \"") +
                          key + "\"");
    c.case_id = entry.at("case_id").get<std::string>();
    c.scenario_path = resolve(entry.at("scenario").get<std::string>());
    c.primitive_id = entry.at("primitives").get<std::string>();
    if (entry.contains("heuristic") && entry.at("heuristic").is_string()) {
      c.heuristic_text = entry.at("heuristic").get<std::string>();
    } else if (entry.contains("heuristic_file") &&
               entry.at("heuristic_file").is_string()) {
      std::string hp = resolve(entry.at("heuristic_file").get<std::string>());
      std::ifstream hin(hp);
      if (!hin) throw IoError("cannot open heuristic file: " + hp);
      std::ostringstream text;
      text << hin.rdbuf();
      c.heuristic_text = text.str();
    } else {
      throw SchemaError("case manifest entry needs \"heuristic\" or \"heuristic_file\"");
    }
    if (entry.contains("J_target")) {
      if (!entry.at("J_target").is_number())
        throw SchemaError("case manifest field \"J_target\" must be a number");
      c.J_target = entry.at("J_target").get<double>();
    }
    if (entry.contains("scripts")) {
      if (!entry.at("scripts").is_array())
        throw SchemaError("case manifest field \"scripts\" must be a list");
      for (const json& s : entry.at("scripts")) {
        if (!s.is_string())
          throw SchemaError("case manifest scripts must be path strings");
        c.scripts.push_back(resolve(s.get<std::string>()));
      }
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

std::string report_to_json(const PassAtKReport& report) {
  json cases = json::array();
  for (const CaseStats& s : report.cases)
    cases.push_back(
        {{"case_id", s.case_id}, {"n", s.n}, {"c", s.c}, {"valid", s.valid}});
  json pk = json::object();
  for (const auto& [k, v] : report.pass_at_k) pk[std::to_string(k)] = v;
  json j = {{"ablation", report.ablation},
            {"samples_per_case", report.samples_per_case},
            {"cases", cases},
            {"pass_at_k", pk},
            {"decrement",
             {{"avg", report.decrement_avg},
              {"stddev", report.decrement_stddev},
              {"passing_samples", report.passing_samples}}},
            {"warnings", report.warnings}};
  return j.dump(2);
}

}  // namespace pdoc
