#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pdoc/repair_loop.hpp"

namespace pdoc {

struct BenchmarkCase {
  std::string case_id;
  std::string scenario_path;
  std::string heuristic_text;
  std::string primitive_id;
  double J_target = 0.0;
  // Mock-backend scripts; sample i replays scripts[i % size]. Ignored by
  // live backends.
  std::vector<std::string> scripts;
};

struct CaseStats {
  std::string case_id;
  int n = 0;
  int c = 0;  // samples with J_min strictly below J_initial
  bool valid = true;
};

struct PassAtKReport {
  std::string ablation;
  int samples_per_case = 0;
  std::vector<CaseStats> cases;
  std::map<int, double> pass_at_k;  // averaged over valid cases
  double decrement_avg = 0.0;       // relative J decrease, passing samples
  double decrement_stddev = 0.0;
  int passing_samples = 0;
  std::vector<std::string> warnings;
};

enum class Ablation { full, no_few_shots, no_feedback };

const char* to_string(Ablation ablation);
Ablation ablation_from_string(const std::string& name);

// Unbiased estimator 1 - C(n-c, k)/C(n, k) in overflow-safe product form.
// Throws ConfigError unless 0 <= c <= n and 1 <= k <= n.
double pass_at_k(int n, int c, int k);

// Creates the backend for one (case, sample) pair.
using BackendFactory =
    std::function<std::unique_ptr<LlmBackend>(const BenchmarkCase&, int sample)>;

// Runs samples_per_case sessions per case and aggregates. A sample passes
// iff its session ends with J_min < J_initial. Ablations: no_few_shots
// drops the few-shot prompt section; no_feedback skips feedback and caps
// sessions at one iteration. Cases whose initial plan fails are excluded
// with a warning. Throws ConfigError when samples_per_case < max(k).
PassAtKReport run_benchmark(const std::vector<BenchmarkCase>& cases,
                            int samples_per_case, const std::vector<int>& k_values,
                            Ablation ablation, const BackendFactory& factory,
                            const SessionParams& base_params);

// Manifest: JSON list of case records; relative paths are resolved
// against the manifest's directory.
std::vector<BenchmarkCase> load_case_manifest(const std::string& path);

std::string report_to_json(const PassAtKReport& report);

}  // namespace pdoc
