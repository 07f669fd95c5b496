#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pdoc/astar_planner.hpp"
#include "pdoc/benchmark_harness.hpp"
#include "pdoc/errors.hpp"
#include "pdoc/llm_gateway.hpp"
#include "pdoc/motion_primitives.hpp"
#include "pdoc/prompt_builder.hpp"
#include "pdoc/repair_loop.hpp"
#include "pdoc/scenario.hpp"
#include "pdoc/trajectory_evaluator.hpp"

namespace {

using namespace pdoc;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  out << text;
}

void print_costs(const CostBreakdown& bd, const CostWeights& w, double total) {
  auto line = [](const char* name, double value, double weight) {
    std::printf("  %-4s %12.4f  (weight %g)\n", name, value, weight);
  };
  line("J_A", bd.J_A, w.w_A);
  line("J_SA", bd.J_SA, w.w_SA);
  line("J_SR", bd.J_SR, w.w_SR);
  line("J_LC", bd.J_LC, w.w_LC);
  line("J_O", bd.J_O, w.w_O);
  line("J_V", bd.J_V, w.w_V);
  std::printf("  total %.2f\n", total);
}

std::unique_ptr<LlmBackend> make_backend(const std::string& spec,
                                         const std::string& endpoint) {
  if (spec == "http") {
    HttpBackendConfig cfg;
    if (!endpoint.empty()) cfg.base_url = endpoint;
    return std::make_unique<HttpBackend>(cfg);
  }
  if (spec.rfind("mock:", 0) == 0) {
    std::string path = spec.substr(5);
    if (path.empty()) throw ConfigError("mock backend needs a script path: mock:FILE");
    return std::make_unique<MockBackend>(path);
  }
  throw ConfigError("unknown backend \"" + spec + "\"; expected http or mock:FILE");
}

struct PlanArgs {
  std::string scenario, heuristic, primitives, out;
  int max_expansions = kDefaultMaxExpansions;
};

int run_plan(const PlanArgs& a) {
  auto [scenario, problem] = load_scenario(a.scenario);
  PlannerConfig config = make_planner_config(read_text_file(a.heuristic),
                                             a.primitives, a.max_expansions);
  PrimitiveSet set = generate_primitive_set(
      config.primitive_set_id, default_model_params(config.primitive_set_id.model),
      scenario.dt);
  PlanOutcome outcome = plan(scenario, problem, config, set);
  if (!outcome.trajectory) {
    std::cerr << "no trajectory found after " << outcome.expansions
              << " expansions" << std::endl;
    return 1;
  }
  if (a.out.empty()) {
    std::cout << trajectory_to_json(*outcome.trajectory) << std::endl;
  } else {
    save_trajectory(a.out, *outcome.trajectory);
  }
  CostBreakdown bd = compute_partial_costs(*outcome.trajectory, scenario, problem);
  CostWeights weights;
  std::printf("states %zu, duration %.2fs, expansions %lld, g %.2f\n",
              outcome.trajectory->states.size(), outcome.trajectory->duration(),
              outcome.expansions, outcome.g_cost);
  print_costs(bd, weights, aggregate(bd, weights));
  return 0;
}

struct EvaluateArgs {
  std::string scenario, trajectory;
};

int run_evaluate(const EvaluateArgs& a) {
  auto [scenario, problem] = load_scenario(a.scenario);
  Trajectory traj = load_trajectory(a.trajectory);
  CostBreakdown bd = compute_partial_costs(traj, scenario, problem);
  CostWeights weights;
  print_costs(bd, weights, aggregate(bd, weights));
  return 0;
}

struct DescribeArgs {
  std::string scenario, heuristic, primitives, out;
  double target = 0.0;
};

int run_describe(const DescribeArgs& a) {
  auto [scenario, problem] = load_scenario(a.scenario);
  PlannerConfig config = make_planner_config(read_text_file(a.heuristic),
                                             a.primitives, kDefaultMaxExpansions);
  PrimitiveSet set = generate_primitive_set(
      config.primitive_set_id, default_model_params(config.primitive_set_id.model),
      scenario.dt);
  PlanOutcome outcome = plan(scenario, problem, config, set);
  if (!outcome.trajectory) {
    std::cerr << "no trajectory found after " << outcome.expansions
              << " expansions; nothing to describe" << std::endl;
    return 1;
  }
  CostBreakdown bd = compute_partial_costs(*outcome.trajectory, scenario, problem);
  CostWeights weights;
  PromptBundle bundle =
      make_bundle(config, list_features(), bd, aggregate(bd, weights), a.target,
                  weights, default_few_shots(), default_available_ids());
  std::string text = "=== system ===\n" + bundle.system + "\n=== user ===\n" +
                     assemble(bundle);
  if (a.out.empty()) {
    std::cout << text << std::endl;
  } else {
    write_text_file(a.out, text);
  }
  return 0;
}

struct RepairArgs {
  std::string scenario, heuristic, primitives, backend, endpoint, log, out;
  double target = 0.0;
  double epsilon = 10.0;
  double temperature = 0.6;
  int token_limit = 8000;
  int max_iterations = 10;
  std::string model = "gpt-4";
};

int run_repair(const RepairArgs& a) {
  auto [scenario, problem] = load_scenario(a.scenario);
  PlannerConfig config = make_planner_config(read_text_file(a.heuristic),
                                             a.primitives, kDefaultMaxExpansions);
  SessionParams params;
  params.J_target = a.target;
  params.epsilon = a.epsilon;
  params.token_limit = a.token_limit;
  params.max_iterations = a.max_iterations;
  params.llm.temperature = a.temperature;
  params.llm.model_name = a.model;
  params.log_path = a.log;
  std::unique_ptr<LlmBackend> backend = make_backend(a.backend, a.endpoint);

  SessionOutcome outcome = run_session(scenario, problem, config, params, *backend);
  std::printf("J_initial %.2f, J_min %.2f, iterations %zu, stop_reason %s\n",
              outcome.J_initial, outcome.J_min, outcome.log.size(),
              to_string(outcome.stop_reason));
  if (outcome.best_config) {
    std::printf("best heuristic: %s\n", outcome.best_config->heuristic_text.c_str());
    std::printf("best primitives: %s\n",
                format_primitive_id(outcome.best_config->primitive_set_id).c_str());
    if (outcome.best_diagnoses) {
      for (const DiagnosisEntry& d : *outcome.best_diagnoses)
        std::printf("diagnosis: %s / prescription: %s\n", d.diagnosis.c_str(),
                    d.prescription.c_str());
    }
    if (!a.out.empty() && outcome.best_trajectory)
      save_trajectory(a.out, *outcome.best_trajectory);
  } else {
    std::printf("no repair improved on the initial planner\n");
  }
  return 0;
}

struct BenchArgs {
  std::string manifest, backend = "mock", endpoint, out;
  int samples = 10;
  std::vector<int> k_values = {1, 5, 10};
  std::string ablation = "full";
  double epsilon = 10.0;
  int token_limit = 8000;
  int max_iterations = 10;
};

int run_bench(const BenchArgs& a) {
  std::vector<BenchmarkCase> cases = load_case_manifest(a.manifest);
  SessionParams base;
  base.epsilon = a.epsilon;
  base.token_limit = a.token_limit;
  base.max_iterations = a.max_iterations;

  BackendFactory factory;
  if (a.backend == "mock") {
    factory = [](const BenchmarkCase& c, int sample) -> std::unique_ptr<LlmBackend> {
      if (c.scripts.empty())
        throw ConfigError("case " + c.case_id +
                          " has no mock scripts; add \"scripts\" to the manifest");
      return std::make_unique<MockBackend>(
          c.scripts[static_cast<std::size_t>(sample) % c.scripts.size()]);
    };
  } else if (a.backend == "http") {
    std::string endpoint = a.endpoint;
    factory = [endpoint](const BenchmarkCase&, int) -> std::unique_ptr<LlmBackend> {
      HttpBackendConfig cfg;
      if (!endpoint.empty()) cfg.base_url = endpoint;
      return std::make_unique<HttpBackend>(cfg);
    };
  } else {
    throw ConfigError("unknown bench backend \"" + a.backend +
                      "\"; expected mock or http");
  }

  PassAtKReport report = run_benchmark(cases, a.samples, a.k_values,
                                       ablation_from_string(a.ablation), factory, base);
  std::string text = report_to_json(report);
  if (a.out.empty()) {
    std::cout << text << std::endl;
  } else {
    write_text_file(a.out, text + "\n");
  }
  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diagnose and repair lattice search planners"};
  app.require_subcommand(1);

  PlanArgs plan_args;
  CLI::App* plan_cmd = app.add_subcommand("plan", "plan a trajectory");
  plan_cmd->add_option("--scenario", plan_args.scenario, "scenario JSON")->required();
  plan_cmd->add_option("--heuristic", plan_args.heuristic, "heuristic DSL file")
      ->required();
  plan_cmd->add_option("--primitives", plan_args.primitives, "primitive-set ID")
      ->required();
  plan_cmd->add_option("--out", plan_args.out, "trajectory output path");
  plan_cmd->add_option("--max-expansions", plan_args.max_expansions,
                       "search expansion cap");

  EvaluateArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "evaluate a saved trajectory");
  eval_cmd->add_option("--scenario", eval_args.scenario, "scenario JSON")->required();
  eval_cmd->add_option("--trajectory", eval_args.trajectory, "trajectory JSON")
      ->required();

  DescribeArgs desc_args;
  CLI::App* desc_cmd = app.add_subcommand("describe", "render the diagnosis prompt");
  desc_cmd->add_option("--scenario", desc_args.scenario, "scenario JSON")->required();
  desc_cmd->add_option("--heuristic", desc_args.heuristic, "heuristic DSL file")
      ->required();
  desc_cmd->add_option("--primitives", desc_args.primitives, "primitive-set ID")
      ->required();
  desc_cmd->add_option("--target", desc_args.target, "objective target J*");
  desc_cmd->add_option("--out", desc_args.out, "prompt output path");

  RepairArgs repair_args;
  CLI::App* repair_cmd = app.add_subcommand("repair", "run a repair session");
  repair_cmd->add_option("--scenario", repair_args.scenario, "scenario JSON")
      ->required();
  repair_cmd->add_option("--heuristic", repair_args.heuristic, "heuristic DSL file")
      ->required();
  repair_cmd->add_option("--primitives", repair_args.primitives, "primitive-set ID")
      ->required();
  repair_cmd->add_option("--target", repair_args.target, "objective target J*");
  repair_cmd->add_option("--epsilon", repair_args.epsilon, "stop gap")->capture_default_str();
  repair_cmd->add_option("--token-limit", repair_args.token_limit, "token budget")->capture_default_str();
  repair_cmd->add_option("--max-iterations", repair_args.max_iterations,
                         "iteration cap")->capture_default_str();
  repair_cmd->add_option("--backend", repair_args.backend, "http or mock:FILE")
      ->required();
  repair_cmd->add_option("--endpoint", repair_args.endpoint, "http backend base URL");
  repair_cmd->add_option("--model", repair_args.model, "model name")->capture_default_str();
  repair_cmd->add_option("--temperature", repair_args.temperature, "sampling temperature")->capture_default_str();
  repair_cmd->add_option("--log", repair_args.log, "session log JSONL path");
  repair_cmd->add_option("--out", repair_args.out, "best trajectory output path");

  BenchArgs bench_args;
  CLI::App* bench_cmd = app.add_subcommand("bench", "run the benchmark harness");
  bench_cmd->add_option("--manifest", bench_args.manifest, "case manifest JSON")
      ->required();
  bench_cmd->add_option("--samples", bench_args.samples, "samples per case")->capture_default_str();
  bench_cmd->add_option("--k", bench_args.k_values, "pass@k values")
      ->delimiter(',');
  bench_cmd->add_option("--ablation", bench_args.ablation,
                        "full, no_few_shots or no_feedback")->capture_default_str();
  bench_cmd->add_option("--backend", bench_args.backend, "mock or http")->capture_default_str();
  bench_cmd->add_option("--endpoint", bench_args.endpoint, "http backend base URL");
  bench_cmd->add_option("--epsilon", bench_args.epsilon, "stop gap")->capture_default_str();
  bench_cmd->add_option("--token-limit", bench_args.token_limit, "token budget")->capture_default_str();
  bench_cmd->add_option("--max-iterations", bench_args.max_iterations, "iteration cap")->capture_default_str();
  bench_cmd->add_option("--out", bench_args.out, "report output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (plan_cmd->parsed()) return run_plan(plan_args);
    if (eval_cmd->parsed()) return run_evaluate(eval_args);
    if (desc_cmd->parsed()) return run_describe(desc_args);
    if (repair_cmd->parsed()) return run_repair(repair_args);
    if (bench_cmd->parsed()) return run_bench(bench_args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 2;
}
