// Copyright 2026 The verde2e Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end.  Exit codes are part of the contract:
//   0  success
//   2  configuration, usage, or input-format error
//   3  the instance has no feasible solution
//   4  the search budget was exceeded
//   5  an imported solution failed validation
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "verde2e/core.hpp"
#include "verde2e/genesis.hpp"
#include "verde2e/instance_io.hpp"
#include "verde2e/model.hpp"
#include "verde2e/mps.hpp"
#include "verde2e/oracle.hpp"
#include "verde2e/pareto.hpp"
#include "verde2e/report.hpp"
#include "verde2e/validate.hpp"

namespace {

using namespace verde2e;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitBudget = 4;
constexpr int kExitInvalidImport = 5;

// Options shared by every solving command.
struct SolveFlags {
  std::string scenario_name = "ehc";
  bool full_home_delivery = false;
  double green_low_factor = kDefaultGreenLowCapacityFactor;
  int budget_customers = Budget{}.max_customers;
  int budget_satellites = Budget{}.max_satellites;
  int budget_vehicles = Budget{}.max_vehicles_per_echelon;

  void attach(CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_name,
                    "Scenario: ehc, elc, td or cd, optionally suffixed _hd")
        ->capture_default_str();
    cmd->add_flag("--full-home-delivery", full_home_delivery,
                  "Disable customer pickup (same as the _hd scenario suffix)");
    cmd->add_option("--green-low-factor", green_low_factor,
                    "Zero-emission capacity multiplier used by elc scenarios")
        ->capture_default_str();
    cmd->add_option("--budget-customers", budget_customers,
                    "Largest customer count the exact search accepts")
        ->capture_default_str();
    cmd->add_option("--budget-satellites", budget_satellites,
                    "Largest satellite count the exact search accepts")
        ->capture_default_str();
    cmd->add_option("--budget-vehicles", budget_vehicles,
                    "Largest per-echelon fleet the exact search accepts")
        ->capture_default_str();
  }

  Scenario scenario() const {
    Scenario s = parse_scenario(scenario_name);
    if (full_home_delivery) s.full_home_delivery = true;
    return s;
  }

  SolveOptions solve_options() const {
    SolveOptions opts;
    opts.budget.max_customers = budget_customers;
    opts.budget.max_satellites = budget_satellites;
    opts.budget.max_vehicles_per_echelon = budget_vehicles;
    opts.green_low_factor = green_low_factor;
    return opts;
  }
};

nlohmann::json solve_summary(const std::string& instance_label, const Scenario& scenario,
                             const std::string& source, double objective,
                             const Metrics& metrics) {
  return {{"instance", instance_label},
          {"scenario", scenario_name(scenario)},
          {"objective_metric", to_string(scenario.objective)},
          {"source", source},
          {"objective", objective},
          {"metrics", metrics_to_json(metrics)}};
}

std::string file_stem(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

int cmd_generate(const std::string& config_path, const std::optional<int>& customers,
                 const std::optional<int>& satellites,
                 const std::optional<std::uint64_t>& seed,
                 const std::optional<std::string>& name, const std::string& out_path) {
  GenConfig cfg;
  if (!config_path.empty()) cfg = load_gen_config(config_path);
  if (customers) cfg.n_customers = *customers;
  if (satellites) cfg.n_satellites = *satellites;
  if (seed) cfg.seed = *seed;
  if (name) cfg.name = *name;
  const Instance inst = generate(cfg);
  save_instance(inst, out_path);
  std::cout << nlohmann::json{{"instance", inst.name},
                              {"customers", static_cast<int>(inst.customers.size())},
                              {"satellites", static_cast<int>(inst.satellites.size())},
                              {"vehicles", static_cast<int>(inst.vehicles.size())},
                              {"out", out_path}}
                   .dump(2)
            << "\n";
  return kExitOk;
}

int cmd_solve(const std::string& instance_path, const SolveFlags& flags,
              const std::string& backend, const std::string& import_path,
              const std::string& out_path, bool valid_inequalities, bool symmetry_breaking) {
  const Instance inst = load_instance(instance_path);
  const Scenario scenario = flags.scenario();
  const std::string label = inst.name.empty() ? file_stem(instance_path) : inst.name;

  ModelOptions mopts;
  mopts.valid_inequalities = valid_inequalities;
  mopts.symmetry_breaking = symmetry_breaking;
  mopts.green_low_factor = flags.green_low_factor;

  if (!import_path.empty()) {
    const auto values = parse_solution_file(read_text_file(import_path));
    const MilpModel model = build_model(inst, scenario, mopts);
    const Instance effective = scenario_instance(inst, scenario, flags.green_low_factor);
    try {
      const Solution solution = import_solution(values, model, effective);
      const auto violations = check_feasibility(effective, solution);
      if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << "violation: " << to_string(v) << "\n";
        return kExitInvalidImport;
      }
      const Metrics metrics = evaluate(effective, solution);
      std::cout << solve_summary(label, scenario, "import",
                                 metric_value(metrics, scenario.objective), metrics)
                       .dump(2)
                << "\n";
      return kExitOk;
    } catch (const Error& e) {
      // Anything the importer cannot reconstruct is a failed validation of
      // the external file, not a usage error.
      std::cerr << "import rejected: " << e.what() << "\n";
      return kExitInvalidImport;
    }
  }

  if (backend == "export") {
    if (out_path.empty()) throw Error("--backend export requires --out for the model file");
    const MilpModel model = build_model(inst, scenario, mopts);
    write_text_file(out_path, write_mps(model));
    std::cout << nlohmann::json{{"instance", label},
                                {"scenario", scenario_name(scenario)},
                                {"columns", static_cast<int>(model.columns.size())},
                                {"rows", static_cast<int>(model.rows.size())},
                                {"out", out_path}}
                     .dump(2)
              << "\n";
    return kExitOk;
  }

  const SolveResult result = solve_exact(inst, scenario, flags.solve_options());
  if (!out_path.empty()) {
    const MilpModel model = build_model(inst, scenario, mopts);
    const Instance effective = scenario_instance(inst, scenario, flags.green_low_factor);
    const auto values = solution_to_column_values(model, effective, result.solution);
    write_text_file(out_path, write_solution_values(model, values));
  }
  std::cout << solve_summary(label, scenario, "oracle", result.objective, result.metrics)
                   .dump(2)
            << "\n";
  return kExitOk;
}

int batch_thread_count(std::size_t tasks) {
  if (tasks <= 1) return 1;
  unsigned threads = std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  if (const char* env = std::getenv("VERDE2E_THREADS")) {
    std::size_t pos = 0;
    int parsed = 0;
    try {
      parsed = std::stoi(env, &pos);
    } catch (const std::exception&) {
      throw Error(std::string("VERDE2E_THREADS is not a number: ") + env);
    }
    if (pos != std::string(env).size() || parsed < 1)
      throw Error(std::string("VERDE2E_THREADS must be a positive integer: ") + env);
    threads = static_cast<unsigned>(parsed);
  }
  return static_cast<int>(std::min<std::size_t>(threads, tasks));
}

int cmd_batch(const std::string& instances_dir, const std::string& scenario_list,
              const SolveFlags& flags, const std::string& out_dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(instances_dir))
    throw Error("not a directory: " + instances_dir);

  std::vector<std::string> scenario_names;
  std::vector<Scenario> scenarios;
  {
    std::istringstream is(scenario_list);
    std::string token;
    while (std::getline(is, token, ',')) {
      if (token.empty()) continue;
      scenarios.push_back(parse_scenario(token));
      scenario_names.push_back(scenario_name(scenarios.back()));
    }
  }
  if (scenarios.empty()) throw Error("no scenarios requested");

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(instances_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  // One slot per instance keeps the final record order independent of
  // thread scheduling.
  std::vector<std::vector<RunRecord>> slots(files.size());
  std::atomic<std::size_t> next{0};
  const SolveOptions base_options = flags.solve_options();
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= files.size()) return;
      const std::string label = files[i].stem().string();
      std::optional<Instance> inst;
      std::string load_error;
      try {
        inst = load_instance(files[i].string());
      } catch (const std::exception& e) {
        load_error = e.what();
      }
      for (std::size_t s = 0; s < scenarios.size(); ++s) {
        RunRecord rec;
        rec.instance = label;
        rec.scenario = scenario_names[s];
        if (!inst) {
          rec.error = load_error;
          slots[i].push_back(rec);
          continue;
        }
        rec.n_customers = static_cast<int>(inst->customers.size());
        for (const auto& sat : inst->satellites) rec.satellite_nodes.push_back(sat.node);
        try {
          const SolveResult result = solve_exact(*inst, scenarios[s], base_options);
          rec.solved = true;
          rec.metrics = result.metrics;
          rec.active_satellite_nodes = active_satellite_nodes(result.solution);
        } catch (const std::exception& e) {
          rec.error = e.what();
        }
        slots[i].push_back(rec);
      }
    }
  };
  const int n_threads = batch_thread_count(files.size());
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  RunReport report;
  for (auto& slot : slots)
    for (auto& rec : slot) report.records.push_back(std::move(rec));

  // Variation pairs: the distance-versus-emissions contrast first, then
  // each scenario against its full-home-delivery twin.
  std::vector<VariationRow> variations;
  const auto has = [&](const std::string& name) {
    return std::find(scenario_names.begin(), scenario_names.end(), name) !=
           scenario_names.end();
  };
  if (has("ehc") && has("td")) {
    const auto rows = variation_rows(report, "ehc", "td");
    variations.insert(variations.end(), rows.begin(), rows.end());
  }
  for (const auto& name : report.scenarios()) {
    if (name.size() > 3 && name.substr(name.size() - 3) == "_hd") continue;
    if (!has(name + "_hd")) continue;
    const auto rows = variation_rows(report, name, name + "_hd");
    variations.insert(variations.end(), rows.begin(), rows.end());
  }

  fs::create_directories(out_dir);
  const auto aggregates = aggregate(report);
  const auto frequency = satellite_frequency(report);
  const auto write_pair = [&](const std::string& stem_name, const std::string& csv,
                              const nlohmann::json& json) {
    write_text_file((fs::path(out_dir) / (stem_name + ".csv")).string(), csv);
    write_text_file((fs::path(out_dir) / (stem_name + ".json")).string(),
                    json.dump(2) + "\n");
  };
  write_pair("records", records_csv(report), records_json(report));
  write_pair("breakdown", breakdown_csv(aggregates), breakdown_json(aggregates));
  write_pair("satellite_frequency", satellite_frequency_csv(frequency),
             satellite_frequency_json(frequency));
  write_pair("customer_stats", customer_stats_csv(aggregates),
             customer_stats_json(aggregates));
  write_pair("variation", variation_csv(variations), variation_json(variations));

  int solved = 0, failed = 0;
  for (const auto& r : report.records) (r.solved ? solved : failed)++;
  std::cout << nlohmann::json{{"instances", static_cast<int>(files.size())},
                              {"scenarios", scenario_names},
                              {"solved", solved},
                              {"failed", failed},
                              {"out", out_dir}}
                   .dump(2)
            << "\n";
  return kExitOk;
}

int cmd_pareto(const std::string& instance_path, int n_points, const SolveFlags& flags,
               const std::string& backend, const std::string& out_path) {
  if (backend != "oracle")
    throw Error("pareto supports only --backend oracle; export has no solver to sweep");
  const Instance inst = load_instance(instance_path);
  OracleBackend oracle(inst, flags.scenario(), flags.solve_options());
  const auto frontier = sweep(oracle, n_points);
  const std::string csv = frontier_csv(frontier);
  if (out_path.empty()) {
    std::cout << csv;
    return kExitOk;
  }
  write_text_file(out_path, csv);
  const auto knee = knee_point(frontier);
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    const auto& p = frontier[i];
    rows.push_back({{"emissions_kg", p.emissions_kg},
                    {"total_distance_km", p.total_distance_km},
                    {"epsilon", p.epsilon_used ? nlohmann::json(*p.epsilon_used)
                                               : nlohmann::json(nullptr)},
                    {"is_knee", knee && *knee == i}});
  }
  std::filesystem::path json_path(out_path);
  if (json_path.extension() == ".csv") json_path.replace_extension(".json");
  else json_path += ".json";
  write_text_file(json_path.string(), rows.dump(2) + "\n");
  std::cout << nlohmann::json{{"points", static_cast<int>(frontier.size())},
                              {"knee_index", knee ? nlohmann::json(static_cast<int>(*knee))
                                                  : nlohmann::json(nullptr)},
                              {"out", out_path}}
                   .dump(2)
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-echelon location-routing toolkit: generate instances, solve "
               "scenarios exactly, export/import MPS models, and trace "
               "emissions/distance frontiers"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic instance file");
  std::string gen_config_path;
  std::optional<int> gen_customers, gen_satellites;
  std::optional<std::uint64_t> gen_seed;
  std::optional<std::string> gen_name;
  std::string gen_out;
  gen->add_option("--config", gen_config_path, "Generator configuration JSON");
  gen->add_option("--customers", gen_customers, "Number of customers");
  gen->add_option("--satellites", gen_satellites, "Number of candidate satellites");
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("--name", gen_name, "Instance name override");
  gen->add_option("--out", gen_out, "Instance file to write")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "Solve one instance under one scenario");
  std::string solve_instance, solve_backend = "oracle", solve_import, solve_out;
  bool solve_vi = false, solve_sym = false;
  SolveFlags solve_flags;
  solve->add_option("--instance", solve_instance, "Instance JSON file")->required();
  solve->add_option("--backend", solve_backend, "oracle (solve now) or export (write MPS)")
      ->check(CLI::IsMember({"oracle", "export"}))
      ->capture_default_str();
  solve->add_option("--import", solve_import,
                    "Column-value file from an external solver to validate and score");
  solve->add_option("--out", solve_out,
                    "Output path: solution values (oracle) or MPS model (export)");
  solve->add_flag("--valid-inequalities", solve_vi, "Add tightening rows to the model");
  solve->add_flag("--symmetry-breaking", solve_sym,
                  "Order interchangeable vehicles in the model");
  solve_flags.attach(solve);

  // batch
  auto* batch = app.add_subcommand(
      "batch", "Solve every instance in a directory across scenarios and write report tables");
  std::string batch_dir, batch_scenarios = "ehc,elc,td,cd", batch_out;
  SolveFlags batch_flags;
  batch->add_option("--instances", batch_dir, "Directory of instance JSON files")->required();
  batch->add_option("--scenarios", batch_scenarios, "Comma-separated scenario list")
      ->capture_default_str();
  batch->add_option("--out", batch_out, "Directory for report tables")->required();
  batch_flags.attach(batch);

  // pareto
  auto* pareto = app.add_subcommand("pareto", "Trace the emissions/distance frontier");
  std::string pareto_instance, pareto_backend = "oracle", pareto_out;
  int pareto_points = 10;
  SolveFlags pareto_flags;
  pareto->add_option("--instance", pareto_instance, "Instance JSON file")->required();
  pareto->add_option("--n-points", pareto_points, "Number of frontier probes (at least 2)")
      ->capture_default_str();
  pareto->add_option("--backend", pareto_backend, "Only oracle is supported")
      ->capture_default_str();
  pareto->add_option("--out", pareto_out,
                     "Frontier CSV path (a .json twin is written alongside)");
  pareto_flags.attach(pareto);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen)
      return cmd_generate(gen_config_path, gen_customers, gen_satellites, gen_seed, gen_name,
                          gen_out);
    if (*solve)
      return cmd_solve(solve_instance, solve_flags, solve_backend, solve_import, solve_out,
                       solve_vi, solve_sym);
    if (*batch) return cmd_batch(batch_dir, batch_scenarios, batch_flags, batch_out);
    if (*pareto)
      return cmd_pareto(pareto_instance, pareto_points, pareto_flags, pareto_backend,
                        pareto_out);
  } catch (const BudgetExceededError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const InfeasibleSolutionError& e) {
    std::cerr << "solution rejected: " << e.what() << "\n";
    return kExitInvalidImport;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
