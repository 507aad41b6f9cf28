// Command-line front end: scenario generation, equilibrium solving with trace
// emission, integer allocation, the reference case study, and the robustness
// sweep. Exit codes: 0 ok, 2 missing/invalid input, 3 infeasible or
// degenerate instance, 4 numeric failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fleetcharge/fleetcharge.hpp"

namespace fs = std::filesystem;
using namespace fleetcharge;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumeric = 4;

std::uint64_t effective_seed(std::uint64_t flag_seed) {
  if (const char* env = std::getenv("FLEETCHARGE_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError("FLEETCHARGE_SEED is not a number: " + std::string(env));
    }
  }
  return flag_seed;
}

Scenario load_or_die(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("scenario file not found: " + path.string());
  return load_scenario(path);
}

void apply_solver_flags(CLI::App* cmd, SolverConfig& cfg, std::optional<double>& gamma_flag) {
  cmd->add_option("--iters", cfg.max_iters, "maximum iterations")->capture_default_str();
  cmd->add_option("--tol", cfg.tol, "fixed-point tolerance (sup-norm change)")->capture_default_str();
  cmd->add_option("--gamma", gamma_flag, "step size (default: 0.99 * 2/lambda_max)");
}

void write_solve_outputs(const fs::path& out_dir, const Scenario& s, const EquilibriumResult& res) {
  fs::create_directories(out_dir);
  write_trace_csv(out_dir / "trace.csv", res);
  write_decisions_csv(out_dir / "decisions.csv", s, res);
  write_audit_json(out_dir / "audit.json", s, res);
}

Vec parse_list(const std::string& text) {
  Vec out;
  std::string cell;
  std::istringstream in(text);
  while (std::getline(in, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"system-optimal charging prices and fleet equilibria"};
  app.require_subcommand(1);

  // ---- generate ----------------------------------------------------------
  auto* generate = app.add_subcommand("generate", "draw a random scenario and save it");
  std::uint64_t gen_seed = 1;
  std::string gen_out = "scenario.json";
  std::string gen_fleets = "60,35,45", gen_caps = "20,10,15,10", gen_target = "35,15,50,40";
  std::string gen_q = "1,5,3,2", gen_p = "0.15,0.4,0.2,0.1";
  std::string gen_epro;
  double gen_side = 60.0, gen_u = 1.0, gen_beta = 1.0;
  generate->add_option("--seed", gen_seed, "random seed")->capture_default_str();
  generate->add_option("--out", gen_out, "output scenario file")->capture_default_str();
  generate->add_option("--fleets", gen_fleets, "fleet sizes, comma separated")->capture_default_str();
  generate->add_option("--capacities", gen_caps, "station capacities")->capture_default_str();
  generate->add_option("--target", gen_target, "desired vehicle counts per station")->capture_default_str();
  generate->add_option("--q", gen_q, "diagonal of the queuing scale Q (A_G = 2Q)")->capture_default_str();
  generate->add_option("--p", gen_p, "occupancy probabilities per station")->capture_default_str();
  generate->add_option("--e-pro", gen_epro, "fix e_pro instead of drawing it");
  generate->add_option("--side", gen_side, "square region side length")->capture_default_str();
  generate->add_option("--u", gen_u, "monetary value per occupied km")->capture_default_str();
  generate->add_option("--beta", gen_beta, "charge units per battery percent")->capture_default_str();

  // ---- solve -------------------------------------------------------------
  auto* solve = app.add_subcommand("solve", "compute the equilibrium for a saved scenario");
  std::string solve_scenario, solve_out = "out";
  SolverConfig solve_cfg;
  std::optional<double> solve_gamma;
  solve->add_option("--scenario", solve_scenario, "scenario file")->required();
  solve->add_option("--out", solve_out, "output directory")->capture_default_str();
  apply_solver_flags(solve, solve_cfg, solve_gamma);

  // ---- allocate ----------------------------------------------------------
  auto* allocate = app.add_subcommand("allocate", "integerize a solved equilibrium and match vehicles");
  std::string alloc_scenario, alloc_decisions, alloc_out = "assignment.csv";
  allocate->add_option("--scenario", alloc_scenario, "scenario file")->required();
  allocate->add_option("--decisions", alloc_decisions, "decisions.csv from a prior solve")->required();
  allocate->add_option("--out", alloc_out, "assignment csv")->capture_default_str();

  // ---- example -----------------------------------------------------------
  auto* example = app.add_subcommand("example", "run the reference case study end to end");
  std::uint64_t ex_seed = 1;
  std::string ex_out = "example_out";
  std::string ex_epro;
  bool ex_random_epro = false;
  SolverConfig ex_cfg;
  std::optional<double> ex_gamma;
  example->add_option("--seed", ex_seed, "placement seed")->capture_default_str();
  example->add_option("--out", ex_out, "output directory")->capture_default_str();
  example->add_option("--e-pro", ex_epro, "expected-profit vector (default: the reference draw)");
  example->add_flag("--random-e-pro", ex_random_epro, "draw e_pro from U[100,350] instead");
  apply_solver_flags(example, ex_cfg, ex_gamma);

  // ---- robustness --------------------------------------------------------
  auto* robust = app.add_subcommand("robustness", "sweep the demand-estimate noise level");
  std::string rob_scenario, rob_out = "robustness_out";
  std::string rob_alphas = "0,0.2,0.4,0.6,0.8,1.0";
  RobustnessConfig rob_cfg;
  SolverConfig rob_solver;
  std::optional<double> rob_gamma;
  std::uint64_t rob_seed = 1;
  robust->add_option("--scenario", rob_scenario, "baseline scenario (default: reference case study)");
  robust->add_option("--out", rob_out, "output directory")->capture_default_str();
  robust->add_option("--alphas", rob_alphas, "noise levels, comma separated")->capture_default_str();
  robust->add_option("--samples", rob_cfg.samples_per_alpha, "samples per alpha")->capture_default_str();
  robust->add_option("--seed", rob_seed, "noise seed")->capture_default_str();
  robust->add_flag("--perturb-earr", rob_cfg.perturb_e_arr, "also perturb the idle-travel cost estimate");
  apply_solver_flags(robust, rob_solver, rob_gamma);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      GenerationConfig cfg = example_generation_config();
      cfg.fleet_sizes.clear();
      for (double v : parse_list(gen_fleets)) cfg.fleet_sizes.push_back(static_cast<int>(v));
      cfg.capacities.clear();
      for (double v : parse_list(gen_caps)) cfg.capacities.push_back(static_cast<int>(v));
      cfg.target = parse_list(gen_target);
      cfg.q = parse_list(gen_q);
      cfg.p_occupied = parse_list(gen_p);
      cfg.region_side = gen_side;
      cfg.u = gen_u;
      cfg.beta = gen_beta;
      if (!gen_epro.empty()) cfg.fixed_e_pro = parse_list(gen_epro);
      const auto [scenario, used] = generate_nondegenerate(cfg, effective_seed(gen_seed));
      save_scenario(scenario, gen_out);
      std::cout << "wrote " << gen_out << " (seed " << used << ")\n";
    } else if (*solve) {
      const Scenario s = load_or_die(solve_scenario);
      solve_cfg.gamma = solve_gamma;
      const EquilibriumResult res = solve_equilibrium(s, solve_cfg);
      write_solve_outputs(solve_out, s, res);
      std::cout << "J_G = " << res.jg_final << " after " << res.iterations << " iterations (converged: "
                << (res.converged ? "yes" : "no") << ", vi_residual " << res.vi_residual << ")\n";
    } else if (*allocate) {
      const Scenario s = load_or_die(alloc_scenario);
      if (!fs::exists(alloc_decisions))
        throw IoError("decisions file not found (solve first): " + std::string(alloc_decisions));
      const std::vector<Vec> x = read_decisions_csv(alloc_decisions, s);
      const auto [allocs, assigns] = allocate_equilibrium(s, x);
      write_assignment_csv(alloc_out, s, assigns);
      std::cout << "wrote " << alloc_out << "\n";
    } else if (*example) {
      ex_cfg.gamma = ex_gamma;
      std::optional<Vec> epro = example_e_pro();
      if (ex_random_epro) epro.reset();
      if (!ex_epro.empty()) epro = parse_list(ex_epro);
      const ExampleRun run = run_example(effective_seed(ex_seed), ex_cfg, epro);
      fs::create_directories(ex_out);
      save_scenario(run.scenario, fs::path(ex_out) / "scenario.json");
      write_solve_outputs(ex_out, run.scenario, run.result);
      write_assignment_csv(fs::path(ex_out) / "assignment.csv", run.scenario, run.assignments);
      std::cout << "seed " << run.seed_used << ": J_G = " << run.result.jg_final << " after "
                << run.result.iterations << " iterations\n";
    } else if (*robust) {
      Scenario s;
      if (rob_scenario.empty()) {
        GenerationConfig cfg = example_generation_config();
        cfg.fixed_e_pro = example_e_pro();
        s = generate_nondegenerate(cfg, effective_seed(rob_seed)).first;
      } else {
        s = load_or_die(rob_scenario);
      }
      rob_cfg.seed = effective_seed(rob_seed);
      rob_cfg.alphas = parse_list(rob_alphas);
      rob_solver.gamma = rob_gamma;
      const auto rows = robustness_sweep(s, rob_cfg, rob_solver);
      fs::create_directories(rob_out);
      write_robustness_csv(fs::path(rob_out) / "robustness.csv", rows);
      save_scenario(s, fs::path(rob_out) / "scenario.json");
      std::cout << "wrote " << (fs::path(rob_out) / "robustness.csv").string() << "\n";
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
