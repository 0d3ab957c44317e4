#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "duolind/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"exact time evolution of two coupled, damped bosonic modes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", duolind::cli::tool_version());
  app.set_config("--config", "", "read option defaults from an INI file");

  duolind::cli::SolveArgs solve_args;
  duolind::cli::HomArgs hom_args;
  duolind::cli::VerifyArgs verify_args;
  std::string solve_method = "auto";
  std::string hom_method = "auto";

  const auto add_common = [](CLI::App* cmd, duolind::cli::CommonArgs& c,
                             std::string& method) {
    cmd->add_option("--g", c.cfg.g, "mode coupling strength")->capture_default_str();
    cmd->add_option("--gamma1", c.cfg.gamma1, "mode 1 damping rate")
        ->capture_default_str();
    cmd->add_option("--gamma2", c.cfg.gamma2, "mode 2 damping rate")
        ->capture_default_str();
    cmd->add_option("--nbar", c.cfg.nbar, "bath thermal occupation")
        ->capture_default_str();
    cmd->add_option("--cutoff", c.cfg.cutoff, "per-mode photon cutoff")
        ->capture_default_str();
    cmd->add_option("--method", method, "propagator path")
        ->capture_default_str()
        ->check(CLI::IsMember({"auto", "automatic", "diag", "diagonalized", "direct"}));
    cmd->add_option("--out", c.out, "write CSV here plus <out>.manifest.json");
    cmd->add_option("--seed", c.seed, "seed recorded in the manifest")
        ->capture_default_str();
    cmd->add_option("--jobs", c.jobs, "worker threads")->capture_default_str();
  };

  CLI::App* solve = app.add_subcommand(
      "solve", "evolve one initial state over a time grid and tabulate observables");
  add_common(solve, solve_args.common, solve_method);
  solve->add_option("--tmax", solve_args.tmax, "end of the time grid")
      ->capture_default_str();
  solve->add_option("--steps", solve_args.steps, "number of grid points")
      ->capture_default_str();
  std::vector<int> state_vals;
  CLI::Option* state_opt =
      solve->add_option("--state", state_vals, "initial number state n1 n2")
          ->expected(2);
  double thermal_nbar0 = 0.0;
  CLI::Option* thermal_opt = solve->add_option(
      "--thermal-state", thermal_nbar0, "start from a product thermal state");

  CLI::App* hom = app.add_subcommand(
      "hom", "sweep the pair coincidence over a (time, gamma1) grid");
  add_common(hom, hom_args.common, hom_method);
  hom->add_option("--tmax", hom_args.grid.tmax, "end of the time grid (default pi/g)");
  hom->add_option("--tsteps", hom_args.grid.tpoints, "time grid points")
      ->capture_default_str();
  hom->add_option("--gamma1-max", hom_args.grid.gamma1_max,
                  "largest gamma1 (default g)");
  hom->add_option("--gamma1-steps", hom_args.grid.gamma1_points, "gamma1 grid points")
      ->capture_default_str();
  hom->add_option("--render", hom_args.render, "also write an SVG heatmap here");

  CLI::App* verify = app.add_subcommand(
      "verify", "run the built-in consistency and cross-check suites");
  verify->add_option("--seed", verify_args.seed, "seed for randomized checks")
      ->capture_default_str();
  double tol = 0.0;
  CLI::Option* tol_opt =
      verify->add_option("--tol", tol, "override every residual threshold");
  verify->add_option("--suite", verify_args.suites,
                     "run only the named suites (repeatable)");
  verify->add_option("--jobs", verify_args.jobs, "worker threads")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) {
      solve_args.common.cfg.method = duolind::method_from_name(solve_method);
      if (state_opt->count() > 0)
        solve_args.number_state = std::make_pair(state_vals[0], state_vals[1]);
      if (thermal_opt->count() > 0) solve_args.thermal_nbar0 = thermal_nbar0;
      return duolind::cli::cmd_solve(solve_args, std::cout, std::cerr);
    }
    if (hom->parsed()) {
      hom_args.common.cfg.method = duolind::method_from_name(hom_method);
      return duolind::cli::cmd_hom(hom_args, std::cout, std::cerr);
    }
    if (verify->parsed()) {
      if (tol_opt->count() > 0) verify_args.tol_override = tol;
      return duolind::cli::cmd_verify(verify_args, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
