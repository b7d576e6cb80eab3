#include <exception>
#include <functional>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "tropical/errors.hpp"

using tropical::cli::Config;

int main(int argc, char** argv) {
  CLI::App app{"Tropical equilibration and hybrid reduction of ε-graded ODE systems"};
  app.require_subcommand(1);
  app.fallthrough();
  Config cfg;
  double eps = 0, t_end = 0;

  app.add_option("--model", cfg.model, "model JSON path or builtin 'tyson'");
  app.add_option("--profile", cfg.profile, "rate-constant profile for the builtin model");
  auto* eps_opt = app.add_option("--eps", eps, "small parameter");
  app.add_option("--tol", cfg.tol, "integration / projection tolerance")->capture_default_str();
  auto* t_end_opt = app.add_option("--t-end", t_end, "integration horizon");
  app.add_option("--out", cfg.out, "output directory")->capture_default_str();
  app.add_option("--seed", cfg.seed, "seed for randomized harnesses");

  auto equil_flags = [&](CLI::App* sub) {
    sub->add_flag("--conservation", cfg.conservation, "apply the conservation laws");
    sub->add_option("--subset", cfg.subset, "equations to equilibrate (0-based)")->delimiter(',');
    sub->add_flag("--exclusive", cfg.exclusive, "drop pieces equilibrating equations outside the subset");
    sub->add_flag("--no-permanency", cfg.no_permanency, "keep pieces failing the permanency filter");
  };
  auto state_flag = [&](CLI::App* sub) {
    sub->add_option("--x0", cfg.x0, "initial state")->delimiter(',');
  };
  auto run_flags = [&](CLI::App* sub) {
    sub->add_option("--method", cfg.method, "auto | explicit | stiff")->capture_default_str();
    sub->add_option("--wall", cfg.wall, "equilibrate | abort")->capture_default_str();
    state_flag(sub);
  };

  std::function<int(const Config&)> command;

  auto* equilibrate = app.add_subcommand("equilibrate", "solve for the renormalization exponents");
  equil_flags(equilibrate);
  equilibrate->callback([&] { command = tropical::cli::cmd_equilibrate; });

  auto* tropicalize = app.add_subcommand("tropicalize", "dominance groups and the active mode at x0");
  tropicalize->add_option("--kind", cfg.kind, "complete | two-terms");
  state_flag(tropicalize);
  tropicalize->callback([&] { command = tropical::cli::cmd_tropicalize; });

  auto* simulate = app.add_subcommand("simulate", "integrate and write trajectory and event CSVs");
  simulate->add_option("--kind", cfg.kind, "full | complete | two-terms | hybrid3")->capture_default_str();
  run_flags(simulate);
  simulate->callback([&] { command = tropical::cli::cmd_simulate; });

  auto* reduce = app.add_subcommand("reduce", "truncated system of one equilibration");
  equil_flags(reduce);
  reduce->add_option("--solution", cfg.solution, "solution index")->capture_default_str();
  reduce->callback([&] { command = tropical::cli::cmd_reduce; });

  auto* compare = app.add_subcommand("compare", "sup-norm errors between two kinds over an eps list");
  compare->add_option("--a", cfg.kind_a, "first kind")->capture_default_str();
  compare->add_option("--b", cfg.kind_b, "second kind")->capture_default_str();
  compare->add_option("--eps-list", cfg.eps_list, "eps values")->delimiter(',');
  run_flags(compare);
  compare->callback([&] { command = tropical::cli::cmd_compare; });

  auto* demo = app.add_subcommand("tyson-demo", "rest point, stability and three-mode orbit of the profile");
  demo->callback([&] { command = tropical::cli::cmd_tyson_demo; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tropical::cli::kError;
  }
  if (*eps_opt) cfg.eps = eps;
  if (*t_end_opt) cfg.t_end = t_end;

  try {
    return command(cfg);
  } catch (const tropical::IntegrationError& e) {
    std::cerr << "error: " << e.what() << " (t=" << e.time() << ")\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return tropical::cli::kError;
}
