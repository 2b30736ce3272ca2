// riccati-geom: command-line front end over problem files.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 input error,
// 3 numerical error.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "riccati_geom/commands.hpp"
#include "riccati_geom/errors.hpp"

namespace rg = riccati_geom;

int main(int argc, char** argv) {
  CLI::App app{"Constrained generalized Riccati equation: verification, geometry, zeros, stabilization"};
  app.require_subcommand(1);

  std::string file;
  std::string format = "text";
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> candidate;
  std::string targets;
  std::string x0;
  double horizon = 10.0;
  rg::Index steps = 11;
  bool with_L = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("problem", file, "problem file (JSON)")->required();
    sub->add_option("--tol", tol, "rank / acceptance tolerance (default RICCATI_GEOM_TOL or 1e-8)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed for sample points and random reductions");
    sub->add_option("--format", format, "report format")->check(CLI::IsMember({"text", "json"}));
  };

  CLI::App* check = app.add_subcommand("check", "positivity of the Popov matrix");
  CLI::App* verify = app.add_subcommand("verify", "verify candidate solutions and their geometric properties");
  CLI::App* zeros = app.add_subcommand("zeros", "block decomposition and invariant zeros of the Hamiltonian system");
  CLI::App* stabilize = app.add_subcommand("stabilize", "cost-preserving stabilizing feedback");
  CLI::App* simulate = app.add_subcommand("simulate", "closed-loop trajectories and cost");
  CLI::App* solve = app.add_subcommand("solve", "reduction solver");
  for (CLI::App* sub : {check, verify, zeros, stabilize, simulate, solve}) add_common(sub);
  for (CLI::App* sub : {verify, zeros, stabilize, simulate}) {
    sub->add_option("--candidate", candidate, "candidate label (default: first in file)");
  }
  for (CLI::App* sub : {stabilize, simulate, solve}) {
    sub->add_option("--targets", targets, "comma-separated eigenvalues, e.g. -2,-1+3i,-1-3i");
  }
  simulate->add_option("--x0", x0, "comma-separated initial state");
  simulate->add_option("--horizon", horizon, "trajectory horizon in seconds")->check(CLI::NonNegativeNumber);
  simulate->add_option("--steps", steps, "number of trajectory samples (>= 2)");
  simulate->add_flag("--with-L", with_L, "add the stabilizing feedback L to -K_X");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rg::kExitInputError;
  }

  try {
    rg::CommandOptions opt;
    opt.tol = tol;
    opt.seed = seed;
    opt.candidate = candidate;
    if (!targets.empty()) opt.targets = rg::parse_spectrum_list(targets);
    if (!x0.empty()) opt.x0 = rg::parse_vector_list(x0);
    opt.horizon = horizon;
    opt.steps = steps;
    opt.with_L = with_L;

    const rg::ProblemFile problem = rg::load_problem(file);
    rg::Report report;
    if (check->parsed()) report = rg::cmd_check(problem, opt);
    else if (verify->parsed()) report = rg::cmd_verify(problem, opt);
    else if (zeros->parsed()) report = rg::cmd_zeros(problem, opt);
    else if (stabilize->parsed()) report = rg::cmd_stabilize(problem, opt);
    else if (simulate->parsed()) report = rg::cmd_simulate(problem, opt);
    else report = rg::cmd_solve(problem, opt);

    std::cout << (format == "json" ? rg::render_json(report) : rg::render_text(report));
    return report.exit_code();
  } catch (const rg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.category() == rg::ErrorCategory::kInput ? rg::kExitInputError : rg::kExitNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return rg::kExitNumericalError;
  }
}
