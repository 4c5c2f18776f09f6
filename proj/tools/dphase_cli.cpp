// dphase: command-line front end. See README.md for the config keys.

#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "dphase/app.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"Pseudo double phase solver, optimal control and convexity lab"};
  std::string command;
  std::optional<std::string> config, out, seed, m, n, q, p, epsilon, tol, max_iters, mu_const;
  bool strict = false, dump = false;

  cli.add_option("command", command, "solve | compare-ops | convexity | control | exponents");
  cli.add_option("--config", config, "key = value config file");
  cli.add_option("--out", out, "output directory");
  cli.add_option("--seed", seed, "RNG seed");
  cli.add_option("--m", m, "interior nodes per axis");
  cli.add_option("--n", n, "dimension (1 or 2)");
  cli.add_option("--q", q, "growth exponent q (fractions such as 4/3 accepted)");
  cli.add_option("--p", p, "growth exponent p");
  cli.add_flag("--strict-sobolev", strict, "derive p from 1/p = 1/q - 1/n");
  cli.add_option("--epsilon", epsilon, "regularization epsilon");
  cli.add_option("--tol", tol, "solver gradient tolerance");
  cli.add_option("--max-iters", max_iters, "solver iteration cap");
  cli.add_option("--mu-const", mu_const, "constant weight mu0");
  cli.add_flag("--dump-energy-trace", dump, "write energy_trace.csv");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return 1;
  }

  std::vector<std::pair<std::string, std::string>> overrides;
  auto set = [&](const char* key, const std::optional<std::string>& v) {
    if (v) overrides.emplace_back(key, *v);
  };
  if (!command.empty()) overrides.emplace_back("command", command);
  set("out", out);
  set("seed", seed);
  set("grid.m", m);
  set("grid.n", n);
  set("exponents.q", q);
  set("exponents.p", p);
  set("exponents.epsilon", epsilon);
  set("solver.tol", tol);
  set("solver.max_iters", max_iters);
  if (strict) overrides.emplace_back("exponents.mode", "strict");
  if (mu_const) {
    overrides.emplace_back("weight.kind", "constant");
    overrides.emplace_back("weight.mu0", *mu_const);
  }
  if (dump) overrides.emplace_back("dump_energy_trace", "true");

  dphase::RunConfig cfg;
  try {
    cfg = dphase::load_config(config, overrides);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return dphase::run(cfg, std::cerr);
}
