#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

using leximin::cli::RunConfig;

int main(int argc, char** argv) {
  CLI::App app{"Leximin approximation solvers and verifiers"};
  app.require_subcommand(1);
  RunConfig cfg;
  double alpha = 0.0, epsilon = 0.0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "instance JSON");
    sub->add_option("--output", cfg.output, "write the JSON report here instead of stdout");
    sub->add_option("--seed", cfg.seed, "seed for every random choice");
    sub->add_option("--alpha", alpha, "multiplicative factor");
    sub->add_option("--epsilon", epsilon, "additive factor");
    sub->add_option("--p", cfg.p, "per-call success probability of the OP");
    sub->add_option("--tolerance", cfg.tolerance, "comparison tolerance");
    sub->add_option("--max-iter", cfg.max_iter, "iteration cap");
  };

  auto* lex = app.add_subcommand("leximin", "run the ordered outcomes algorithm on a multi-objective instance");
  common(lex);
  lex->add_option("--op", cfg.op, "exact | noisy | scripted")->check(CLI::IsMember({"exact", "noisy", "scripted"}));
  lex->add_option("--trace", cfg.trace, "scripted OP trace JSON");

  auto* alloc = app.add_subcommand("allocate", "leximin-approximate stochastic allocation");
  common(alloc);
  alloc->add_option("--utilitarian", cfg.utilitarian, "greedy | bruteforce")
      ->check(CLI::IsMember({"greedy", "bruteforce"}));
  alloc->add_option("--dump-cuts", cfg.dump_cuts, "write per-iteration cut logs as JSON");
  alloc->add_option("--cap", cfg.cap, "allocation count cap for the brute-force utilitarian");
  alloc->add_option("--radius", cfg.radius, "initial ellipsoid radius (0: default)");
  alloc->add_option("--radius-safety", cfg.radius_safety, "multiplier on the default radius");
  alloc->add_option("--ellipsoid-iterations", cfg.iterations, "ellipsoid iterations (0: default)");

  auto* check = app.add_subcommand("check", "verify a result against probe solutions");
  common(check);
  check->add_option("--result", cfg.result, "result JSON")->required();
  check->add_option("--probes", cfg.probes, "probe JSON")->required();

  auto* brute = app.add_subcommand("bruteforce", "reference solution by enumeration");
  common(brute);
  brute->add_option("--cap", cfg.cap, "maximum number of allocations");

  auto* lp = app.add_subcommand("solve-lp", "solve an LP with the simplex method");
  common(lp);

  auto* sat = app.add_subcommand("demo-saturation", "saturation algorithm with an exact and an inexact solver");
  common(sat);
  sat->add_option("--noise", cfg.noise, "relative under-reporting of the inexact solver");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : leximin::cli::kUsage;
  }
  for (auto* sub : app.get_subcommands()) {
    cfg.command = sub->get_name();
    if (sub->count("--alpha")) cfg.alpha = alpha;
    if (sub->count("--epsilon")) cfg.epsilon = epsilon;
  }
  return leximin::cli::run_command(cfg, std::cout, std::cerr);
}
