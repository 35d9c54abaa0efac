#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "ipslab/cli.hpp"

int main(int argc, char** argv) {
  using namespace ipslab::cli;
  CLI::App app{"Verification lab for functional inequalities on finite interacting particle systems"};
  app.require_subcommand(1);

  RunFlags flags;
  std::string config;
  std::string tolerance;
  std::string timestamp;
  std::size_t functions = 0;

  const std::map<std::string, std::string> about{
      {"constants", "spectral gap, log-Sobolev constant and the inequality chain"},
      {"talagrand", "L1-L2 Talagrand inequality and its Orlicz corollary"},
      {"commutation", "gradient-semigroup commutation bound over a time grid"},
      {"reverse", "reverse Talagrand bound on spiky functions"},
      {"russo", "Russo-Margulis formula along the parameter family"},
      {"kkl", "indicator-derivative sandwich and influence bounds"},
      {"threshold", "sharp-threshold differential inequality"},
      {"simulate", "Monte Carlo graphical construction vs the exact semigroup"},
      {"trees", "binary-tree masses, decomposition and Catalan identity"},
      {"all", "every section applicable to the config"},
  };
  for (const auto& name : subcommands()) {
    CLI::App* sub = app.add_subcommand(name, about.count(name) ? about.at(name) : "");
    sub->add_option("--config", config, "model config (JSON)");
    sub->add_option("--seed", flags.seed, "master seed");
    sub->add_option("--workers", flags.workers, "worker threads for parallel sections");
    sub->add_option("--out", flags.out, "output directory for report.json and witness.csv");
    sub->add_option("--tolerance", tolerance, "tolerance profile: default or relaxed");
    sub->add_option("--functions", functions, "random test functions per check");
    sub->add_option("--timestamp", timestamp, "timestamp recorded in the manifest");
    if (name == "simulate" || name == "all") {
      sub->add_option("--t", flags.t, "time horizon");
      sub->add_option("--samples", flags.samples, "Monte Carlo samples");
    }
    if (name == "trees" || name == "all") sub->add_option("--n", flags.n, "number of leaves");
  }
  CLI::App* replay_cmd = app.add_subcommand("replay", "re-execute a run from its manifest");
  std::string manifest;
  replay_cmd->add_option("--manifest", manifest, "report.json or bare manifest")->required();
  replay_cmd->add_option("--out", flags.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  if (replay_cmd->parsed()) return replay(manifest, flags.out, std::cout).exit_code;

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->count("--config") > 0) flags.config = config;
  if (chosen->count("--tolerance") > 0) flags.tolerance = tolerance;
  if (chosen->count("--timestamp") > 0) flags.timestamp = timestamp;
  if (chosen->count("--functions") > 0) flags.functions = functions;
  return run(chosen->get_name(), flags, std::cout).exit_code;
}
