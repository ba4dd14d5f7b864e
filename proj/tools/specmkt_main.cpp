// Command-line experiment runner for the subsidized spectrum-market model.

#include <string>

#include <CLI11.hpp>

#include "specmkt/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Subsidized spectrum-market equilibrium experiments"};
  app.require_subcommand(1);

  specmkt::ExperimentSpec spec;
  std::string config;
  std::string out = "-";
  std::string figure;
  double epsilon = 0.0;
  long long runs = 0;

  const auto add_common = [&](CLI::App* cmd, bool takes_config) {
    if (takes_config)
      cmd->add_option("--config", config, "experiment config file")->required();
    cmd->add_option("--out", out, "output CSV path, '-' for stdout");
    cmd->add_option("--seed", spec.seed, "random seed");
    cmd->add_option("--epsilon", epsilon, "objective-delta convergence threshold")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", spec.max_iter, "best-response iteration cap")
        ->check(CLI::PositiveNumber);
  };

  auto* evaluate = app.add_subcommand("evaluate", "objectives and welfare at a fixed strategy");
  add_common(evaluate, true);
  auto* equilibrium = app.add_subcommand("equilibrium", "best-response equilibrium solve");
  add_common(equilibrium, true);
  auto* monte_carlo = app.add_subcommand(
      "monte-carlo", "convergence statistics over random instances (built-in ranges)");
  add_common(monte_carlo, false);
  monte_carlo->add_option("--runs", runs, "number of random instances")
      ->check(CLI::PositiveNumber);
  auto* closed_form = app.add_subcommand("closed-form", "closed-form approximate solution");
  add_common(closed_form, true);
  auto* sweep_cmd = app.add_subcommand("sweep", "welfare-maximizing subsidy split");
  add_common(sweep_cmd, true);
  sweep_cmd->add_option("--runs", runs, "number of subsidy grid points")
      ->check(CLI::PositiveNumber);
  auto* figure_cmd = app.add_subcommand("figure", "figure dataset emission");
  add_common(figure_cmd, true);
  figure_cmd->add_option("--figure", figure, "dataset id (fig2 ... fig10)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return specmkt::ExitCode::config;
  }

  if (evaluate->parsed()) spec.command = specmkt::Command::evaluate;
  if (equilibrium->parsed()) spec.command = specmkt::Command::equilibrium;
  if (monte_carlo->parsed()) spec.command = specmkt::Command::monte_carlo;
  if (closed_form->parsed()) spec.command = specmkt::Command::closed_form;
  if (sweep_cmd->parsed()) spec.command = specmkt::Command::sweep;
  if (figure_cmd->parsed()) spec.command = specmkt::Command::figure;

  spec.config_path = config;
  spec.out_path = out;
  if (epsilon > 0.0) spec.epsilon = epsilon;
  if (runs > 0) spec.runs = runs;
  if (!figure.empty()) {
    spec.figure = specmkt::parse_figure_id(figure);
    if (!spec.figure) {
      std::cerr << "config error: unknown figure id '" << figure << "'\n";
      return specmkt::ExitCode::config;
    }
  }
  return specmkt::run(spec);
}
