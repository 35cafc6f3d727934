#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dopcbf/experiment.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string controller;
  std::string out_dir;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, CommonOpts* opts, bool with_controller) {
  sub->add_option("-c,--config", opts->config_path,
                  "JSON config file (defaults apply for missing fields)")
      ->check(CLI::ExistingFile);
  if (with_controller) {
    sub->add_option("--controller", opts->controller,
                    "controller to run: cbf | docbf | dopcbf");
  }
  sub->add_option("-o,--out", opts->out_dir, "output directory");
  sub->add_option("--seed", opts->seed, "random seed / master seed");
}

bool option_given(const CLI::App* sub, const std::string& name) {
  const CLI::Option* opt = sub->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

dopcbf::ExperimentConfig resolve(const CLI::App* sub, const CommonOpts& opts) {
  dopcbf::ExperimentConfig cfg;
  if (!opts.config_path.empty()) cfg = dopcbf::load_config(opts.config_path);
  if (option_given(sub, "--controller")) cfg.controller = opts.controller;
  if (option_given(sub, "--out")) cfg.output_dir = opts.out_dir;
  if (option_given(sub, "--seed")) cfg.seed = opts.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Safety-filtered cruise control on graded roads: closed-loop simulation, "
      "paired batch comparison, and robustness-weight sweeps."};
  app.require_subcommand(1);

  CommonOpts sim_opts;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "run one closed-loop trajectory and write "
                  "trajectory.csv, report.json, plot.svg");
  add_common(simulate, &sim_opts, true);

  CommonOpts batch_opts;
  int n_runs = 100;
  CLI::App* batch = app.add_subcommand(
      "batch", "paired docbf/dopcbf runs on seeded random roads; writes "
               "per_run.csv and summary.json");
  add_common(batch, &batch_opts, false);
  batch->add_option("-n,--n", n_runs, "number of road draws")
      ->capture_default_str();

  CommonOpts sweep_opts;
  std::vector<double> sigmas{0.1, 1.0, 10.0};
  CLI::App* sweep = app.add_subcommand(
      "sweep-sigma", "rerun one scenario across robustness weights sigma; "
                     "writes sweep.csv and sweep.svg");
  add_common(sweep, &sweep_opts, true);
  sweep->add_option("--sigmas", sigmas, "sigma values to try")
      ->expected(-1)
      ->delimiter(',')
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) {
      return dopcbf::cmd_simulate(resolve(simulate, sim_opts));
    }
    if (batch->parsed()) {
      return dopcbf::cmd_batch(resolve(batch, batch_opts), n_runs);
    }
    if (sweep->parsed()) {
      return dopcbf::cmd_sweep_sigma(resolve(sweep, sweep_opts), sigmas);
    }
  } catch (const dopcbf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
