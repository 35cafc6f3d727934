#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dopcbf/acc.hpp"
#include "dopcbf/integrate.hpp"
#include "dopcbf/metrics.hpp"
#include "dopcbf/road.hpp"

namespace dopcbf {

/// Invalid or malformed configuration; the message names the field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Road selection prior to seeding (random roads are materialized per run).
struct RoadSpec {
  RoadProfile::Kind kind = RoadProfile::Kind::three_section;
  double constant_theta = 0.0;
  std::vector<std::pair<double, double>> knots;  ///< for kind == custom
  double rate_bound = 0.02;
};

/// Complete description of one experiment; every field has a default
/// matching the standard graded-road cruise-control study.
struct ExperimentConfig {
  std::string controller = "dopcbf";  ///< "cbf" | "docbf" | "dopcbf"
  RoadSpec road;
  AccParams acc;
  AccFilterParams filter;
  SimConfig sim;
  double D0 = 70.0;
  double v0 = 20.0;
  double metrics_skip = 5.0;  ///< head seconds excluded from RMS(du/dt)
  std::uint64_t seed = 42;
  std::string output_dir = "out";
};

/// Parses and fully validates a config. Unknown fields, type mismatches,
/// and semantic violations raise ConfigError naming the field path.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);

/// Serializes the resolved configuration (defaults filled in, output_dir
/// omitted so artifacts stay byte-identical across output locations).
std::string config_to_json_text(const ExperimentConfig& cfg);

/// Materializes the road profile for one run.
RoadProfile resolve_road(const RoadSpec& spec, std::uint64_t seed, double t_end);

struct RunArtifacts {
  Trajectory traj;
  RunReport report;
  RoadProfile road;
};

/// One closed-loop run of the configured controller. A supplied road
/// overrides the config's road spec (used by batch pairing).
RunArtifacts run_single(const ExperimentConfig& cfg,
                        const std::optional<RoadProfile>& road_override = {});

/// Subcommand bodies shared by the CLI. Each writes its artifacts under
/// cfg.output_dir and returns a process exit code: 0 success, 1 run failure.
/// Configuration problems throw ConfigError (the CLI maps them to exit 2).
int cmd_simulate(const ExperimentConfig& cfg);
int cmd_batch(const ExperimentConfig& cfg, int n_runs);
int cmd_sweep_sigma(const ExperimentConfig& cfg, const std::vector<double>& sigmas);

}  // namespace dopcbf
