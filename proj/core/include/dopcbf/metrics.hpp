#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "dopcbf/integrate.hpp"

namespace dopcbf {

/// Root-mean-square of the forward-difference du/dt over a uniformly sampled
/// control series, ignoring samples before `skip` seconds (startup
/// transient). Requires at least 3 samples at or after skip.
double rms_control_rate(const std::vector<Eigen::VectorXd>& u_series, double dt,
                        double skip);

enum class BarrierSeries { h, h_de };

struct BarrierScan {
  double min_value = 0.0;
  double argmin_time = 0.0;
  std::optional<double> first_violation_time;  ///< first sample with value < 0
};

BarrierScan min_barrier(const Trajectory& traj, BarrierSeries which);

/// Per-run results distilled from one trajectory.
struct RunReport {
  double rms_du = 0.0;
  double min_h = 0.0;
  double min_hde = 0.0;
  bool violation = false;
  std::optional<double> violation_time;
  int qp_failures = 0;
};

RunReport make_run_report(const Trajectory& traj, double skip = 5.0);

/// Paired-comparison statistics; improvements are percentages of the
/// baseline RMS: (rms_a - rms_b) / rms_a * 100.
struct BatchSummary {
  double mean_improvement_pct = 0.0;
  double max_improvement_pct = 0.0;
  double min_improvement_pct = 0.0;
  double win_rate = 0.0;  ///< fraction of compared pairs with improvement > 0
  int pairs_compared = 0;
  int pairs_skipped = 0;  ///< pairs dropped because the baseline RMS was zero
  int violations_a = 0;
  int violations_b = 0;
};

/// Compares aligned run lists (a = baseline, b = candidate); pairs whose
/// baseline RMS is exactly zero are skipped with a warning on stderr.
BatchSummary compare_batch(const std::vector<RunReport>& a,
                           const std::vector<RunReport>& b);

}  // namespace dopcbf
