#include "dopcbf/metrics.hpp"

#include <cmath>
#include <iostream>

namespace dopcbf {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

}  // namespace

double rms_control_rate(const std::vector<Eigen::VectorXd>& u_series, double dt,
                        double skip) {
  require(dt > 0.0, "rms_control_rate: dt must be positive");
  require(skip >= 0.0, "rms_control_rate: skip must be nonnegative");

  const std::size_t n = u_series.size();
  std::size_t first = static_cast<std::size_t>(std::ceil(skip / dt - 1e-12));
  require(n >= first + 3, "rms_control_rate: need at least 3 samples after skip");

  double sum_sq = 0.0;
  std::size_t count = 0;
  for (std::size_t i = first; i + 1 < n; ++i) {
    double rate = (u_series[i + 1] - u_series[i]).norm() / dt;
    sum_sq += rate * rate;
    ++count;
  }
  return std::sqrt(sum_sq / static_cast<double>(count));
}

BarrierScan min_barrier(const Trajectory& traj, BarrierSeries which) {
  require(traj.size() > 0, "min_barrier: trajectory is empty");
  const std::vector<double>& series =
      which == BarrierSeries::h ? traj.barrier_h : traj.barrier_hde;
  require(series.size() == traj.size(), "min_barrier: series length mismatch");

  BarrierScan scan;
  scan.min_value = series[0];
  scan.argmin_time = traj.times[0];
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series[i] < scan.min_value) {
      scan.min_value = series[i];
      scan.argmin_time = traj.times[i];
    }
    if (series[i] < 0.0 && !scan.first_violation_time)
      scan.first_violation_time = traj.times[i];
  }
  return scan;
}

RunReport make_run_report(const Trajectory& traj, double skip) {
  require(traj.size() >= 2, "make_run_report: need at least 2 samples");
  double dt = traj.times[1] - traj.times[0];

  std::vector<Eigen::VectorXd> u_series;
  u_series.reserve(traj.size());
  for (const ControlSample& s : traj.controls) u_series.push_back(s.u);

  RunReport report;
  report.rms_du = rms_control_rate(u_series, dt, skip);
  BarrierScan h_scan = min_barrier(traj, BarrierSeries::h);
  BarrierScan hde_scan = min_barrier(traj, BarrierSeries::h_de);
  report.min_h = h_scan.min_value;
  report.min_hde = hde_scan.min_value;
  report.violation = h_scan.min_value < 0.0;
  report.violation_time = h_scan.first_violation_time;
  report.qp_failures = static_cast<int>(traj.qp_failures.size());
  return report;
}

BatchSummary compare_batch(const std::vector<RunReport>& a,
                           const std::vector<RunReport>& b) {
  require(!a.empty(), "compare_batch: empty run lists");
  require(a.size() == b.size(), "compare_batch: run lists must be aligned");

  BatchSummary out;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].violation) ++out.violations_a;
    if (b[i].violation) ++out.violations_b;
    if (a[i].rms_du == 0.0) {
      std::cerr << "compare_batch: baseline RMS is zero for pair " << i
                << "; skipping\n";
      ++out.pairs_skipped;
      continue;
    }
    double improvement = (a[i].rms_du - b[i].rms_du) / a[i].rms_du * 100.0;
    if (out.pairs_compared == 0) {
      out.max_improvement_pct = improvement;
      out.min_improvement_pct = improvement;
    } else {
      out.max_improvement_pct = std::max(out.max_improvement_pct, improvement);
      out.min_improvement_pct = std::min(out.min_improvement_pct, improvement);
    }
    sum += improvement;
    if (improvement > 0.0) out.win_rate += 1.0;
    ++out.pairs_compared;
  }
  if (out.pairs_compared > 0) {
    out.mean_improvement_pct = sum / out.pairs_compared;
    out.win_rate /= out.pairs_compared;
  }
  return out;
}

}  // namespace dopcbf
