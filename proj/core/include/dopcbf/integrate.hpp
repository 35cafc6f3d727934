#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dopcbf/observer.hpp"
#include "dopcbf/plant.hpp"

namespace dopcbf {

/// Closed-loop timing: the controller runs every dt_ctrl with the command
/// held (zero-order hold) while the plant and observer are integrated with
/// fixed RK4 steps of dt_int. dt_int must divide dt_ctrl, and dt_ctrl must
/// divide t_end.
struct SimConfig {
  double t_end = 100.0;
  double dt_ctrl = 0.01;
  double dt_int = 0.001;
  int record_every = 1;  ///< record one sample every this many controller ticks

  void validate() const;
};

/// One controller invocation result. When the controller's QP has no
/// solution it reports feasible = false along with a fallback command; the
/// simulator records the failure and continues.
struct ControlDecision {
  Eigen::VectorXd u;
  double slack = 0.0;
  bool feasible = true;
  std::string message;
};

using Controller =
    std::function<ControlDecision(double t, const StateVec& x, const ObserverState& obs)>;
using DisturbanceFn = std::function<Eigen::VectorXd(double t)>;

/// Optional per-sample probe returning the pair (h, h_de) recorded in the
/// trajectory's barrier series.
using BarrierProbe = std::function<std::pair<double, double>(
    double t, const StateVec& x, const ObserverState& obs, const Eigen::VectorXd& d_true)>;

struct QpFailureRecord {
  double t = 0.0;
  std::string message;
};

/// Sampled closed-loop run. All series share one length; samples sit at
/// controller tick times (every record_every ticks) plus the final time.
struct Trajectory {
  std::vector<double> times;
  std::vector<StateVec> states;
  std::vector<ControlSample> controls;
  std::vector<Eigen::VectorXd> disturbances;  ///< true d(t)
  std::vector<Eigen::VectorXd> estimates;     ///< d_hat(t)
  std::vector<double> barrier_h;
  std::vector<double> barrier_hde;
  std::vector<QpFailureRecord> qp_failures;

  std::size_t size() const { return times.size(); }
};

/// Raised when the state stops being finite; the message carries the time.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t_at)
      : std::runtime_error(what), t(t_at) {}
  double t = 0.0;
};

/// One classical Runge-Kutta step of x_dot = deriv(t, x).
StateVec rk4_step(const std::function<Eigen::VectorXd(double, const StateVec&)>& deriv,
                  double t, const StateVec& x, double dt);

/// Closed-loop simulation of plant + disturbance observer. The observer
/// starts at z = -p(x0) so the initial estimate is zero; its estimate is
/// refreshed as z + p(x) before every controller call and every recording.
Trajectory simulate(const AffinePlant& plant, const Controller& controller,
                    const ObserverConfig& obs, const DisturbanceFn& disturbance,
                    const StateVec& x0, const SimConfig& cfg,
                    const BarrierProbe& probe = {});

}  // namespace dopcbf
