#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>

namespace dopcbf {

/// State vector of a plant; length must equal the plant's n_x.
using StateVec = Eigen::VectorXd;

/// Thrown when a caller breaks a documented precondition (dimension
/// mismatch, invalid parameter, inconsistent configuration).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an estimated road grade leaves the region where the
/// braking-distance model is well posed.
class DegenerateGrade : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One controller decision: the command held over [t, t + dt_ctrl) and the
/// slack the QP assigned to the tracking constraint.
struct ControlSample {
  double t = 0.0;
  Eigen::VectorXd u;
  double slack = 0.0;
};

/// Control-affine plant with a matched/unmatched disturbance channel:
///   x_dot = f(x) + g1(x) u + g2(x) d
/// The callables must be deterministic and locally Lipschitz in x.
struct AffinePlant {
  int n_x = 0;
  int n_u = 0;
  int n_d = 0;
  std::function<Eigen::VectorXd(const StateVec&)> f;
  std::function<Eigen::MatrixXd(const StateVec&)> g1;
  std::function<Eigen::MatrixXd(const StateVec&)> g2;
};

/// Axis-aligned box of states, used for sampling-based configuration checks.
struct StateBox {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

/// Evaluates x_dot = f(x) + g1(x) u + g2(x) d, checking every dimension.
Eigen::VectorXd eval_affine_dynamics(const AffinePlant& plant, const StateVec& x,
                                     const Eigen::VectorXd& u,
                                     const Eigen::VectorXd& d);

}  // namespace dopcbf
