#pragma once

#include <Eigen/Dense>
#include <functional>

#include "dopcbf/plant.hpp"

namespace dopcbf {

/// Which convergence-rate constant the toolkit derives from (l, g2, nu).
/// `derivation` is the Lyapunov-consistent rule alpha_d = inf_x l g2 - nu/2;
/// `one_minus_quarter_nu` (alpha_d = 1 - nu/4) reproduces a published variant
/// and is available for comparison only.
enum class AlphaDRule { derivation, one_minus_quarter_nu };

/// Disturbance observer
///   z_dot = -l(x) (f(x) + g1(x) u + g2(x) d_hat),   d_hat = z + p(x),
/// with l(x) the Jacobian of the user-supplied p(x). The estimation error
/// e = d - d_hat then obeys e_dot = d_dot - l(x) g2(x) e.
struct ObserverConfig {
  std::function<Eigen::VectorXd(const StateVec&)> p;  ///< n_d values
  std::function<Eigen::MatrixXd(const StateVec&)> l;  ///< n_d x n_x Jacobian of p
  double omega = 0.0;  ///< bound on ||d_dot|| used by the error envelope
  double nu = 1.0;     ///< Young-inequality parameter, 0 < nu < 4 inf l g2
  AlphaDRule alpha_d_rule = AlphaDRule::derivation;
  StateBox state_box;  ///< box the rate constant is certified over
};

/// Internal observer state plus the refreshed estimate d_hat = z + p(x).
struct ObserverState {
  Eigen::VectorXd z;
  Eigen::VectorXd d_hat;
};

/// Right-hand side of the observer internal state z.
Eigen::VectorXd observer_rhs(const ObserverConfig& cfg, const AffinePlant& plant,
                             const StateVec& x, const Eigen::VectorXd& u,
                             const Eigen::VectorXd& z);

/// Smallest eigenvalue of sym(l(x) g2(x)) over a grid on the box
/// (pts_per_dim points per dimension). Scalar l g2 reduces to its minimum.
double inf_lg2(const ObserverConfig& cfg, const AffinePlant& plant,
               const StateBox& box, int pts_per_dim = 50);

/// Error-energy decay constant per cfg.alpha_d_rule.
double alpha_d(const ObserverConfig& cfg, const AffinePlant& plant,
               const StateBox& box);

/// Validates nu and the rate constant on the box; throws ContractViolation.
void check_observer_config(const ObserverConfig& cfg, const AffinePlant& plant,
                           const StateBox& box);

/// Upper bound on V_e(t) = 0.5 ||e||^2 given V_e(0) = Ve0:
/// the comparison-lemma solution toward the asymptote omega^2 / (4 nu a_d),
/// or the asymptote itself when Ve0 already sits below it.
double envelope(double Ve0, double t, double alpha_d_value, double omega,
                double nu);

/// Convenience overload using cfg.{omega, nu, state_box}.
double envelope(const ObserverConfig& cfg, const AffinePlant& plant, double Ve0,
                double t);

struct GradeEstimate {
  double theta_hat = 0.0;  ///< rad, in [-pi/2, pi/2]
  double d_hat = 0.0;      ///< m/s^2, along-road gravity acceleration estimate
};

/// Converts the raw observer output for the road-grade channel
/// (d = -g sin(theta), theta > 0 uphill) into a grade angle:
/// d_hat = xi + Lr x, theta_hat = -asin(clamp(d_hat / g, -1, 1)).
GradeEstimate road_grade_estimate(const Eigen::VectorXd& xi, const StateVec& x,
                                  const Eigen::RowVectorXd& Lr, double g);

}  // namespace dopcbf
