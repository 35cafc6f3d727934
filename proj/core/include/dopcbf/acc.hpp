#pragma once

#include <Eigen/Dense>
#include <optional>

#include "dopcbf/filter.hpp"
#include "dopcbf/integrate.hpp"
#include "dopcbf/observer.hpp"
#include "dopcbf/plant.hpp"

namespace dopcbf {

/// Adaptive-cruise-control plant on a graded road. State x = [D, v] with D
/// the gap to the lead vehicle and v the ego speed:
///   D_dot = v_l - v,      v_dot = (u - c v^2) / M + d,
/// where d = -g sin(theta) is the along-road gravity acceleration
/// (theta > 0 uphill, so an incline decelerates the car). The
/// raw_gravity_channel flag instead routes d = +g sin(theta) through a 1/M
/// channel, which makes grade effects negligible; it exists for comparison.
struct AccParams {
  double M = 1650.0;    ///< vehicle mass (kg)
  double c = 0.99428;   ///< aerodynamic drag coefficient (N s^2 / m^2)
  double T = 2.0;       ///< headway time (s)
  double mu = 0.8;      ///< tire-road friction coefficient
  double g = 9.81;      ///< gravity (m/s^2)
  double v_l = 20.0;    ///< lead vehicle speed (m/s)
  double v_r = 25.0;    ///< cruise speed target (m/s)
  double theta_dm = 0.2;  ///< worst-case decline magnitude for the static barrier
  bool raw_gravity_channel = false;

  void validate() const;
};

/// True disturbance for grade theta under the configured channel convention.
double grade_disturbance(double theta, const AccParams& p);

/// Grade angle recovered from a disturbance estimate (inverse of
/// grade_disturbance, with d_hat/g clamped into asin's domain).
double grade_from_disturbance(double d_hat, const AccParams& p);

/// Plant right-hand side at true grade theta.
Eigen::Vector2d vehicle_rhs(const StateVec& x, double u, double theta,
                            const AccParams& p);

/// Grade-aware braking distance v^2 / (2 (mu + sin(theta_hat)) g).
/// Requires v >= 0 and mu + sin(theta_hat) > 0.05 (otherwise the model is
/// degenerate: the estimated decline exhausts the available friction).
double braking_distance(double v, double theta_hat, const AccParams& p);
double braking_distance_dv(double v, double theta_hat, const AccParams& p);
double braking_distance_dtheta(double v, double theta_hat, const AccParams& p);

/// Distance-headway barrier at the estimated grade:
///   h = D - braking_distance(v, theta_hat) - T v.
double h_dop_acc(const StateVec& x, double theta_hat, const AccParams& p);

/// Analytic gradient of h_dop_acc in (D, v, theta_hat).
Eigen::Vector3d h_dop_acc_gradient(const StateVec& x, double theta_hat,
                                   const AccParams& p);

/// Static worst-case barrier sized for the steepest decline theta_dm:
///   h = D - v^2 / (2 g (mu - sin(theta_dm))) - T v.
double h_docbf_baseline(const StateVec& x, const AccParams& p);

AffinePlant make_acc_plant(const AccParams& p);

/// Box the observer rate constant and gradient checks are certified over.
StateBox make_acc_state_box();

ObserverConfig make_acc_observer(const AccParams& p, const Eigen::RowVector2d& Lr,
                                 double nu, double omega, AlphaDRule rule);

/// Barrier parameterized by the disturbance estimate: h is the flat-road
/// barrier and delta(x, d_hat) shifts the braking distance to the estimated
/// grade (delta(x, 0) = 0).
BarrierSpec make_acc_dop_barrier(const AccParams& p, double alpha);

/// Worst-case static barrier with delta = 0 (the estimate enters the row
/// only as feedforward).
BarrierSpec make_acc_docbf_barrier(const AccParams& p, double alpha);

/// Flat-road barrier with delta = 0, for the disturbance-blind controller.
BarrierSpec make_acc_regular_barrier(const AccParams& p, double alpha);

/// Speed-tracking CLF V = (v - v_r)^2.
ClfSpec make_acc_clf(const AccParams& p, double gamma);

/// Filter configuration shared by the three ACC controllers.
struct AccFilterParams {
  double alpha = 1.0;   ///< barrier-condition slope
  double sigma = 1.0;   ///< observer-energy weight in the robustified barrier
  double nu = 1.0;
  double omega = 0.0;   ///< disturbance-rate bound inside iota
  double gamma = 0.006; ///< CLF decay rate
  double w_s = 100.0;   ///< slack weight
  std::optional<double> w_u;  ///< control weight; defaults to 1/M^2
  Eigen::RowVector2d Lr{3.0, 3.0};
  AlphaDRule alpha_d_rule = AlphaDRule::derivation;
};

/// Three ready-to-simulate controllers over one shared plant/observer pair:
///  - regular_cbf: flat-road barrier, no disturbance information;
///  - docbf:       static worst-case barrier with estimate feedforward;
///  - dopcbf:      estimate-parameterized barrier with the iota margin.
/// The probe records (h_dhat, h_dhat - sigma V_e) with V_e from the true
/// estimation error.
struct AccControllers {
  Controller regular_cbf;
  Controller docbf;
  Controller dopcbf;
  BarrierProbe probe;
  AffinePlant plant;
  ObserverConfig observer;
  StateBox box;
  double alpha_d = 0.0;
};

AccControllers build_acc_controllers(const AccParams& acc, const AccFilterParams& filt);

}  // namespace dopcbf
