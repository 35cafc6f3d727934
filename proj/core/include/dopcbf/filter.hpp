#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "dopcbf/observer.hpp"
#include "dopcbf/plant.hpp"
#include "dopcbf/qp.hpp"

namespace dopcbf {

/// Disturbance-parameterized barrier
///   h_dhat(x, d_hat) = h(x) + delta(x, d_hat),   delta(x, 0) = 0,
/// with analytic gradients. alpha is the class-K slope of the barrier
/// condition; configurations must keep 2 alpha_d > alpha > 0.
struct BarrierSpec {
  std::function<double(const StateVec&)> h;
  std::function<Eigen::VectorXd(const StateVec&)> grad_h;
  std::function<double(const StateVec&, const Eigen::VectorXd&)> delta;
  std::function<Eigen::VectorXd(const StateVec&, const Eigen::VectorXd&)> grad_delta_x;
  std::function<Eigen::VectorXd(const StateVec&, const Eigen::VectorXd&)> grad_delta_d;
  double alpha = 1.0;
};

/// Parameters of the observer-error mitigation term iota.
struct RobustnessParams {
  double sigma = 1.0;    ///< weight of V_e in the robustified barrier
  double omega = 0.0;    ///< disturbance-rate bound used inside iota
  double nu = 1.0;       ///< Young-inequality parameter
  double alpha_d = 1.0;  ///< observer error decay constant
};

/// Control Lyapunov function with exponential decay rate gamma.
struct ClfSpec {
  std::function<double(const StateVec&)> V;
  std::function<Eigen::VectorXd(const StateVec&)> grad_V;
  double gamma = 0.006;
};

/// One linear inequality on the decision vector [u; s]:
///   coeff_u' u + coeff_slack * s <= bound.
struct ConstraintRow {
  Eigen::VectorXd coeff_u;
  double coeff_slack = 0.0;
  double bound = 0.0;
};

/// Slack-relaxed CLF decrease condition with disturbance feedforward:
///   Lg1V u - s <= -gamma V - LfV - Lg2V d_hat.
ConstraintRow clf_row(const ClfSpec& clf, const AffinePlant& plant,
                      const StateVec& x, const Eigen::VectorXd& d_hat);

/// Plain CBF condition ignoring the disturbance channel:
///   -Lg1h u <= Lfh + alpha h.
ConstraintRow cbf_row_regular(const BarrierSpec& spec, const AffinePlant& plant,
                              const StateVec& x);

/// Observer-error mitigation term
///   iota = ||q||^2 / (4 (sigma alpha_d - sigma alpha / 2)) + sigma omega^2 / (2 nu),
/// with q = Lg2 h_dhat + (d delta / d d_hat)' l(x) g2(x).
/// Requires sigma alpha_d - sigma alpha / 2 > 0.
double iota(const BarrierSpec& spec, const RobustnessParams& rp,
            const AffinePlant& plant, const ObserverConfig& obs,
            const StateVec& x, const Eigen::VectorXd& d_hat);

/// Hard barrier condition on the parameterized barrier with estimate
/// feedforward and the iota margin:
///   -Lg1 h_dhat u <= Lf h_dhat + Lg2 h_dhat d_hat + alpha h_dhat - iota.
/// With delta constant in d_hat this reduces exactly to the
/// disturbance-observer CBF row on h + delta.
ConstraintRow dopcbf_row(const BarrierSpec& spec, const RobustnessParams& rp,
                         const AffinePlant& plant, const ObserverConfig& obs,
                         const StateVec& x, const Eigen::VectorXd& d_hat);

/// Stacks rows into min 0.5 |u - u_ref|^2_{w_u} + 0.5 w_s s^2 over z = [u; s],
/// appending s >= 0. Tracking rows keep their slack coefficient; barrier rows
/// stay hard.
QpProblem assemble_qp(const std::vector<ConstraintRow>& rows,
                      const Eigen::VectorXd& u_ref, double w_u, double w_s);

}  // namespace dopcbf
