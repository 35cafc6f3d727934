#include "dopcbf/filter.hpp"

#include <cmath>

namespace dopcbf {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

}  // namespace

ConstraintRow clf_row(const ClfSpec& clf, const AffinePlant& plant,
                      const StateVec& x, const Eigen::VectorXd& d_hat) {
  require(static_cast<bool>(clf.V) && static_cast<bool>(clf.grad_V),
          "clf_row: V and grad_V must be set");
  require(clf.gamma > 0.0, "clf_row: gamma must be positive");
  require(x.size() == plant.n_x, "clf_row: x/n_x mismatch");
  require(d_hat.size() == plant.n_d, "clf_row: d_hat/n_d mismatch");

  Eigen::VectorXd grad = clf.grad_V(x);
  require(grad.size() == plant.n_x, "clf_row: grad_V returned wrong length");

  double LfV = grad.dot(plant.f(x));
  Eigen::VectorXd Lg1V = plant.g1(x).transpose() * grad;
  double Lg2V_d = (plant.g2(x).transpose() * grad).dot(d_hat);

  ConstraintRow row;
  row.coeff_u = Lg1V;
  row.coeff_slack = -1.0;
  row.bound = -clf.gamma * clf.V(x) - LfV - Lg2V_d;
  return row;
}

ConstraintRow cbf_row_regular(const BarrierSpec& spec, const AffinePlant& plant,
                              const StateVec& x) {
  require(static_cast<bool>(spec.h) && static_cast<bool>(spec.grad_h),
          "cbf_row_regular: h and grad_h must be set");
  require(spec.alpha > 0.0, "cbf_row_regular: alpha must be positive");
  require(x.size() == plant.n_x, "cbf_row_regular: x/n_x mismatch");

  Eigen::VectorXd grad = spec.grad_h(x);
  double Lfh = grad.dot(plant.f(x));
  Eigen::VectorXd Lg1h = plant.g1(x).transpose() * grad;

  ConstraintRow row;
  row.coeff_u = -Lg1h;
  row.coeff_slack = 0.0;
  row.bound = Lfh + spec.alpha * spec.h(x);
  return row;
}

double iota(const BarrierSpec& spec, const RobustnessParams& rp,
            const AffinePlant& plant, const ObserverConfig& obs,
            const StateVec& x, const Eigen::VectorXd& d_hat) {
  require(rp.sigma > 0.0, "iota: sigma must be positive");
  require(rp.nu > 0.0, "iota: nu must be positive");
  require(rp.omega >= 0.0, "iota: omega must be nonnegative");
  double denom = rp.sigma * rp.alpha_d - rp.sigma * spec.alpha / 2.0;
  require(denom > 0.0,
          "iota: sigma (alpha_d - alpha/2) must be positive; requires "
          "2 alpha_d > alpha");

  Eigen::VectorXd grad_hd = spec.grad_h(x) + spec.grad_delta_x(x, d_hat);
  Eigen::RowVectorXd Lg2h = grad_hd.transpose() * plant.g2(x);  // 1 x n_d
  Eigen::RowVectorXd q =
      Lg2h + spec.grad_delta_d(x, d_hat).transpose() * (obs.l(x) * plant.g2(x));

  return q.squaredNorm() / (4.0 * denom) +
         rp.sigma * rp.omega * rp.omega / (2.0 * rp.nu);
}

ConstraintRow dopcbf_row(const BarrierSpec& spec, const RobustnessParams& rp,
                         const AffinePlant& plant, const ObserverConfig& obs,
                         const StateVec& x, const Eigen::VectorXd& d_hat) {
  require(static_cast<bool>(spec.h) && static_cast<bool>(spec.grad_h) &&
              static_cast<bool>(spec.delta) &&
              static_cast<bool>(spec.grad_delta_x) &&
              static_cast<bool>(spec.grad_delta_d),
          "dopcbf_row: barrier spec must be fully populated");
  require(2.0 * rp.alpha_d > spec.alpha && spec.alpha > 0.0,
          "dopcbf_row: requires 2 alpha_d > alpha > 0");
  require(x.size() == plant.n_x, "dopcbf_row: x/n_x mismatch");
  require(d_hat.size() == plant.n_d, "dopcbf_row: d_hat/n_d mismatch");

  double h_d = spec.h(x) + spec.delta(x, d_hat);
  Eigen::VectorXd grad_hd = spec.grad_h(x) + spec.grad_delta_x(x, d_hat);

  double Lfh = grad_hd.dot(plant.f(x));
  Eigen::VectorXd Lg1h = plant.g1(x).transpose() * grad_hd;
  double Lg2h_d = (plant.g2(x).transpose() * grad_hd).dot(d_hat);

  ConstraintRow row;
  row.coeff_u = -Lg1h;
  row.coeff_slack = 0.0;
  row.bound = Lfh + Lg2h_d + spec.alpha * h_d - iota(spec, rp, plant, obs, x, d_hat);
  return row;
}

QpProblem assemble_qp(const std::vector<ConstraintRow>& rows,
                      const Eigen::VectorXd& u_ref, double w_u, double w_s) {
  require(u_ref.size() >= 1, "assemble_qp: u_ref must be nonempty");
  require(w_u > 0.0, "assemble_qp: w_u must be positive");
  require(w_s > 0.0, "assemble_qp: w_s must be positive");

  const int n_u = static_cast<int>(u_ref.size());
  const int n_z = n_u + 1;
  const int m = static_cast<int>(rows.size()) + 1;

  QpProblem p;
  p.H = Eigen::MatrixXd::Zero(n_z, n_z);
  p.H.topLeftCorner(n_u, n_u) = w_u * Eigen::MatrixXd::Identity(n_u, n_u);
  p.H(n_u, n_u) = w_s;
  p.f = Eigen::VectorXd::Zero(n_z);
  p.f.head(n_u) = -w_u * u_ref;

  p.G = Eigen::MatrixXd::Zero(m, n_z);
  p.e = Eigen::VectorXd::Zero(m);
  for (size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].coeff_u.size() == n_u, "assemble_qp: row " + std::to_string(i) +
                                               " has wrong control dimension");
    p.G.block(i, 0, 1, n_u) = rows[i].coeff_u.transpose();
    p.G(i, n_u) = rows[i].coeff_slack;
    p.e(i) = rows[i].bound;
  }
  p.G(m - 1, n_u) = -1.0;  // s >= 0
  p.e(m - 1) = 0.0;
  return p;
}

}  // namespace dopcbf
