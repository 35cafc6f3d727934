#include "dopcbf/observer.hpp"

#include <algorithm>
#include <cmath>

namespace dopcbf {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

}  // namespace

Eigen::VectorXd observer_rhs(const ObserverConfig& cfg, const AffinePlant& plant,
                             const StateVec& x, const Eigen::VectorXd& u,
                             const Eigen::VectorXd& z) {
  require(static_cast<bool>(cfg.p) && static_cast<bool>(cfg.l),
          "observer: p and l must be set");
  require(z.size() == plant.n_d, "observer: z has length " +
                                     std::to_string(z.size()) + ", expected n_d = " +
                                     std::to_string(plant.n_d));
  Eigen::VectorXd px = cfg.p(x);
  require(px.size() == plant.n_d, "observer: p(x) returned wrong length");
  Eigen::VectorXd d_hat = z + px;
  Eigen::MatrixXd lx = cfg.l(x);
  require(lx.rows() == plant.n_d && lx.cols() == plant.n_x,
          "observer: l(x) returned wrong shape");
  return -lx * eval_affine_dynamics(plant, x, u, d_hat);
}

double inf_lg2(const ObserverConfig& cfg, const AffinePlant& plant,
               const StateBox& box, int pts_per_dim) {
  require(box.lo.size() == plant.n_x && box.hi.size() == plant.n_x,
          "observer: state box must match n_x");
  require((box.hi - box.lo).minCoeff() >= 0.0, "observer: box must have lo <= hi");
  require(pts_per_dim >= 2, "observer: need at least 2 grid points per dimension");

  const int n = plant.n_x;
  long total = 1;
  for (int i = 0; i < n; ++i) total *= pts_per_dim;

  double worst = std::numeric_limits<double>::infinity();
  StateVec x(n);
  for (long flat = 0; flat < total; ++flat) {
    long rem = flat;
    for (int i = 0; i < n; ++i) {
      int k = static_cast<int>(rem % pts_per_dim);
      rem /= pts_per_dim;
      x(i) = box.lo(i) + (box.hi(i) - box.lo(i)) * k / (pts_per_dim - 1);
    }
    Eigen::MatrixXd prod = cfg.l(x) * plant.g2(x);  // n_d x n_d
    Eigen::MatrixXd sym = 0.5 * (prod + prod.transpose());
    double lam_min = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym)
                         .eigenvalues()
                         .minCoeff();
    worst = std::min(worst, lam_min);
  }
  return worst;
}

double alpha_d(const ObserverConfig& cfg, const AffinePlant& plant,
               const StateBox& box) {
  switch (cfg.alpha_d_rule) {
    case AlphaDRule::one_minus_quarter_nu:
      return 1.0 - cfg.nu / 4.0;
    case AlphaDRule::derivation:
    default:
      return inf_lg2(cfg, plant, box) - cfg.nu / 2.0;
  }
}

void check_observer_config(const ObserverConfig& cfg, const AffinePlant& plant,
                           const StateBox& box) {
  require(cfg.nu > 0.0, "observer: nu must be positive");
  double inf_rate = inf_lg2(cfg, plant, box);
  require(cfg.nu < 4.0 * inf_rate,
          "observer: nu must be below 4 inf(l g2) = " + std::to_string(4.0 * inf_rate));
  double ad = alpha_d(cfg, plant, box);
  require(ad > 0.0, "observer: alpha_d must be positive on the state box, got " +
                        std::to_string(ad));
}

double envelope(double Ve0, double t, double alpha_d_value, double omega,
                double nu) {
  require(Ve0 >= 0.0, "envelope: Ve0 must be nonnegative");
  require(t >= 0.0, "envelope: t must be nonnegative");
  require(nu > 0.0, "envelope: nu must be positive");
  require(alpha_d_value > 0.0, "envelope: alpha_d must be positive");
  double asymptote = omega * omega / (4.0 * nu * alpha_d_value);
  if (Ve0 <= asymptote) return asymptote;
  return (Ve0 - asymptote) * std::exp(-2.0 * alpha_d_value * t) + asymptote;
}

double envelope(const ObserverConfig& cfg, const AffinePlant& plant, double Ve0,
                double t) {
  return envelope(Ve0, t, alpha_d(cfg, plant, cfg.state_box), cfg.omega, cfg.nu);
}

GradeEstimate road_grade_estimate(const Eigen::VectorXd& xi, const StateVec& x,
                                  const Eigen::RowVectorXd& Lr, double g) {
  require(g > 0.0, "road_grade_estimate: g must be positive");
  require(xi.size() == 1, "road_grade_estimate: grade channel is scalar");
  require(Lr.size() == x.size(), "road_grade_estimate: Lr/x length mismatch");
  GradeEstimate est;
  est.d_hat = xi(0) + Lr.dot(x);
  est.theta_hat = -std::asin(std::clamp(est.d_hat / g, -1.0, 1.0));
  return est;
}

}  // namespace dopcbf
