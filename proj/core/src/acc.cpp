#include "dopcbf/acc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>

namespace dopcbf {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

/// Zero-order-hold braking can overshoot standstill by a fraction of a tick;
/// the model treats the car as stopped there (brakes hold, no reversing).
void warn_speed_clamped() {
  static std::atomic<bool> warned{false};
  if (!warned.exchange(true)) {
    std::fprintf(stderr, "warning: ego speed clamped at 0 (braking overshoot)\n");
  }
}

constexpr double kGradeGuard = 0.05;  // minimum mu + sin(theta_hat)

/// Channel sign: the estimate enters the braking distance as
/// mu g + s * d_hat with s = -1 for d = -g sin(theta) (default) and s = +1
/// for the literal +g sin(theta) channel.
double channel_sign(const AccParams& p) { return p.raw_gravity_channel ? 1.0 : -1.0; }

/// Effective mu*g at the estimated grade, with d_hat clamped to the asin
/// domain so it agrees with braking_distance(v, grade_from_disturbance(d)).
double mu_g_eff(double d_hat, const AccParams& p) {
  double d_c = std::clamp(d_hat, -p.g, p.g);
  return p.mu * p.g + channel_sign(p) * d_c;
}

}  // namespace

void AccParams::validate() const {
  require(M > 0.0, "acc.M must be positive");
  require(T > 0.0, "acc.T must be positive");
  require(g > 0.0, "acc.g must be positive");
  require(c >= 0.0, "acc.c must be nonnegative");
  require(mu > 0.0 && mu <= 1.5, "acc.mu must lie in (0, 1.5]");
  require(theta_dm >= 0.0, "acc.theta_dm must be nonnegative");
  require(mu - std::sin(theta_dm) > 0.0,
          "acc.theta_dm too steep: mu - sin(theta_dm) must be positive");
  require(v_l >= 0.0, "acc.v_l must be nonnegative");
  require(v_r >= 0.0, "acc.v_r must be nonnegative");
}

double grade_disturbance(double theta, const AccParams& p) {
  return channel_sign(p) < 0 ? -p.g * std::sin(theta) : p.g * std::sin(theta);
}

double grade_from_disturbance(double d_hat, const AccParams& p) {
  double ratio = std::clamp(d_hat / p.g, -1.0, 1.0);
  return channel_sign(p) < 0 ? -std::asin(ratio) : std::asin(ratio);
}

Eigen::Vector2d vehicle_rhs(const StateVec& x, double u, double theta,
                            const AccParams& p) {
  require(x.size() == 2, "vehicle_rhs: state must be [D, v]");
  require(x.allFinite() && std::isfinite(u) && std::isfinite(theta),
          "vehicle_rhs: non-finite input");
  if (x(1) < 0.0) warn_speed_clamped();
  const double v = std::max(x(1), 0.0);
  const double g2v = p.raw_gravity_channel ? 1.0 / p.M : 1.0;
  Eigen::Vector2d out;
  out(0) = p.v_l - v;
  out(1) = (u - p.c * v * v) / p.M + g2v * grade_disturbance(theta, p);
  if (x(1) <= 0.0 && out(1) < 0.0) out(1) = 0.0;  // brakes hold at standstill
  return out;
}

double braking_distance(double v, double theta_hat, const AccParams& p) {
  require(v >= 0.0, "braking_distance: v must be nonnegative");
  double denom = p.mu + std::sin(theta_hat);
  if (denom <= kGradeGuard)
    throw DegenerateGrade("braking_distance: mu + sin(theta_hat) = " +
                          std::to_string(denom) + " <= " + std::to_string(kGradeGuard));
  return v * v / (2.0 * denom * p.g);
}

double braking_distance_dv(double v, double theta_hat, const AccParams& p) {
  double denom = p.mu + std::sin(theta_hat);
  if (denom <= kGradeGuard) throw DegenerateGrade("braking_distance_dv: degenerate grade");
  return v / (denom * p.g);
}

double braking_distance_dtheta(double v, double theta_hat, const AccParams& p) {
  double denom = p.mu + std::sin(theta_hat);
  if (denom <= kGradeGuard)
    throw DegenerateGrade("braking_distance_dtheta: degenerate grade");
  return -v * v * std::cos(theta_hat) / (2.0 * denom * denom * p.g);
}

double h_dop_acc(const StateVec& x, double theta_hat, const AccParams& p) {
  require(x.size() == 2, "h_dop_acc: state must be [D, v]");
  return x(0) - braking_distance(x(1), theta_hat, p) - p.T * x(1);
}

Eigen::Vector3d h_dop_acc_gradient(const StateVec& x, double theta_hat,
                                   const AccParams& p) {
  require(x.size() == 2, "h_dop_acc_gradient: state must be [D, v]");
  Eigen::Vector3d grad;
  grad(0) = 1.0;
  grad(1) = -braking_distance_dv(x(1), theta_hat, p) - p.T;
  grad(2) = -braking_distance_dtheta(x(1), theta_hat, p);
  return grad;
}

double h_docbf_baseline(const StateVec& x, const AccParams& p) {
  require(x.size() == 2, "h_docbf_baseline: state must be [D, v]");
  const double v = x(1);
  return x(0) - v * v / (2.0 * p.g * (p.mu - std::sin(p.theta_dm))) - p.T * v;
}

AffinePlant make_acc_plant(const AccParams& p) {
  p.validate();
  AffinePlant plant;
  plant.n_x = 2;
  plant.n_u = 1;
  plant.n_d = 1;
  plant.f = [p](const StateVec& x) {
    const double v = std::max(x(1), 0.0);  // braking overshoot: car is stopped
    Eigen::VectorXd out(2);
    out(0) = p.v_l - v;
    out(1) = -p.c * v * v / p.M;
    return out;
  };
  plant.g1 = [p](const StateVec&) {
    Eigen::MatrixXd out(2, 1);
    out << 0.0, 1.0 / p.M;
    return out;
  };
  const double g2v = p.raw_gravity_channel ? 1.0 / p.M : 1.0;
  plant.g2 = [g2v](const StateVec&) {
    Eigen::MatrixXd out(2, 1);
    out << 0.0, g2v;
    return out;
  };
  return plant;
}

StateBox make_acc_state_box() {
  StateBox box;
  box.lo = Eigen::Vector2d(10.0, 0.0);
  box.hi = Eigen::Vector2d(120.0, 35.0);
  return box;
}

ObserverConfig make_acc_observer(const AccParams& p, const Eigen::RowVector2d& Lr,
                                 double nu, double omega, AlphaDRule rule) {
  p.validate();
  ObserverConfig cfg;
  Eigen::RowVector2d gain = Lr;
  cfg.p = [gain](const StateVec& x) {
    Eigen::VectorXd out(1);
    out(0) = gain * x;
    return out;
  };
  cfg.l = [gain](const StateVec&) -> Eigen::MatrixXd { return gain; };
  cfg.nu = nu;
  cfg.omega = omega;
  cfg.alpha_d_rule = rule;
  cfg.state_box = make_acc_state_box();
  return cfg;
}

BarrierSpec make_acc_dop_barrier(const AccParams& p, double alpha) {
  p.validate();
  const double mu_g = p.mu * p.g;
  const double s = channel_sign(p);
  BarrierSpec spec;
  spec.alpha = alpha;
  spec.h = [p](const StateVec& x) { return h_dop_acc(x, 0.0, p); };
  spec.grad_h = [p, mu_g](const StateVec& x) {
    Eigen::VectorXd grad(2);
    grad(0) = 1.0;
    grad(1) = -x(1) / mu_g - p.T;
    return grad;
  };
  spec.delta = [p, mu_g](const StateVec& x, const Eigen::VectorXd& d_hat) {
    const double v = x(1);
    double eff = mu_g_eff(d_hat(0), p);
    if (eff <= kGradeGuard * p.g)
      throw DegenerateGrade("delta: estimated grade exhausts friction");
    return v * v / (2.0 * mu_g) - v * v / (2.0 * eff);
  };
  spec.grad_delta_x = [p, mu_g](const StateVec& x, const Eigen::VectorXd& d_hat) {
    const double v = x(1);
    double eff = mu_g_eff(d_hat(0), p);
    if (eff <= kGradeGuard * p.g)
      throw DegenerateGrade("grad_delta_x: estimated grade exhausts friction");
    Eigen::VectorXd grad(2);
    grad(0) = 0.0;
    grad(1) = v / mu_g - v / eff;
    return grad;
  };
  spec.grad_delta_d = [p, s](const StateVec& x, const Eigen::VectorXd& d_hat) {
    const double v = x(1);
    Eigen::VectorXd grad(1);
    if (std::abs(d_hat(0)) >= p.g) {
      grad(0) = 0.0;  // asin saturated: the estimate no longer moves theta_hat
      return grad;
    }
    double eff = mu_g_eff(d_hat(0), p);
    if (eff <= kGradeGuard * p.g)
      throw DegenerateGrade("grad_delta_d: estimated grade exhausts friction");
    grad(0) = s * v * v / (2.0 * eff * eff);
    return grad;
  };
  return spec;
}

namespace {

BarrierSpec with_zero_delta(BarrierSpec spec) {
  spec.delta = [](const StateVec&, const Eigen::VectorXd&) { return 0.0; };
  spec.grad_delta_x = [](const StateVec& x, const Eigen::VectorXd&) {
    return Eigen::VectorXd::Zero(x.size()).eval();
  };
  spec.grad_delta_d = [](const StateVec&, const Eigen::VectorXd& d_hat) {
    return Eigen::VectorXd::Zero(d_hat.size()).eval();
  };
  return spec;
}

}  // namespace

BarrierSpec make_acc_docbf_barrier(const AccParams& p, double alpha) {
  p.validate();
  BarrierSpec spec;
  spec.alpha = alpha;
  const double denom = 2.0 * p.g * (p.mu - std::sin(p.theta_dm));
  spec.h = [p](const StateVec& x) { return h_docbf_baseline(x, p); };
  spec.grad_h = [p, denom](const StateVec& x) {
    Eigen::VectorXd grad(2);
    grad(0) = 1.0;
    grad(1) = -2.0 * x(1) / denom - p.T;
    return grad;
  };
  return with_zero_delta(std::move(spec));
}

BarrierSpec make_acc_regular_barrier(const AccParams& p, double alpha) {
  p.validate();
  const double mu_g = p.mu * p.g;
  BarrierSpec spec;
  spec.alpha = alpha;
  spec.h = [p](const StateVec& x) { return h_dop_acc(x, 0.0, p); };
  spec.grad_h = [p, mu_g](const StateVec& x) {
    Eigen::VectorXd grad(2);
    grad(0) = 1.0;
    grad(1) = -x(1) / mu_g - p.T;
    return grad;
  };
  return with_zero_delta(std::move(spec));
}

ClfSpec make_acc_clf(const AccParams& p, double gamma) {
  ClfSpec clf;
  clf.gamma = gamma;
  const double v_r = p.v_r;
  clf.V = [v_r](const StateVec& x) { return (x(1) - v_r) * (x(1) - v_r); };
  clf.grad_V = [v_r](const StateVec& x) {
    Eigen::VectorXd grad(2);
    grad(0) = 0.0;
    grad(1) = 2.0 * (x(1) - v_r);
    return grad;
  };
  return clf;
}

AccControllers build_acc_controllers(const AccParams& acc, const AccFilterParams& filt) {
  acc.validate();
  require(filt.alpha > 0.0, "filter.alpha must be positive");
  require(filt.sigma > 0.0, "filter.sigma must be positive");
  require(filt.gamma > 0.0, "filter.gamma must be positive");
  require(filt.w_s > 0.0, "filter.w_s must be positive");
  if (filt.w_u) require(*filt.w_u > 0.0, "filter.w_u must be positive");

  AccControllers out;
  out.plant = make_acc_plant(acc);
  out.box = make_acc_state_box();
  out.observer =
      make_acc_observer(acc, filt.Lr, filt.nu, filt.omega, filt.alpha_d_rule);
  check_observer_config(out.observer, out.plant, out.box);
  out.alpha_d = alpha_d(out.observer, out.plant, out.box);
  require(2.0 * out.alpha_d > filt.alpha,
          "filter.alpha must satisfy 2 alpha_d > alpha; alpha_d = " +
              std::to_string(out.alpha_d));

  RobustnessParams rp;
  rp.sigma = filt.sigma;
  rp.omega = filt.omega;
  rp.nu = filt.nu;
  rp.alpha_d = out.alpha_d;

  const double w_u = filt.w_u.value_or(1.0 / (acc.M * acc.M));
  const double w_s = filt.w_s;
  const ClfSpec clf = make_acc_clf(acc, filt.gamma);
  const BarrierSpec dop_spec = make_acc_dop_barrier(acc, filt.alpha);
  const BarrierSpec docbf_spec = make_acc_docbf_barrier(acc, filt.alpha);
  const BarrierSpec reg_spec = make_acc_regular_barrier(acc, filt.alpha);
  const AffinePlant plant = out.plant;
  const ObserverConfig observer = out.observer;
  const double c = acc.c;

  auto u_ref_of = [c](const StateVec& x) {
    Eigen::VectorXd u(1);
    u(0) = c * x(1) * x(1);  // cancels drag, coasting at current speed
    return u;
  };

  auto run_qp = [w_u, w_s](const std::vector<ConstraintRow>& rows,
                           const Eigen::VectorXd& u_ref) -> ControlDecision {
    ControlDecision dec;
    try {
      QpSolution sol = solve_qp(assemble_qp(rows, u_ref, w_u, w_s));
      dec.u = sol.z.head(u_ref.size());
      dec.slack = sol.z(u_ref.size());
    } catch (const QpError& err) {
      dec.u = u_ref;  // fall back to the drag-cancelling reference
      dec.slack = 0.0;
      dec.feasible = false;
      dec.message = err.what();
    }
    return dec;
  };

  // Barriers and the CLF are defined on the physical domain v >= 0; a
  // microscopically negative speed (braking overshoot within one hold
  // interval) evaluates as the stopped car.
  auto physical_state = [](const StateVec& x) {
    StateVec xc = x;
    if (xc(1) < 0.0) xc(1) = 0.0;
    return xc;
  };

  out.dopcbf = [=](double, const StateVec& x_raw, const ObserverState& obs_state) {
    const StateVec x = physical_state(x_raw);
    std::vector<ConstraintRow> rows{
        clf_row(clf, plant, x, obs_state.d_hat),
        dopcbf_row(dop_spec, rp, plant, observer, x, obs_state.d_hat)};
    return run_qp(rows, u_ref_of(x));
  };

  out.docbf = [=](double, const StateVec& x_raw, const ObserverState& obs_state) {
    const StateVec x = physical_state(x_raw);
    std::vector<ConstraintRow> rows{
        clf_row(clf, plant, x, obs_state.d_hat),
        dopcbf_row(docbf_spec, rp, plant, observer, x, obs_state.d_hat)};
    return run_qp(rows, u_ref_of(x));
  };

  out.regular_cbf = [=](double, const StateVec& x_raw, const ObserverState&) {
    const StateVec x = physical_state(x_raw);
    Eigen::VectorXd d_zero = Eigen::VectorXd::Zero(1);
    std::vector<ConstraintRow> rows{clf_row(clf, plant, x, d_zero),
                                    cbf_row_regular(reg_spec, plant, x)};
    return run_qp(rows, u_ref_of(x));
  };

  const double sigma = filt.sigma;
  const AccParams acc_copy = acc;
  out.probe = [acc_copy, sigma, physical_state](double, const StateVec& x_raw,
                                                const ObserverState& obs_state,
                                                const Eigen::VectorXd& d_true) {
    const StateVec x = physical_state(x_raw);
    double theta_hat = grade_from_disturbance(obs_state.d_hat(0), acc_copy);
    double h = h_dop_acc(x, theta_hat, acc_copy);
    double v_e = 0.5 * (d_true - obs_state.d_hat).squaredNorm();
    return std::make_pair(h, h - sigma * v_e);
  };

  return out;
}

}  // namespace dopcbf
