#include "dopcbf/integrate.hpp"

#include <cmath>

namespace dopcbf {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

bool divides(double small, double big) {
  double ratio = big / small;
  return std::abs(ratio - std::round(ratio)) < 1e-9 && std::round(ratio) >= 1.0;
}

}  // namespace

void SimConfig::validate() const {
  require(t_end > 0.0, "sim: t_end must be positive");
  require(dt_int > 0.0 && dt_ctrl > 0.0, "sim: step sizes must be positive");
  require(dt_int <= dt_ctrl, "sim: dt_int must not exceed dt_ctrl");
  require(divides(dt_int, dt_ctrl), "sim: dt_int must divide dt_ctrl");
  require(divides(dt_ctrl, t_end), "sim: dt_ctrl must divide t_end");
  require(record_every >= 1, "sim: record_every must be at least 1");
}

StateVec rk4_step(const std::function<Eigen::VectorXd(double, const StateVec&)>& deriv,
                  double t, const StateVec& x, double dt) {
  require(static_cast<bool>(deriv), "rk4_step: deriv must be set");
  require(dt > 0.0, "rk4_step: dt must be positive");
  Eigen::VectorXd k1 = deriv(t, x);
  Eigen::VectorXd k2 = deriv(t + 0.5 * dt, x + 0.5 * dt * k1);
  Eigen::VectorXd k3 = deriv(t + 0.5 * dt, x + 0.5 * dt * k2);
  Eigen::VectorXd k4 = deriv(t + dt, x + dt * k3);
  StateVec next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite())
    throw IntegrationError("integrate: state not finite after step at t = " +
                               std::to_string(t),
                           t);
  return next;
}

Trajectory simulate(const AffinePlant& plant, const Controller& controller,
                    const ObserverConfig& obs, const DisturbanceFn& disturbance,
                    const StateVec& x0, const SimConfig& cfg,
                    const BarrierProbe& probe) {
  cfg.validate();
  require(static_cast<bool>(controller), "simulate: controller must be set");
  require(static_cast<bool>(disturbance), "simulate: disturbance must be set");
  require(static_cast<bool>(obs.p) && static_cast<bool>(obs.l),
          "simulate: observer must be configured");
  require(x0.size() == plant.n_x, "simulate: x0/n_x mismatch");

  const long n_ticks = std::lround(cfg.t_end / cfg.dt_ctrl);
  const long n_sub = std::lround(cfg.dt_ctrl / cfg.dt_int);
  const int n_aug = plant.n_x + plant.n_d;

  Trajectory traj;
  const std::size_t expected =
      static_cast<std::size_t>((n_ticks - 1) / cfg.record_every) + 2;
  traj.times.reserve(expected);
  traj.states.reserve(expected);
  traj.controls.reserve(expected);
  traj.disturbances.reserve(expected);
  traj.estimates.reserve(expected);
  traj.barrier_h.reserve(expected);
  traj.barrier_hde.reserve(expected);

  StateVec x = x0;
  Eigen::VectorXd z = -obs.p(x0);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(plant.n_u);
  double slack = 0.0;

  auto record = [&](double t, const ObserverState& state) {
    Eigen::VectorXd d_true = disturbance(t);
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.controls.push_back({t, u, slack});
    traj.disturbances.push_back(d_true);
    traj.estimates.push_back(state.d_hat);
    if (probe) {
      auto [h, hde] = probe(t, x, state, d_true);
      traj.barrier_h.push_back(h);
      traj.barrier_hde.push_back(hde);
    } else {
      traj.barrier_h.push_back(0.0);
      traj.barrier_hde.push_back(0.0);
    }
  };

  // Held-command dynamics of the augmented vector y = [x; z].
  Eigen::VectorXd y(n_aug);
  auto aug_deriv = [&](double t, const Eigen::VectorXd& yv) -> Eigen::VectorXd {
    StateVec xs = yv.head(plant.n_x);
    Eigen::VectorXd zs = yv.tail(plant.n_d);
    Eigen::VectorXd out(n_aug);
    out.head(plant.n_x) = eval_affine_dynamics(plant, xs, u, disturbance(t));
    out.tail(plant.n_d) = observer_rhs(obs, plant, xs, u, zs);
    return out;
  };

  for (long k = 0; k < n_ticks; ++k) {
    const double t = k * cfg.dt_ctrl;
    if (!x.allFinite() || !z.allFinite())
      throw IntegrationError("simulate: state not finite at t = " + std::to_string(t), t);

    ObserverState state{z, z + obs.p(x)};
    ControlDecision decision = controller(t, x, state);
    require(decision.u.size() == plant.n_u, "simulate: controller returned wrong n_u");
    u = decision.u;
    slack = decision.slack;
    if (!decision.feasible) traj.qp_failures.push_back({t, decision.message});

    if (k % cfg.record_every == 0) record(t, state);

    y.head(plant.n_x) = x;
    y.tail(plant.n_d) = z;
    for (long j = 0; j < n_sub; ++j)
      y = rk4_step(aug_deriv, t + j * cfg.dt_int, y, cfg.dt_int);
    x = y.head(plant.n_x);
    z = y.tail(plant.n_d);
  }

  if (!x.allFinite() || !z.allFinite())
    throw IntegrationError("simulate: state not finite at t = " + std::to_string(cfg.t_end),
                           cfg.t_end);
  ObserverState state{z, z + obs.p(x)};
  record(cfg.t_end, state);
  return traj;
}

}  // namespace dopcbf
