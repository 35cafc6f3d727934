#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "dopcbf/acc.hpp"
#include "dopcbf/filter.hpp"
#include "dopcbf/integrate.hpp"
#include "dopcbf/qp.hpp"
#include "dopcbf/road.hpp"

namespace {

using namespace dopcbf;

StateVec nominal_state() {
  StateVec x(2);
  x << 70.0, 20.0;
  return x;
}

// Representative controller QP: decision [u; s], tracking row + barrier row.
QpProblem nominal_qp() {
  const AccParams acc;
  const AccFilterParams filt;
  const AffinePlant plant = make_acc_plant(acc);
  const ObserverConfig obs =
      make_acc_observer(acc, filt.Lr, filt.nu, filt.omega, filt.alpha_d_rule);
  const BarrierSpec barrier = make_acc_dop_barrier(acc, filt.alpha);
  const ClfSpec clf = make_acc_clf(acc, filt.gamma);
  RobustnessParams rp;
  rp.sigma = filt.sigma;
  rp.omega = filt.omega;
  rp.nu = filt.nu;
  rp.alpha_d = 2.5;
  const StateVec x = nominal_state();
  const Eigen::VectorXd d_hat = Eigen::VectorXd::Zero(1);
  const std::vector<ConstraintRow> rows = {
      clf_row(clf, plant, x, d_hat), dopcbf_row(barrier, rp, plant, obs, x, d_hat)};
  Eigen::VectorXd u_ref(1);
  u_ref << acc.c * x(1) * x(1);
  return assemble_qp(rows, u_ref, 1.0 / (acc.M * acc.M), filt.w_s);
}

void bm_solve_qp(benchmark::State& state) {
  const QpProblem p = nominal_qp();
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_qp(p));
  }
}
BENCHMARK(bm_solve_qp);

void bm_barrier_row(benchmark::State& state) {
  const AccParams acc;
  const AccFilterParams filt;
  const AffinePlant plant = make_acc_plant(acc);
  const ObserverConfig obs =
      make_acc_observer(acc, filt.Lr, filt.nu, filt.omega, filt.alpha_d_rule);
  const BarrierSpec barrier = make_acc_dop_barrier(acc, filt.alpha);
  RobustnessParams rp;
  rp.alpha_d = 2.5;
  const StateVec x = nominal_state();
  Eigen::VectorXd d_hat(1);
  d_hat << 1.2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dopcbf_row(barrier, rp, plant, obs, x, d_hat));
  }
}
BENCHMARK(bm_barrier_row);

void bm_controller_tick(benchmark::State& state) {
  const AccControllers ctrls = build_acc_controllers(AccParams{}, AccFilterParams{});
  const StateVec x = nominal_state();
  ObserverState obs;
  obs.z = Eigen::VectorXd::Zero(1);
  obs.d_hat = Eigen::VectorXd::Zero(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ctrls.dopcbf(0.0, x, obs));
  }
}
BENCHMARK(bm_controller_tick);

void bm_rk4_step(benchmark::State& state) {
  const AccParams acc;
  const auto deriv = [&acc](double, const StateVec& x) -> Eigen::VectorXd {
    return vehicle_rhs(x, 500.0, 0.05, acc);
  };
  const StateVec x = nominal_state();
  for (auto _ : state) {
    benchmark::DoNotOptimize(rk4_step(deriv, 0.0, x, 1e-3));
  }
}
BENCHMARK(bm_rk4_step);

void bm_simulate_short(benchmark::State& state) {
  const AccParams acc;
  const AccControllers ctrls = build_acc_controllers(acc, AccFilterParams{});
  const RoadProfile road = make_three_section_profile();
  const DisturbanceFn dist = [&](double t) {
    Eigen::VectorXd d(1);
    d << grade_disturbance(road.theta(t), acc);
    return d;
  };
  SimConfig cfg;
  cfg.t_end = 1.0;
  const StateVec x0 = nominal_state();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        simulate(ctrls.plant, ctrls.dopcbf, ctrls.observer, dist, x0, cfg,
                 ctrls.probe));
  }
}
BENCHMARK(bm_simulate_short);

}  // namespace

BENCHMARK_MAIN();
