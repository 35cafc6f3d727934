#include "dopcbf/plant.hpp"

namespace dopcbf {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

}  // namespace

Eigen::VectorXd eval_affine_dynamics(const AffinePlant& plant, const StateVec& x,
                                     const Eigen::VectorXd& u,
                                     const Eigen::VectorXd& d) {
  require(plant.f && plant.g1 && plant.g2, "plant: f/g1/g2 must all be set");
  require(x.size() == plant.n_x, "plant: x has length " + std::to_string(x.size()) +
                                     ", expected n_x = " + std::to_string(plant.n_x));
  require(u.size() == plant.n_u, "plant: u has length " + std::to_string(u.size()) +
                                     ", expected n_u = " + std::to_string(plant.n_u));
  require(d.size() == plant.n_d, "plant: d has length " + std::to_string(d.size()) +
                                     ", expected n_d = " + std::to_string(plant.n_d));

  Eigen::VectorXd fx = plant.f(x);
  require(fx.size() == plant.n_x, "plant: f(x) returned wrong length");
  Eigen::MatrixXd G1 = plant.g1(x);
  require(G1.rows() == plant.n_x && G1.cols() == plant.n_u,
          "plant: g1(x) returned wrong shape");
  Eigen::MatrixXd G2 = plant.g2(x);
  require(G2.rows() == plant.n_x && G2.cols() == plant.n_d,
          "plant: g2(x) returned wrong shape");

  return fx + G1 * u + G2 * d;
}

}  // namespace dopcbf
