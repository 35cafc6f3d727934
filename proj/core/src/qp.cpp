#include "dopcbf/qp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dopcbf/plant.hpp"

namespace dopcbf {

namespace {

constexpr int kMaxN = 6;
constexpr int kMaxM = 16;
constexpr double kMultiplierTol = 1e-10;
constexpr double kResidualTol = 1e-8;

void validate(const QpProblem& p) {
  const int n = p.n();
  const int m = p.m();
  if (n < 1 || n > kMaxN)
    throw ContractViolation("qp: decision dimension must be in [1, 6], got " +
                            std::to_string(n));
  if (m < 0 || m > kMaxM)
    throw ContractViolation("qp: row count must be in [0, 16], got " +
                            std::to_string(m));
  if (p.H.rows() != n || p.H.cols() != n)
    throw ContractViolation("qp: H must be n x n");
  if (p.G.rows() != m || (m > 0 && p.G.cols() != n))
    throw ContractViolation("qp: G must be m x n");
  if ((p.H - p.H.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * std::max(1.0, p.H.cwiseAbs().maxCoeff()))
    throw ContractViolation("qp: H must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (p.H + p.H.transpose()));
  if (llt.info() != Eigen::Success)
    throw ContractViolation("qp: H must be positive definite");
}

double objective_of(const QpProblem& p, const Eigen::VectorXd& z) {
  return 0.5 * z.dot(p.H * z) + p.f.dot(z);
}

/// Advances a strictly increasing index combination; returns false when done.
bool next_combination(std::vector<int>& idx, int m) {
  int k = static_cast<int>(idx.size());
  for (int i = k - 1; i >= 0; --i) {
    if (idx[i] < m - k + i) {
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

/// Looks for lambda >= 0 with G' lambda = 0, 1' lambda = 1, e' lambda < 0,
/// which certifies that {z : G z <= e} is empty. Vertex supports of the dual
/// polytope have at most n + 1 rows, so small supports suffice.
bool farkas_certificate(const QpProblem& p, std::vector<int>* support) {
  const int n = p.n();
  const int m = p.m();
  const double e_scale = std::max(1.0, p.e.size() ? p.e.cwiseAbs().maxCoeff() : 0.0);
  for (int k = 1; k <= std::min(m, n + 1); ++k) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    do {
      Eigen::MatrixXd A(n + 1, k);
      for (int j = 0; j < k; ++j) {
        A.col(j).head(n) = p.G.row(idx[j]).transpose();
        A(n, j) = 1.0;
      }
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
      rhs(n) = 1.0;
      Eigen::VectorXd lam = A.colPivHouseholderQr().solve(rhs);
      if (!lam.allFinite()) continue;
      if ((A * lam - rhs).cwiseAbs().maxCoeff() > kResidualTol) continue;
      if (lam.minCoeff() < -kMultiplierTol) continue;
      double value = 0.0;
      for (int j = 0; j < k; ++j) value += lam(j) * p.e(idx[j]);
      if (value < -1e-8 * e_scale) {
        *support = idx;
        return true;
      }
    } while (next_combination(idx, m));
  }
  return false;
}

}  // namespace

QpSolution solve_qp(const QpProblem& p) {
  validate(p);
  const int n = p.n();
  const int m = p.m();
  const double feas_scale =
      std::max(1.0, p.e.size() ? p.e.cwiseAbs().maxCoeff() : 0.0);

  for (int k = 0; k <= std::min(m, n); ++k) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    bool more = true;
    while (more) {
      // KKT system of the equality-constrained subproblem on rows idx:
      //   [H  Gs'] [z  ]   [-f ]
      //   [Gs  0 ] [lam] = [ es]
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
      kkt.topLeftCorner(n, n) = p.H;
      Eigen::VectorXd rhs(n + k);
      rhs.head(n) = -p.f;
      for (int j = 0; j < k; ++j) {
        kkt.block(n + j, 0, 1, n) = p.G.row(idx[j]);
        kkt.block(0, n + j, n, 1) = p.G.row(idx[j]).transpose();
        rhs(n + j) = p.e(idx[j]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
      if (lu.isInvertible()) {
        Eigen::VectorXd sol = lu.solve(rhs);
        Eigen::VectorXd z = sol.head(n);
        Eigen::VectorXd lam = sol.tail(k);
        // Sign test scaled by the multiplier magnitude: vertices far from
        // the origin carry large multipliers whose roundoff is proportional.
        bool ok = sol.allFinite() &&
                  (k == 0 ||
                   lam.minCoeff() >=
                       -kMultiplierTol * std::max(1.0, lam.cwiseAbs().maxCoeff()));
        if (ok && m > 0)
          ok = ((p.G * z - p.e).maxCoeff() <= 1e-9 * feas_scale);
        if (ok) {
          // Convexity makes any KKT-consistent point the global optimum;
          // re-check the residual to reject near-singular solves.
          double residual = check_kkt(p, z, idx);
          if (residual <= kResidualTol) {
            QpSolution out;
            out.z = std::move(z);
            out.active_set = idx;
            out.objective = objective_of(p, out.z);
            out.kkt_residual = residual;
            return out;
          }
        }
      }
      more = k > 0 && next_combination(idx, m);
      if (k == 0) break;
    }
  }

  std::vector<int> support;
  if (farkas_certificate(p, &support)) {
    std::ostringstream msg;
    msg << "qp infeasible: certificate on rows {";
    for (size_t i = 0; i < support.size(); ++i)
      msg << (i ? ", " : "") << support[i];
    msg << "}";
    throw QpInfeasible(msg.str());
  }
  throw QpIllConditioned(
      "qp ill-conditioned: no consistent active set and no infeasibility "
      "certificate");
}

double check_kkt(const QpProblem& p, const Eigen::VectorXd& z,
                 const std::vector<int>& active) {
  if (z.size() != p.n()) throw ContractViolation("check_kkt: z has wrong length");
  for (int i : active)
    if (i < 0 || i >= p.m())
      throw ContractViolation("check_kkt: active row index out of range");

  const int k = static_cast<int>(active.size());
  const Eigen::VectorXd grad = p.H * z + p.f;

  // Each block is scaled by the magnitude of the terms entering it so the
  // verdict is invariant to the units of the objective and to how far from
  // the origin the optimum sits: a sliver vertex carries multipliers of
  // order cond(Gs), and an unscaled lambda * slack would amplify pure
  // roundoff in the slack past any fixed tolerance.
  Eigen::MatrixXd At(p.n(), k);
  for (int j = 0; j < k; ++j) At.col(j) = p.G.row(active[j]).transpose();
  Eigen::VectorXd lam(k);
  if (k > 0) lam = At.colPivHouseholderQr().solve(-grad);

  Eigen::VectorXd atl = Eigen::VectorXd::Zero(p.n());
  if (k > 0) atl = At * lam;
  const double s_stat =
      std::max({1.0, grad.cwiseAbs().maxCoeff(), atl.cwiseAbs().maxCoeff()});
  const double r_stat = (grad + atl).cwiseAbs().maxCoeff() / s_stat;

  double r_prim = 0.0;
  if (p.m() > 0) {
    const Eigen::VectorXd gz = p.G * z;
    const double s_prim =
        std::max({1.0, gz.cwiseAbs().maxCoeff(), p.e.cwiseAbs().maxCoeff()});
    r_prim = std::max(0.0, (gz - p.e).maxCoeff()) / s_prim;
  }

  double r_dual = 0.0;
  double r_comp = 0.0;
  for (int j = 0; j < k; ++j) {
    const double s_lam = std::max(1.0, std::abs(lam(j)));
    r_dual = std::max(r_dual, -lam(j) / s_lam);
    const double slack = p.G.row(active[j]).dot(z) - p.e(active[j]);
    r_comp = std::max(r_comp, std::abs(lam(j) * slack) / s_lam);
  }

  return std::max(std::max(r_stat, r_prim), std::max(r_dual, r_comp));
}

}  // namespace dopcbf
