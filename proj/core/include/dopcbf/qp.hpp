#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace dopcbf {

/// Strictly convex inequality-constrained quadratic program
///   min_z  0.5 z' H z + f' z   subject to   G z <= e.
/// Sized for small controller problems: n <= 6 decision variables and
/// m <= 16 rows.
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd f;
  Eigen::MatrixXd G;
  Eigen::VectorXd e;

  int n() const { return static_cast<int>(f.size()); }
  int m() const { return static_cast<int>(e.size()); }
};

struct QpSolution {
  Eigen::VectorXd z;
  std::vector<int> active_set;  ///< sorted row indices active at the optimum
  double objective = 0.0;
  double kkt_residual = 0.0;
};

class QpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No z satisfies G z <= e (a Farkas certificate was found).
class QpInfeasible : public QpError {
 public:
  using QpError::QpError;
};

/// Enumeration finished without a consistent candidate and without an
/// infeasibility certificate; the problem data is numerically degenerate.
class QpIllConditioned : public QpError {
 public:
  using QpError::QpError;
};

/// Solves the QP by exhaustive active-set enumeration: for every candidate
/// active subset (size ascending, then lexicographic) the equality-constrained
/// KKT system is solved; the first candidate that is primal feasible, has
/// multipliers >= -1e-10, and passes a KKT residual re-check is the unique
/// global optimum. The enumeration order makes the reported active set the
/// smallest, lowest-index one among optima.
QpSolution solve_qp(const QpProblem& p);

/// Recomputes stationarity, primal feasibility, dual feasibility, and
/// complementarity residuals for a claimed solution; returns the largest.
/// Multipliers for the claimed active rows are recovered by least squares.
/// Every block is scaled by the magnitude of its own terms, so the value is
/// comparable to machine epsilon regardless of objective units or how large
/// the optimal multipliers are.
double check_kkt(const QpProblem& p, const Eigen::VectorXd& z,
                 const std::vector<int>& active);

}  // namespace dopcbf
