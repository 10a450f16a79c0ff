#include <cmath>

#include "flexkit/solver.hpp"

namespace flexkit {

// Damped Newton on phi(v) = -sum_i log(b_i - A v) restricted to E v = f.
Eigen::VectorXd newton_barrier_max(const BarrierProblem& p,
                                   const Eigen::VectorXd& interior_start) {
  const Eigen::Index n = interior_start.size();
  const Eigen::Index m = p.A.rows();
  const Eigen::Index me = p.E.rows();

  Eigen::VectorXd v = interior_start;
  {
    Eigen::VectorXd s0 = p.b - p.A * v;
    if (m > 0 && s0.minCoeff() <= 0.0)
      throw NoInteriorPoint("newton_barrier_max: start is not interior");
  }

  for (int iter = 0; iter < 200; ++iter) {
    Eigen::VectorXd s = p.b - p.A * v;
    Eigen::VectorXd sinv = s.cwiseInverse();
    Eigen::VectorXd grad = p.A.transpose() * sinv;  // of phi
    Eigen::MatrixXd H =
        p.A.transpose() * sinv.array().square().matrix().asDiagonal() * p.A;

    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + me, n + me);
    K.topLeftCorner(n, n) = H;
    K.topLeftCorner(n, n).diagonal().array() += 1e-12;
    if (me > 0) {
      K.block(n, 0, me, n) = p.E;
      K.block(0, n, n, me) = p.E.transpose();
    }
    Eigen::VectorXd rhs(n + me);
    rhs.head(n) = -grad;
    if (me > 0) rhs.segment(n, me) = p.f - p.E * v;

    Eigen::VectorXd sol = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(K).solve(rhs);
    Eigen::VectorXd dv = sol.head(n);

    // stationarity residual of phi on the equality manifold
    Eigen::VectorXd resid = grad;
    if (me > 0) resid += p.E.transpose() * sol.tail(me);
    const double eq_err = (me > 0) ? (p.E * v - p.f).cwiseAbs().maxCoeff() : 0.0;
    const double decrement2 = dv.dot(H * dv);
    if (resid.cwiseAbs().maxCoeff() <= 1e-9 && eq_err <= 1e-10) return v;
    if (decrement2 <= 1e-20 && eq_err <= 1e-10) return v;

    // backtracking keeping all slacks positive; phi decreases
    double alpha = 1.0;
    Eigen::VectorXd Adv = p.A * dv;
    for (Eigen::Index i = 0; i < m; ++i)
      if (Adv(i) > 0.0) alpha = std::min(alpha, 0.99 * s(i) / Adv(i));
    const double phi0 = -s.array().log().sum();
    const double slope = grad.dot(dv);
    for (int ls = 0; ls < 60; ++ls) {
      Eigen::VectorXd snew = p.b - p.A * (v + alpha * dv);
      if (snew.minCoeff() > 0.0) {
        const double phi1 = -snew.array().log().sum();
        if (phi1 <= phi0 + 1e-4 * alpha * slope + 1e-14) break;
      }
      alpha *= 0.5;
    }
    v += alpha * dv;
    if (v.cwiseAbs().maxCoeff() > 1e12)
      throw FlexError("newton_barrier_max: iterates diverge (region unbounded)");
  }
  throw NumericalBreakdown("newton_barrier_max: no convergence");
}

}  // namespace flexkit
