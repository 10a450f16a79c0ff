#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <vector>

#include "flexkit/errors.hpp"

namespace flexkit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class SolveStatus {
  Optimal,
  Infeasible,
  Unbounded,
  IterationLimit,
  NodeLimit,
  NumericalBreakdown,
};

const char* to_string(SolveStatus s);

enum class RowSense { LE, GE, EQ };

struct LinearRow {
  Eigen::VectorXd a;
  RowSense sense = RowSense::LE;
  double b = 0.0;
};

// minimize c.v subject to rows and variable bounds.
struct LPProblem {
  Eigen::VectorXd c;
  std::vector<LinearRow> rows;
  Eigen::VectorXd lower;  // -inf allowed
  Eigen::VectorXd upper;  // +inf allowed

  Eigen::Index n() const { return c.size(); }
  void resize(Eigen::Index n) {
    c = Eigen::VectorXd::Zero(n);
    lower = Eigen::VectorXd::Constant(n, -kInf);
    upper = Eigen::VectorXd::Constant(n, kInf);
  }
};

// minimize 0.5 v.Qv + c.v subject to the same row/bound structure.
struct QPProblem {
  Eigen::MatrixXd Q;  // symmetric PSD
  Eigen::VectorXd c;
  std::vector<LinearRow> rows;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::Index n() const { return c.size(); }
  void resize(Eigen::Index n) {
    Q = Eigen::MatrixXd::Zero(n, n);
    c = Eigen::VectorXd::Zero(n);
    lower = Eigen::VectorXd::Constant(n, -kInf);
    upper = Eigen::VectorXd::Constant(n, kInf);
  }
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::NumericalBreakdown;
  Eigen::VectorXd x;
  // Row multipliers: >= 0 for LE and GE rows (Lagrangian convention
  // L = c.x + mu (a.x - b) for LE, L = c.x + mu (b - a.x) for GE),
  // free for EQ rows with L = c.x + mu (a.x - b).
  Eigen::VectorXd row_duals;
  Eigen::VectorXd reduced_costs;  // per original variable
  double objective = 0.0;
  long iterations = 0;
  // Populated on Unbounded: a feasible ray along which the objective
  // decreases without limit.
  Eigen::VectorXd ray;
};

SolveOutcome solve_lp(const LPProblem& p);
SolveOutcome solve_qp(const QPProblem& p);

struct BnBConfig {
  double rel_gap = 1e-9;
  double abs_gap = 1e-9;
  long node_limit = 1000000;
  double int_tol = 1e-6;
  double big_m = -1.0;  // <= 0 selects the default from the row data
};

// Continuous relaxation of the mixed-binary problem with the given binary
// fixings (-1 free, 0/1 fixed). `binaries` must carry the relaxed binary
// values so the search can branch on them.
struct RelaxationResult {
  SolveStatus status = SolveStatus::Infeasible;
  double bound = kInf;
  Eigen::VectorXd binaries;
  Eigen::VectorXd primal;  // full primal vector, solver-defined layout
};

using RelaxationSolver =
    std::function<RelaxationResult(const std::vector<int>& fixings)>;

struct BnBResult {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = kInf;
  std::vector<int> assignment;
  RelaxationResult incumbent;
  long nodes = 0;
  double gap = 0.0;
};

BnBResult branch_and_bound(const RelaxationSolver& relax, int n_binaries,
                           const BnBConfig& config);

// maximize sum_i log(b_i - A v) subject to E v = f, from a strictly
// interior start. Projected-gradient residual at the returned point is
// <= 1e-8.
struct BarrierProblem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd E;  // may have zero rows
  Eigen::VectorXd f;
};

Eigen::VectorXd newton_barrier_max(const BarrierProblem& p,
                                   const Eigen::VectorXd& interior_start);

}  // namespace flexkit
