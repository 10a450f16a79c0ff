#include <algorithm>
#include <cmath>

#include "flexkit/solver.hpp"

namespace flexkit {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::IterationLimit: return "IterationLimit";
    case SolveStatus::NodeLimit: return "NodeLimit";
    case SolveStatus::NumericalBreakdown: return "NumericalBreakdown";
  }
  return "?";
}

namespace {

constexpr double kPivTol = 1e-9;
constexpr double kFeasTol = 1e-8;

// Column bookkeeping for the standard-form transcription. Each original
// variable maps to x_j = offset + sign_p * x[col_p] (+ optionally - x[col_m]
// for split free variables).
struct VarMap {
  double offset = 0.0;
  int col_p = -1;
  double sign_p = 1.0;
  int col_m = -1;  // coefficient -1 when present
};

struct Standardized {
  Eigen::MatrixXd A;  // m x ncols
  Eigen::VectorXd b;  // >= 0
  Eigen::VectorXd cost;
  double cost_offset = 0.0;
  std::vector<VarMap> vmap;
  std::vector<int> row_of;       // original row index per standard row (-1: bound row)
  std::vector<int> bound_of;     // original variable per bound row (-1 otherwise)
  std::vector<double> row_sign;  // standard row = sign * original row
  std::vector<int> art_col;      // per standard row: artificial column or -1
  std::vector<int> unit_col;     // per standard row: column equal to +e_i
  int n_struct = 0;
  int first_art = 0;
};

struct Tableau {
  Eigen::MatrixXd T;   // m x ncols, starts as A, maintained as B^-1 A
  Eigen::VectorXd rhs;
  std::vector<int> basis;
};

void pivot(Tableau& t, int prow, int pcol) {
  const double pv = t.T(prow, pcol);
  t.T.row(prow) /= pv;
  t.rhs(prow) /= pv;
  for (int i = 0; i < t.T.rows(); ++i) {
    if (i == prow) continue;
    const double f = t.T(i, pcol);
    if (f != 0.0) {
      t.T.row(i) -= f * t.T.row(prow);
      t.rhs(i) -= f * t.rhs(prow);
    }
  }
  t.basis[prow] = pcol;
}

// Returns Optimal/Unbounded/NumericalBreakdown. `allowed(j)` gates entering
// columns. Reduced costs computed from scratch each iteration (problems here
// are small and dense).
SolveStatus run_simplex(Tableau& t, const Eigen::VectorXd& cost,
                        const std::function<bool(int)>& allowed,
                        long& iterations, int& unbounded_col) {
  const int m = static_cast<int>(t.T.rows());
  const int n = static_cast<int>(t.T.cols());
  const long bland_after = 3L * (m + n);
  const long max_iters = 2000L + 50L * static_cast<long>(m + n) * (m + n);
  long degenerate_streak = 0;

  for (;;) {
    if (++iterations > max_iters)
      throw NumericalBreakdown("simplex: anti-cycling exhaustion");
    Eigen::VectorXd cb(m);
    for (int i = 0; i < m; ++i) cb(i) = cost(t.basis[i]);

    const bool bland = degenerate_streak > bland_after;
    int enter = -1;
    double best = -kPivTol;
    for (int j = 0; j < n; ++j) {
      if (!allowed(j)) continue;
      const double rc = cost(j) - cb.dot(t.T.col(j));
      if (rc < -kPivTol) {
        if (bland) { enter = j; break; }
        if (rc < best) { best = rc; enter = j; }
      }
    }
    if (enter < 0) return SolveStatus::Optimal;

    int leave = -1;
    double best_ratio = kInf;
    for (int i = 0; i < m; ++i) {
      const double a = t.T(i, enter);
      if (a > kPivTol) {
        const double r = t.rhs(i) / a;
        if (r < best_ratio - 1e-12 ||
            (r < best_ratio + 1e-12 &&
             (leave < 0 || t.basis[i] < t.basis[leave]))) {
          best_ratio = r;
          leave = i;
        }
      }
    }
    if (leave < 0) {
      unbounded_col = enter;
      return SolveStatus::Unbounded;
    }
    if (best_ratio < 1e-12)
      ++degenerate_streak;
    else
      degenerate_streak = 0;
    pivot(t, leave, enter);
  }
}

Standardized standardize(const LPProblem& p) {
  Standardized s;
  const Eigen::Index n = p.n();
  s.vmap.resize(n);

  // Structural columns after bound shifts and free-variable splits.
  int ncols = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    VarMap& vm = s.vmap[j];
    const double lo = p.lower(j), up = p.upper(j);
    if (lo > up + 1e-15) {
      // contradictory bounds: surface as infeasible via an impossible row
      // below; keep a placeholder column.
    }
    if (std::isfinite(lo)) {
      vm.offset = lo;
      vm.sign_p = 1.0;
      vm.col_p = ncols++;
    } else if (std::isfinite(up)) {
      vm.offset = up;
      vm.sign_p = -1.0;
      vm.col_p = ncols++;
    } else {
      vm.col_p = ncols++;
      vm.col_m = ncols++;
    }
  }
  s.n_struct = ncols;

  struct StdRow {
    Eigen::VectorXd a;  // over structural columns
    double b;
    bool eq;
    int orig;
    int bvar = -1;
    double sign;
  };
  std::vector<StdRow> rows;

  auto transcribe = [&](const Eigen::VectorXd& a, double b, bool eq, int orig) {
    Eigen::VectorXd sa = Eigen::VectorXd::Zero(ncols);
    double sb = b;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double aj = a(j);
      if (aj == 0.0) continue;
      const VarMap& vm = s.vmap[j];
      sb -= aj * vm.offset;
      sa(vm.col_p) += aj * vm.sign_p;
      if (vm.col_m >= 0) sa(vm.col_m) -= aj;
    }
    rows.push_back({std::move(sa), sb, eq, orig, -1, 1.0});
  };

  for (size_t i = 0; i < p.rows.size(); ++i) {
    const LinearRow& r = p.rows[i];
    if (r.sense == RowSense::GE)
      transcribe(-r.a, -r.b, false, static_cast<int>(i));
    else
      transcribe(r.a, r.b, r.sense == RowSense::EQ, static_cast<int>(i));
    if (r.sense == RowSense::GE) rows.back().sign = -1.0;
  }
  // Finite upper bounds on shifted columns become rows.
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lo = p.lower(j), up = p.upper(j);
    if (std::isfinite(lo) && std::isfinite(up)) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(ncols);
      a(s.vmap[j].col_p) = 1.0;
      rows.push_back({std::move(a), up - lo, false, -1, static_cast<int>(j), 1.0});
    }
  }

  // Flip rows to nonnegative rhs, then add slack/surplus/artificial columns.
  const int m = static_cast<int>(rows.size());
  int extra = 0;
  std::vector<int> slack_col(m, -1), art(m, -1);
  for (int i = 0; i < m; ++i) {
    if (rows[i].b < 0.0) {
      rows[i].a = -rows[i].a;
      rows[i].b = -rows[i].b;
      rows[i].sign = -rows[i].sign;
      if (!rows[i].eq) {
        slack_col[i] = ncols + extra++;  // surplus, coefficient -1
        art[i] = ncols + extra++;
      } else {
        art[i] = ncols + extra++;
      }
    } else if (!rows[i].eq) {
      slack_col[i] = ncols + extra++;  // slack, coefficient +1
    } else {
      art[i] = ncols + extra++;
    }
  }

  const int total = ncols + extra;
  s.A = Eigen::MatrixXd::Zero(m, total);
  s.b = Eigen::VectorXd(m);
  s.cost = Eigen::VectorXd::Zero(total);
  s.row_of.resize(m);
  s.bound_of.resize(m);
  s.row_sign.resize(m);
  s.art_col.resize(m);
  s.unit_col.resize(m);
  s.first_art = total;

  for (int i = 0; i < m; ++i) {
    s.A.row(i).head(ncols) = rows[i].a.transpose();
    s.b(i) = rows[i].b;
    s.row_of[i] = rows[i].orig;
    s.bound_of[i] = rows[i].bvar;
    s.row_sign[i] = rows[i].sign;
    s.art_col[i] = art[i];
    if (slack_col[i] >= 0)
      s.A(i, slack_col[i]) = (art[i] >= 0) ? -1.0 : 1.0;
    if (art[i] >= 0) {
      s.A(i, art[i]) = 1.0;
      s.first_art = std::min(s.first_art, art[i]);
    }
    s.unit_col[i] = (art[i] >= 0) ? art[i] : slack_col[i];
  }
  // artificials were assigned interleaved; mark them individually instead
  // of relying on a contiguous range.
  return s;
}

}  // namespace

SolveOutcome solve_lp(const LPProblem& p) {
  const Eigen::Index n = p.n();
  for (Eigen::Index j = 0; j < n; ++j)
    if (p.lower(j) > p.upper(j) + 1e-15) {
      SolveOutcome out;
      out.status = SolveStatus::Infeasible;
      return out;
    }

  Standardized s = standardize(p);
  const int m = static_cast<int>(s.A.rows());
  const int total = static_cast<int>(s.A.cols());

  std::vector<bool> is_art(total, false);
  for (int i = 0; i < m; ++i)
    if (s.art_col[i] >= 0) is_art[s.art_col[i]] = true;

  Tableau t;
  t.T = s.A;
  t.rhs = s.b;
  t.basis.resize(m);
  for (int i = 0; i < m; ++i)
    t.basis[i] = (s.art_col[i] >= 0) ? s.art_col[i] : s.unit_col[i];

  SolveOutcome out;
  out.iterations = 0;

  // Phase 1: drive artificials to zero.
  bool have_art = false;
  for (int i = 0; i < m; ++i) have_art |= s.art_col[i] >= 0;
  if (have_art) {
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(total);
    for (int j = 0; j < total; ++j)
      if (is_art[j]) c1(j) = 1.0;
    int ub_col = -1;
    SolveStatus st = run_simplex(
        t, c1, [](int) { return true; }, out.iterations, ub_col);
    if (st != SolveStatus::Optimal)
      throw NumericalBreakdown("simplex phase 1 failed");
    double art_sum = 0.0;
    for (int i = 0; i < m; ++i)
      if (is_art[t.basis[i]]) art_sum += t.rhs(i);
    if (art_sum > kFeasTol) {
      out.status = SolveStatus::Infeasible;
      return out;
    }
    // Pivot basic artificials out where possible; leftover rows are
    // redundant and their artificial stays basic at zero.
    for (int i = 0; i < m; ++i) {
      if (!is_art[t.basis[i]]) continue;
      for (int j = 0; j < total; ++j) {
        if (is_art[j]) continue;
        if (std::abs(t.T(i, j)) > 1e-7) {
          pivot(t, i, j);
          break;
        }
      }
    }
  }

  // Phase 2 over the structural cost.
  Eigen::VectorXd c2 = Eigen::VectorXd::Zero(total);
  double cost_offset = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const VarMap& vm = s.vmap[j];
    const double cj = p.c(j);
    cost_offset += cj * vm.offset;
    c2(vm.col_p) += cj * vm.sign_p;
    if (vm.col_m >= 0) c2(vm.col_m) -= cj;
  }

  int ub_col = -1;
  SolveStatus st = run_simplex(
      t, c2, [&](int j) { return !is_art[j]; }, out.iterations, ub_col);

  // Primal in original coordinates (also valid as the base point of a ray).
  Eigen::VectorXd xstd = Eigen::VectorXd::Zero(total);
  for (int i = 0; i < m; ++i) xstd(t.basis[i]) = t.rhs(i);
  out.x = Eigen::VectorXd(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const VarMap& vm = s.vmap[j];
    out.x(j) = vm.offset + vm.sign_p * xstd(vm.col_p);
    if (vm.col_m >= 0) out.x(j) -= xstd(vm.col_m);
  }

  if (st == SolveStatus::Unbounded) {
    Eigen::VectorXd dstd = Eigen::VectorXd::Zero(total);
    dstd(ub_col) = 1.0;
    for (int i = 0; i < m; ++i) dstd(t.basis[i]) = -t.T(i, ub_col);
    out.ray = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const VarMap& vm = s.vmap[j];
      out.ray(j) = vm.sign_p * dstd(vm.col_p);
      if (vm.col_m >= 0) out.ray(j) -= dstd(vm.col_m);
    }
    out.status = SolveStatus::Unbounded;
    out.objective = -kInf;
    return out;
  }
  if (st != SolveStatus::Optimal) {
    out.status = st;
    return out;
  }

  out.objective = c2.dot(xstd) + cost_offset;

  // Row duals from the reduced costs of each row's unit column:
  // rc(unit_i) = cost(unit_i) - y_i. Bound rows carry no user-visible dual.
  Eigen::VectorXd cb(m);
  for (int i = 0; i < m; ++i) cb(i) = c2(t.basis[i]);
  auto rc_of = [&](int j) { return c2(j) - cb.dot(t.T.col(j)); };

  out.row_duals = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.rows.size()));
  for (int i = 0; i < m; ++i) {
    if (s.row_of[i] < 0) continue;  // internal bound row
    const double y = -rc_of(s.unit_col[i]);
    const bool ge = p.rows[s.row_of[i]].sense == RowSense::GE;
    out.row_duals(s.row_of[i]) = (ge ? 1.0 : -1.0) * y * s.row_sign[i];
  }

  // Reduced costs per original variable. For two-sided variables the
  // internal upper-bound row carries the multiplier when the variable is
  // pinned above, so its dual is folded back into the variable's entry.
  out.reduced_costs = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const VarMap& vm = s.vmap[j];
    out.reduced_costs(j) = vm.sign_p * rc_of(vm.col_p);
    if (vm.col_m >= 0) out.reduced_costs(j) = 0.0;  // free variable
  }
  for (int i = 0; i < m; ++i) {
    const int j = s.bound_of[i];
    if (j < 0) continue;
    out.reduced_costs(j) += -rc_of(s.unit_col[i]);
  }

  out.status = SolveStatus::Optimal;
  return out;
}

}  // namespace flexkit
