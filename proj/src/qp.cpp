#include <algorithm>
#include <cmath>

#include "flexkit/solver.hpp"

namespace flexkit {

namespace {

struct NormalizedQP {
  Eigen::MatrixXd Aeq;
  Eigen::VectorXd beq;
  Eigen::MatrixXd G;  // G x <= h, bounds folded in
  Eigen::VectorXd h;
  std::vector<int> eq_row;   // original row per Aeq row (-1: fixed variable)
  std::vector<int> eq_bound_var;  // variable behind a fixed-variable eq row
  std::vector<int> ineq_row; // original row per G row (-1: bound row)
  std::vector<int> bound_var;
  std::vector<int> bound_dir;  // -1 lower, +1 upper
};

NormalizedQP normalize(const QPProblem& p) {
  NormalizedQP n;
  const Eigen::Index nv = p.n();
  std::vector<Eigen::VectorXd> grows;
  std::vector<double> hs;
  std::vector<Eigen::VectorXd> erows;
  std::vector<double> es;
  for (size_t i = 0; i < p.rows.size(); ++i) {
    const auto& r = p.rows[i];
    switch (r.sense) {
      case RowSense::LE:
        grows.push_back(r.a); hs.push_back(r.b);
        n.ineq_row.push_back(static_cast<int>(i));
        n.bound_var.push_back(-1); n.bound_dir.push_back(0);
        break;
      case RowSense::GE:
        grows.push_back(-r.a); hs.push_back(-r.b);
        n.ineq_row.push_back(static_cast<int>(i));
        n.bound_var.push_back(-1); n.bound_dir.push_back(0);
        break;
      case RowSense::EQ:
        erows.push_back(r.a); es.push_back(r.b);
        n.eq_row.push_back(static_cast<int>(i));
        n.eq_bound_var.push_back(-1);
        break;
    }
  }
  for (Eigen::Index j = 0; j < nv; ++j) {
    // A pinched bound leaves the inequality system without interior, which
    // stalls the interior-point iteration; express it as an equality.
    if (std::isfinite(p.lower(j)) && p.lower(j) == p.upper(j)) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(nv);
      a(j) = 1.0;
      erows.push_back(a); es.push_back(p.lower(j));
      n.eq_row.push_back(-1);
      n.eq_bound_var.push_back(static_cast<int>(j));
      continue;
    }
    if (std::isfinite(p.lower(j))) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(nv);
      a(j) = -1.0;
      grows.push_back(a); hs.push_back(-p.lower(j));
      n.ineq_row.push_back(-1);
      n.bound_var.push_back(static_cast<int>(j)); n.bound_dir.push_back(-1);
    }
    if (std::isfinite(p.upper(j))) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(nv);
      a(j) = 1.0;
      grows.push_back(a); hs.push_back(p.upper(j));
      n.ineq_row.push_back(-1);
      n.bound_var.push_back(static_cast<int>(j)); n.bound_dir.push_back(1);
    }
  }
  n.G.resize(static_cast<Eigen::Index>(grows.size()), nv);
  n.h.resize(static_cast<Eigen::Index>(grows.size()));
  for (size_t i = 0; i < grows.size(); ++i) {
    n.G.row(static_cast<Eigen::Index>(i)) = grows[i].transpose();
    n.h(static_cast<Eigen::Index>(i)) = hs[i];
  }
  n.Aeq.resize(static_cast<Eigen::Index>(erows.size()), nv);
  n.beq.resize(static_cast<Eigen::Index>(erows.size()));
  for (size_t i = 0; i < erows.size(); ++i) {
    n.Aeq.row(static_cast<Eigen::Index>(i)) = erows[i].transpose();
    n.beq(static_cast<Eigen::Index>(i)) = es[i];
  }
  return n;
}

// Refine the interior-point iterate by solving the KKT system of the
// detected active set exactly. Returns false when the polished point does
// not certify optimality.
bool polish(const QPProblem& p, const NormalizedQP& nq,
            const Eigen::VectorXd& x_ipm, const Eigen::VectorXd& s,
            const Eigen::VectorXd& z, Eigen::VectorXd& x_out,
            Eigen::VectorXd& y_out, Eigen::VectorXd& z_out) {
  const Eigen::Index nv = p.n();
  const Eigen::Index me = nq.Aeq.rows();
  const Eigen::Index mi = nq.G.rows();

  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < mi; ++i)
    if (s(i) <= z(i)) active.push_back(i);  // complementarity split

  // Degenerate nodes can hand over a wrong split, so the set is repaired:
  // rows the KKT point violates enter, rows with negative multipliers leave.
  Eigen::VectorXd x, y, za;
  bool ok = false;
  for (int round = 0; round < 30 && !ok; ++round) {
    const Eigen::Index ma = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nv + me + ma, nv + me + ma);
    Eigen::VectorXd rhs(nv + me + ma);
    K.topLeftCorner(nv, nv) = p.Q;
    rhs.head(nv) = -p.c;
    if (me > 0) {
      K.block(nv, 0, me, nv) = nq.Aeq;
      K.block(0, nv, nv, me) = nq.Aeq.transpose();
      rhs.segment(nv, me) = nq.beq;
    }
    for (Eigen::Index k = 0; k < ma; ++k) {
      K.row(nv + me + k).head(nv) = nq.G.row(active[k]);
      K.col(nv + me + k).head(nv) = nq.G.row(active[k]).transpose();
      rhs(nv + me + k) = nq.h(active[k]);
    }

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(K);
    Eigen::VectorXd sol = cod.solve(rhs);
    x = sol.head(nv);
    if (!x.allFinite()) return false;
    y = sol.segment(nv, me);
    za = sol.tail(ma);

    if (ma > 0 && za.minCoeff() < -1e-7) {
      Eigen::Index drop = 0;
      za.minCoeff(&drop);
      active.erase(active.begin() + drop);
      continue;
    }

    const double tol = 1e-8 * (2.0 + x.cwiseAbs().maxCoeff());
    if (me > 0 && (nq.Aeq * x - nq.beq).cwiseAbs().maxCoeff() > tol)
      return false;
    Eigen::Index worst = -1;
    double worst_v = tol;
    for (Eigen::Index i = 0; i < mi; ++i) {
      const double v = nq.G.row(i).dot(x) - nq.h(i);
      if (v > worst_v &&
          std::find(active.begin(), active.end(), i) == active.end()) {
        worst_v = v;
        worst = i;
      }
    }
    if (worst >= 0) {
      active.push_back(worst);
      continue;
    }
    if (mi > 0 && (nq.G * x - nq.h).maxCoeff() > tol) return false;
    ok = true;
  }
  if (!ok) return false;
  const Eigen::Index ma = static_cast<Eigen::Index>(active.size());

  // stationarity with clipped multipliers
  Eigen::VectorXd zfull = Eigen::VectorXd::Zero(mi);
  for (Eigen::Index k = 0; k < ma; ++k)
    zfull(active[k]) = std::max(0.0, za(k));
  Eigen::VectorXd rd = p.Q * x + p.c + nq.G.transpose() * zfull;
  if (me > 0) rd += nq.Aeq.transpose() * y;
  if (rd.cwiseAbs().maxCoeff() > 1e-7 * (1.0 + p.c.cwiseAbs().maxCoeff()))
    return false;

  const double f_new = 0.5 * x.dot(p.Q * x) + p.c.dot(x);
  const double f_ipm = 0.5 * x_ipm.dot(p.Q * x_ipm) + p.c.dot(x_ipm);
  if (f_new > f_ipm + 1e-7 * (1.0 + std::abs(f_ipm))) return false;

  x_out = x;
  y_out = y;
  z_out = zfull;
  return true;
}

// minimize over the given problem assuming every variable interval has
// positive width (presolve guarantees this).
SolveOutcome solve_qp_reduced(const QPProblem& p) {
  const Eigen::Index nv = p.n();
  SolveOutcome out;

  // Feasibility and starting point from an LP phase.
  LPProblem feas;
  feas.c = Eigen::VectorXd::Zero(nv);
  feas.rows = p.rows;
  feas.lower = p.lower;
  feas.upper = p.upper;
  SolveOutcome f = solve_lp(feas);
  if (f.status == SolveStatus::Infeasible) {
    out.status = SolveStatus::Infeasible;
    return out;
  }
  if (f.status != SolveStatus::Optimal)
    throw NumericalBreakdown("solve_qp: feasibility phase failed");

  NormalizedQP nq = normalize(p);
  const Eigen::Index me = nq.Aeq.rows();
  const Eigen::Index mi = nq.G.rows();

  Eigen::VectorXd x = f.x;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(me);

  if (mi == 0) {
    // Pure equality-constrained QP: one KKT solve.
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nv + me, nv + me);
    K.topLeftCorner(nv, nv) = p.Q;
    if (me > 0) {
      K.block(nv, 0, me, nv) = nq.Aeq;
      K.block(0, nv, nv, me) = nq.Aeq.transpose();
    }
    Eigen::VectorXd rhs(nv + me);
    rhs.head(nv) = -p.c;
    if (me > 0) rhs.segment(nv, me) = nq.beq;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(K);
    Eigen::VectorXd sol = cod.solve(rhs);
    x = sol.head(nv);
    y = sol.tail(me);
    Eigen::VectorXd resid = K * sol - rhs;
    if (resid.cwiseAbs().maxCoeff() > 1e-7 * (1.0 + rhs.cwiseAbs().maxCoeff())) {
      out.status = SolveStatus::Unbounded;
      return out;
    }
  } else {
    Eigen::VectorXd s(mi), z(mi);
    const Eigen::Index dim = nv + me + mi;
    bool unbounded = false;

    auto run_ipm = [&](const Eigen::MatrixXd& Q) -> bool {
      x = f.x;
      y.setZero();
      for (Eigen::Index i = 0; i < mi; ++i) {
        const double slack = nq.h(i) - nq.G.row(i).dot(x);
        s(i) = std::max(slack, 1.0);
        z(i) = 1.0;
      }
      double best_mu = kInf;
      int stall = 0;
      bool centering = false;
      for (int iter = 0; iter < 120; ++iter) {
        ++out.iterations;
        Eigen::VectorXd rd = Q * x + p.c + nq.G.transpose() * z;
        if (me > 0) rd += nq.Aeq.transpose() * y;
        Eigen::VectorXd rp = (me > 0) ? Eigen::VectorXd(nq.Aeq * x - nq.beq)
                                      : Eigen::VectorXd(0);
        Eigen::VectorXd rg = nq.G * x + s - nq.h;
        const double mu = s.dot(z) / static_cast<double>(mi);
        const double rscale = 1.0 + p.c.cwiseAbs().maxCoeff() +
                              nq.h.cwiseAbs().maxCoeff();
        const double rinf = std::max({rd.cwiseAbs().maxCoeff(),
                                      me > 0 ? rp.cwiseAbs().maxCoeff() : 0.0,
                                      rg.cwiseAbs().maxCoeff()});
        if (mu < 1e-12 && rinf < 1e-10 * rscale) return true;
        if (x.cwiseAbs().maxCoeff() > 1e13) {
          unbounded = true;
          return false;
        }

        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
        M.topLeftCorner(nv, nv) = Q;
        M.topLeftCorner(nv, nv).diagonal().array() += 1e-12;
        if (me > 0) {
          M.block(nv, 0, me, nv) = nq.Aeq;
          M.block(0, nv, nv, me) = nq.Aeq.transpose();
        }
        M.block(nv + me, 0, mi, nv) = nq.G;
        M.block(0, nv + me, nv, mi) = nq.G.transpose();
        for (Eigen::Index i = 0; i < mi; ++i)
          M(nv + me + i, nv + me + i) = -s(i) / z(i);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);

        auto solve_step = [&](const Eigen::VectorXd& rc) {
          Eigen::VectorXd rhs(dim);
          rhs.head(nv) = -rd;
          if (me > 0) rhs.segment(nv, me) = -rp;
          rhs.tail(mi) = -rg - rc.cwiseQuotient(z);
          return Eigen::VectorXd(lu.solve(rhs));
        };
        auto max_step = [](const Eigen::VectorXd& v,
                           const Eigen::VectorXd& dv) {
          double a = 1.0;
          for (Eigen::Index i = 0; i < v.size(); ++i)
            if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
          return a;
        };

        // predictor
        Eigen::VectorXd rc_aff = -s.cwiseProduct(z);
        Eigen::VectorXd step = solve_step(rc_aff);
        Eigen::VectorXd dx = step.head(nv), dz = step.tail(mi);
        Eigen::VectorXd ds = -rg - nq.G * dx;
        const double a_aff = std::min(max_step(s, ds), max_step(z, dz));
        const double mu_aff =
            (s + a_aff * ds).dot(z + a_aff * dz) / static_cast<double>(mi);
        double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);
        sigma = std::clamp(sigma, 0.0, 1.0);

        // Degenerate vertices can trap the predictor-corrector in a cycle
        // where the gap stops shrinking; damped centering steps escape it.
        if (mu < 0.9 * best_mu) {
          best_mu = mu;
          stall = 0;
        } else if (++stall >= 4) {
          centering = true;
        }

        Eigen::VectorXd rc;
        if (centering) {
          sigma = 0.5;
          rc = -s.cwiseProduct(z) +
               Eigen::VectorXd::Constant(mi, sigma * mu);
        } else {
          // corrector
          rc = -s.cwiseProduct(z) - ds.cwiseProduct(dz) +
               Eigen::VectorXd::Constant(mi, sigma * mu);
        }
        step = solve_step(rc);
        dx = step.head(nv);
        Eigen::VectorXd dy = (me > 0) ? Eigen::VectorXd(step.segment(nv, me))
                                      : Eigen::VectorXd(0);
        dz = step.tail(mi);
        ds = -rg - nq.G * dx;

        const double alpha =
            0.995 * std::min(max_step(s, ds), max_step(z, dz));
        x += alpha * dx;
        if (me > 0) y += alpha * dy;
        z += alpha * dz;
        s += alpha * ds;
        for (Eigen::Index i = 0; i < mi; ++i) {
          s(i) = std::max(s(i), 1e-300);
          z(i) = std::max(z(i), 1e-300);
        }
      }
      return false;
    };

    bool converged = run_ipm(p.Q);
    if (unbounded) {
      out.status = SolveStatus::Unbounded;
      out.x = x;
      return out;
    }

    Eigen::VectorXd xp, yp, zp;
    bool polished = polish(p, nq, x, s, z, xp, yp, zp);
    if (!polished && !converged) {
      // Degenerate optimal faces with a singular Q can stall the central
      // path; a tiny diagonal shift restores strict convexity and the
      // polish against the unshifted data recovers the exact optimum.
      Eigen::MatrixXd Qreg = p.Q;
      Qreg.diagonal().array() +=
          1e-8 * (1.0 + p.Q.cwiseAbs().maxCoeff());
      run_ipm(Qreg);
      if (!unbounded) polished = polish(p, nq, x, s, z, xp, yp, zp);
      converged = false;
    }
    if (polished) {
      x = xp;
      y = yp;
      z = zp;
    } else if (!converged) {
      out.status = SolveStatus::IterationLimit;
      out.x = x;
      out.objective = 0.5 * x.dot(p.Q * x) + p.c.dot(x);
      return out;
    }

    // Map inequality multipliers back to rows / bounds.
    out.reduced_costs = Eigen::VectorXd::Zero(nv);
    out.row_duals = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.rows.size()));
    for (Eigen::Index i = 0; i < mi; ++i) {
      if (nq.ineq_row[i] >= 0)
        out.row_duals(nq.ineq_row[i]) = z(i);
      else
        out.reduced_costs(nq.bound_var[i]) += nq.bound_dir[i] == -1
                                                  ? z(i)
                                                  : -z(i);
    }
    for (Eigen::Index i = 0; i < me; ++i) {
      if (nq.eq_row[i] >= 0)
        out.row_duals(nq.eq_row[i]) = y(i);
      else
        out.reduced_costs(nq.eq_bound_var[i]) -= y(i);
    }
    out.status = SolveStatus::Optimal;
    out.x = x;
    out.objective = 0.5 * x.dot(p.Q * x) + p.c.dot(x);
    return out;
  }

  out.status = SolveStatus::Optimal;
  out.x = x;
  out.row_duals = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.rows.size()));
  out.reduced_costs = Eigen::VectorXd::Zero(nv);
  for (Eigen::Index i = 0; i < me; ++i) {
    if (nq.eq_row[i] >= 0)
      out.row_duals(nq.eq_row[i]) = y(i);
    else
      out.reduced_costs(nq.eq_bound_var[i]) -= y(i);
  }
  out.objective = 0.5 * x.dot(p.Q * x) + p.c.dot(x);
  return out;
}

// Interior-point methods need a strictly feasible inequality system, but the
// branch-and-bound nodes routinely pin variables and chain singleton rows
// into implicit equalities. The presolve removes those: singleton rows fold
// into bounds, pinched variables are fixed and substituted out, repeated to
// a fixed point.
struct Presolve {
  static constexpr double kFeasTol = 1e-9;
  static constexpr double kPinchTol = 1e-11;

  enum class RowState { Kept, Dropped, AsBound };

  const QPProblem* orig = nullptr;
  bool infeasible = false;
  std::vector<char> fixed;
  Eigen::VectorXd value;  // per original variable, valid when fixed
  Eigen::VectorXd lower, upper;
  std::vector<int> lb_src, ub_src;  // row that set the bound, -1 = own bound
  std::vector<LinearRow> rows;      // working copy, fixed vars substituted
  std::vector<RowState> state;
  std::vector<int> free_of;  // original var -> reduced index (-1 fixed)
  std::vector<int> var_of;   // reduced index -> original var
  std::vector<int> kept_of;  // original row -> reduced row index

  void fix_var(Eigen::Index j, double v) {
    fixed[static_cast<size_t>(j)] = 1;
    value(j) = v;
    for (size_t r = 0; r < rows.size(); ++r) {
      if (state[r] != RowState::Kept) continue;
      if (rows[r].a(j) != 0.0) {
        rows[r].b -= rows[r].a(j) * v;
        rows[r].a(j) = 0.0;
      }
    }
  }

  void tighten_lower(Eigen::Index j, double v, int src) {
    if (v > lower(j)) {
      lower(j) = v;
      lb_src[static_cast<size_t>(j)] = src;
    }
  }
  void tighten_upper(Eigen::Index j, double v, int src) {
    if (v < upper(j)) {
      upper(j) = v;
      ub_src[static_cast<size_t>(j)] = src;
    }
  }

  void run(const QPProblem& p) {
    orig = &p;
    const Eigen::Index nv = p.n();
    fixed.assign(static_cast<size_t>(nv), 0);
    value = Eigen::VectorXd::Zero(nv);
    lower = p.lower;
    upper = p.upper;
    lb_src.assign(static_cast<size_t>(nv), -1);
    ub_src.assign(static_cast<size_t>(nv), -1);
    rows = p.rows;
    state.assign(rows.size(), RowState::Kept);

    bool changed = true;
    while (changed && !infeasible) {
      changed = false;
      for (size_t r = 0; r < rows.size(); ++r) {
        if (state[r] != RowState::Kept) continue;
        Eigen::Index nnz = 0, col = -1;
        for (Eigen::Index j = 0; j < nv; ++j)
          if (!fixed[static_cast<size_t>(j)] && rows[r].a(j) != 0.0) {
            ++nnz;
            col = j;
          }
        if (nnz >= 2) continue;
        changed = true;
        if (nnz == 0) {
          const double b = rows[r].b;
          const bool ok = rows[r].sense == RowSense::LE   ? b >= -kFeasTol
                          : rows[r].sense == RowSense::GE ? b <= kFeasTol
                                                          : std::abs(b) <= kFeasTol;
          if (!ok) infeasible = true;
          state[r] = RowState::Dropped;
          continue;
        }
        const double a = rows[r].a(col);
        const double v = rows[r].b / a;
        const int src = static_cast<int>(r);
        switch (rows[r].sense) {
          case RowSense::LE:
            if (a > 0.0) tighten_upper(col, v, src);
            else tighten_lower(col, v, src);
            break;
          case RowSense::GE:
            if (a > 0.0) tighten_lower(col, v, src);
            else tighten_upper(col, v, src);
            break;
          case RowSense::EQ:
            tighten_lower(col, v, src);
            tighten_upper(col, v, src);
            break;
        }
        state[r] = RowState::AsBound;
      }
      for (Eigen::Index j = 0; j < nv && !infeasible; ++j) {
        if (fixed[static_cast<size_t>(j)]) continue;
        if (!std::isfinite(lower(j)) || !std::isfinite(upper(j))) continue;
        const double width_tol = kPinchTol * (1.0 + std::abs(lower(j)));
        if (lower(j) > upper(j) + std::max(width_tol, kFeasTol)) {
          infeasible = true;
          break;
        }
        if (upper(j) - lower(j) <= width_tol) {
          fix_var(j, lower(j) == upper(j) ? lower(j)
                                          : 0.5 * (lower(j) + upper(j)));
          changed = true;
        }
      }
    }

    free_of.assign(static_cast<size_t>(nv), -1);
    for (Eigen::Index j = 0; j < nv; ++j)
      if (!fixed[static_cast<size_t>(j)]) {
        free_of[static_cast<size_t>(j)] = static_cast<int>(var_of.size());
        var_of.push_back(static_cast<int>(j));
      }
    kept_of.assign(rows.size(), -1);
  }

  QPProblem reduced() const {
    const QPProblem& p = *orig;
    const Eigen::Index nr = static_cast<Eigen::Index>(var_of.size());
    QPProblem q;
    q.resize(nr);
    for (Eigen::Index i = 0; i < nr; ++i) {
      const Eigen::Index oi = var_of[static_cast<size_t>(i)];
      q.lower(i) = lower(oi);
      q.upper(i) = upper(oi);
      q.c(i) = p.c(oi);
      for (Eigen::Index k = 0; k < p.n(); ++k)
        if (fixed[static_cast<size_t>(k)]) q.c(i) += p.Q(oi, k) * value(k);
      for (Eigen::Index k = 0; k < nr; ++k)
        q.Q(i, k) = p.Q(oi, var_of[static_cast<size_t>(k)]);
    }
    for (size_t r = 0; r < rows.size(); ++r) {
      if (state[r] != RowState::Kept) continue;
      LinearRow lr;
      lr.a.resize(nr);
      for (Eigen::Index i = 0; i < nr; ++i)
        lr.a(i) = rows[r].a(var_of[static_cast<size_t>(i)]);
      lr.sense = rows[r].sense;
      lr.b = rows[r].b;
      const_cast<Presolve*>(this)->kept_of[r] =
          static_cast<int>(q.rows.size());
      q.rows.push_back(std::move(lr));
    }
    return q;
  }
};

}  // namespace

SolveOutcome solve_qp(const QPProblem& p) {
  const Eigen::Index nv = p.n();
  const Eigen::Index nrow = static_cast<Eigen::Index>(p.rows.size());
  Presolve ps;
  ps.run(p);
  SolveOutcome out;
  if (ps.infeasible) {
    out.status = SolveStatus::Infeasible;
    return out;
  }

  QPProblem red = ps.reduced();
  SolveOutcome inner;
  if (red.n() == 0) {
    inner.status = SolveStatus::Optimal;
    inner.x.resize(0);
    inner.row_duals = Eigen::VectorXd::Zero(
        static_cast<Eigen::Index>(red.rows.size()));
    inner.reduced_costs.resize(0);
  } else {
    inner = solve_qp_reduced(red);
  }
  if (inner.status != SolveStatus::Optimal) {
    out.status = inner.status;
    if (inner.status == SolveStatus::Unbounded && inner.x.size() > 0) {
      out.ray = Eigen::VectorXd::Zero(nv);
      // only direction information survives the mapping
    }
    return out;
  }

  // Primal and objective on the original variables.
  out.x = Eigen::VectorXd::Zero(nv);
  for (Eigen::Index j = 0; j < nv; ++j)
    out.x(j) = ps.fixed[static_cast<size_t>(j)]
                   ? ps.value(j)
                   : inner.x(ps.free_of[static_cast<size_t>(j)]);
  out.objective = 0.5 * out.x.dot(p.Q * out.x) + p.c.dot(out.x);
  out.iterations = inner.iterations;

  // Dual recovery. Kept rows keep their multiplier; a row folded into a
  // bound inherits the bound multiplier of its variable (scaled by the
  // coefficient); dropped rows get zero.
  out.row_duals = Eigen::VectorXd::Zero(nrow);
  out.reduced_costs = Eigen::VectorXd::Zero(nv);
  for (Eigen::Index r = 0; r < nrow; ++r)
    if (ps.state[static_cast<size_t>(r)] == Presolve::RowState::Kept)
      out.row_duals(r) = inner.row_duals(ps.kept_of[static_cast<size_t>(r)]);
  for (Eigen::Index j = 0; j < nv; ++j) {
    if (ps.fixed[static_cast<size_t>(j)]) continue;
    const double rc = inner.reduced_costs(ps.free_of[static_cast<size_t>(j)]);
    if (rc == 0.0) continue;
    const int src = rc > 0.0 ? ps.lb_src[static_cast<size_t>(j)]
                             : ps.ub_src[static_cast<size_t>(j)];
    if (src < 0) {
      out.reduced_costs(j) = rc;
    } else {
      out.row_duals(src) = std::abs(rc) / std::abs(p.rows[static_cast<size_t>(src)].a(j));
    }
  }
  // Fixed variables absorb the stationarity residual through whichever
  // source pinned them.
  if (std::any_of(ps.fixed.begin(), ps.fixed.end(),
                  [](char f) { return f != 0; })) {
    Eigen::VectorXd grad = p.Q * out.x + p.c;
    for (Eigen::Index r = 0; r < nrow; ++r) {
      const double mu = out.row_duals(r);
      if (mu == 0.0) continue;
      const double sgn = p.rows[static_cast<size_t>(r)].sense == RowSense::GE
                             ? -1.0
                             : 1.0;
      grad += sgn * mu * p.rows[static_cast<size_t>(r)].a;
    }
    for (Eigen::Index j = 0; j < nv; ++j) {
      if (!ps.fixed[static_cast<size_t>(j)]) continue;
      const double resid = grad(j);
      if (resid == 0.0) continue;
      const int ls = ps.lb_src[static_cast<size_t>(j)];
      const int us = ps.ub_src[static_cast<size_t>(j)];
      auto try_row = [&](int src) {
        if (src < 0) return false;
        const auto& row = p.rows[static_cast<size_t>(src)];
        const double a = row.a(j);
        double mu = 0.0;
        switch (row.sense) {
          case RowSense::LE: mu = -resid / a; break;
          case RowSense::GE: mu = resid / a; break;
          case RowSense::EQ:
            out.row_duals(src) += -resid / a;
            return true;
        }
        if (mu < -1e-9) return false;
        out.row_duals(src) += std::max(mu, 0.0);
        return true;
      };
      if (ls >= 0 && ls == us) {
        try_row(ls);
      } else if (!try_row(resid > 0.0 ? ls : us) &&
                 !try_row(resid > 0.0 ? us : ls)) {
        out.reduced_costs(j) = resid;
      }
    }
  }
  out.status = SolveStatus::Optimal;
  return out;
}

}  // namespace flexkit
