#include <cmath>
#include <sstream>

#include "flexkit/centers.hpp"
#include "flexkit/feasibility.hpp"
#include "flexkit/solver.hpp"

namespace flexkit {

const char* to_string(CenterMethod m) {
  switch (m) {
    case CenterMethod::Analytic: return "analytic";
    case CenterMethod::Arithmetic: return "arithmetic";
    case CenterMethod::Feasible: return "feasible";
  }
  return "?";
}

namespace {

Eigen::VectorXd full_coeffs(const LinearSystem& sys,
                            const AffineConstraint& c) {
  Eigen::VectorXd a(sys.n_theta() + sys.n_recourse() + sys.n_state());
  a << c.theta, c.recourse, c.state;
  return a;
}

// Vacuous rows contribute a constant slack and are left out of the center
// problems; an infeasible-by-construction row rules the region empty.
std::vector<const AffineConstraint*> active_rows(const LinearSystem& sys) {
  std::vector<const AffineConstraint*> rows;
  for (const auto& f : sys.inequalities) {
    if (f.is_infeasible_row())
      throw InfeasibleModel("center: inequality '" + f.label +
                            "' is infeasible by construction");
    if (!f.is_vacuous()) rows.push_back(&f);
  }
  return rows;
}

CenterResult finish(const LinearSystem& sys, const Eigen::VectorXd& v,
                    CenterMethod method) {
  CenterResult res;
  res.method = method;
  res.theta_bar = v.head(sys.n_theta());
  res.recourse = v.segment(sys.n_theta(), sys.n_recourse());
  res.state = v.tail(sys.n_state());
  res.slacks.resize(static_cast<Eigen::Index>(sys.inequalities.size()));
  for (size_t j = 0; j < sys.inequalities.size(); ++j)
    res.slacks(static_cast<Eigen::Index>(j)) =
        sys.inequalities[j].rhs - full_coeffs(sys, sys.inequalities[j]).dot(v);
  res.psi_at_center = psi(sys, res.theta_bar);
  return res;
}

std::string ray_text(const Eigen::VectorXd& ray, Eigen::Index head) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < head; ++i) os << (i ? ", " : "") << ray(i);
  os << ")";
  return os.str();
}

}  // namespace

CenterResult feasible_center(const LinearSystem& system) {
  const Eigen::Index nv =
      system.n_theta() + system.n_recourse() + system.n_state();
  auto rows = active_rows(system);
  if (rows.empty())
    throw UnboundedModel(
        "feasible_center: no binding inequalities, worst-case slack is "
        "unbounded");

  // Variables (v, s); maximize s with a_j.v + s <= rhs_j, h_i = 0.
  LPProblem lp;
  lp.resize(nv + 1);
  lp.c(nv) = -1.0;
  for (const auto* f : rows) {
    LinearRow r;
    r.a = Eigen::VectorXd::Zero(nv + 1);
    r.a.head(nv) = full_coeffs(system, *f);
    r.a(nv) = 1.0;
    r.sense = RowSense::LE;
    r.b = f->rhs;
    lp.rows.push_back(std::move(r));
  }
  for (const auto& h : system.equalities) {
    LinearRow r;
    r.a = Eigen::VectorXd::Zero(nv + 1);
    r.a.head(nv) = full_coeffs(system, h);
    r.sense = RowSense::EQ;
    r.b = h.rhs;
    lp.rows.push_back(std::move(r));
  }

  SolveOutcome out = solve_lp(lp);
  if (out.status == SolveStatus::Infeasible)
    throw InfeasibleModel("feasible_center: system admits no point");
  if (out.status == SolveStatus::Unbounded)
    throw UnboundedModel("feasible_center: slack unbounded along ray " +
                         ray_text(out.ray, nv));
  if (out.status != SolveStatus::Optimal)
    throw NumericalBreakdown("feasible_center: LP failed");
  return finish(system, out.x.head(nv), CenterMethod::Feasible);
}

CenterResult analytic_center(const LinearSystem& system) {
  const Eigen::Index nv =
      system.n_theta() + system.n_recourse() + system.n_state();
  auto rows = active_rows(system);
  CenterResult fc = feasible_center(system);
  Eigen::VectorXd start(nv);
  start << fc.theta_bar, fc.recourse, fc.state;

  BarrierProblem bp;
  bp.A.resize(static_cast<Eigen::Index>(rows.size()), nv);
  bp.b.resize(static_cast<Eigen::Index>(rows.size()));
  for (size_t j = 0; j < rows.size(); ++j) {
    bp.A.row(static_cast<Eigen::Index>(j)) =
        full_coeffs(system, *rows[j]).transpose();
    bp.b(static_cast<Eigen::Index>(j)) = rows[j]->rhs;
  }
  bp.E.resize(static_cast<Eigen::Index>(system.equalities.size()), nv);
  bp.f.resize(static_cast<Eigen::Index>(system.equalities.size()));
  for (size_t i = 0; i < system.equalities.size(); ++i) {
    bp.E.row(static_cast<Eigen::Index>(i)) =
        full_coeffs(system, system.equalities[i]).transpose();
    bp.f(static_cast<Eigen::Index>(i)) = system.equalities[i].rhs;
  }

  if ((bp.b - bp.A * start).minCoeff() <= 0.0)
    throw NoInteriorPoint("analytic_center: no strictly interior point");
  Eigen::VectorXd v;
  try {
    v = newton_barrier_max(bp, start);
  } catch (const FlexError& e) {
    throw NoInteriorPoint(std::string("analytic_center: ") + e.what());
  }
  return finish(system, v, CenterMethod::Analytic);
}

CenterResult arithmetic_center(const LinearSystem& system) {
  const Eigen::Index nv =
      system.n_theta() + system.n_recourse() + system.n_state();
  auto rows = active_rows(system);
  CenterResult fc = feasible_center(system);
  Eigen::VectorXd fc_point(nv);
  fc_point << fc.theta_bar, fc.recourse, fc.state;

  // Total slack sum_j (rhs_j - a_j.v) is affine in v; maximize it over the
  // feasible region.
  LPProblem lp;
  lp.resize(nv);
  for (const auto* f : rows) {
    lp.c += full_coeffs(system, *f);
    LinearRow r;
    r.a = full_coeffs(system, *f);
    r.sense = RowSense::LE;
    r.b = f->rhs;
    lp.rows.push_back(std::move(r));
  }
  for (const auto& h : system.equalities) {
    LinearRow r;
    r.a = full_coeffs(system, h);
    r.sense = RowSense::EQ;
    r.b = h.rhs;
    lp.rows.push_back(std::move(r));
  }

  SolveOutcome out = solve_lp(lp);
  if (out.status == SolveStatus::Infeasible)
    throw InfeasibleModel("arithmetic_center: system admits no point");
  if (out.status == SolveStatus::Unbounded)
    throw UnboundedModel("arithmetic_center: total slack unbounded along ray " +
                         ray_text(out.ray, nv));
  if (out.status != SolveStatus::Optimal)
    throw NumericalBreakdown("arithmetic_center: LP failed");

  // The optimum may be a face; pick its point closest to the feasible
  // center so the result is unique and deterministic.
  QPProblem qp;
  qp.resize(nv);
  qp.Q = Eigen::MatrixXd::Identity(nv, nv);
  qp.c = -fc_point;
  qp.rows = lp.rows;
  LinearRow level;
  level.a = lp.c;
  level.sense = RowSense::EQ;
  level.b = out.objective;
  qp.rows.push_back(std::move(level));

  SolveOutcome pick = solve_qp(qp);
  if (pick.status != SolveStatus::Optimal)
    throw NumericalBreakdown("arithmetic_center: tie-break QP failed");
  return finish(system, pick.x, CenterMethod::Arithmetic);
}

}  // namespace flexkit
