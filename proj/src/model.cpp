#include "flexkit/model.hpp"

#include <cmath>
#include <map>

namespace flexkit {

namespace {

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

void check_lengths(const AffineConstraint& c, const LinearSystem& s,
                   std::vector<Diagnostic>& out) {
  if (c.theta.size() != s.n_theta() || c.recourse.size() != s.n_recourse() ||
      c.state.size() != s.n_state()) {
    out.push_back({DiagnosticKind::Error, c.label,
                   "coefficient vector lengths do not match system dimensions"});
  }
  if (!all_finite(c.theta) || !all_finite(c.recourse) || !all_finite(c.state) ||
      !std::isfinite(c.rhs)) {
    out.push_back({DiagnosticKind::Error, c.label,
                   "non-finite coefficient or rhs"});
  }
}

}  // namespace

const AffineConstraint* LinearSystem::find_inequality(
    const std::string& label) const {
  for (const auto& c : inequalities)
    if (c.label == label) return &c;
  return nullptr;
}

std::vector<Diagnostic> validate(const LinearSystem& system) {
  std::vector<Diagnostic> out;
  if (system.n_theta() < 1)
    out.push_back({DiagnosticKind::Error, "theta", "n_theta must be >= 1"});
  if (system.inequalities.empty())
    out.push_back({DiagnosticKind::Error, "inequalities",
                   "at least one inequality is required"});

  std::map<std::string, int> seen;
  auto check_label = [&](const AffineConstraint& c) {
    if (c.label.empty())
      out.push_back({DiagnosticKind::Error, c.label, "empty constraint label"});
    if (++seen[c.label] == 2)
      out.push_back({DiagnosticKind::Error, c.label,
                     "duplicate constraint label"});
  };

  for (const auto& c : system.inequalities) {
    check_label(c);
    check_lengths(c, system, out);
    if (c.theta.size() == system.n_theta() &&
        c.recourse.size() == system.n_recourse() &&
        c.state.size() == system.n_state()) {
      if (c.is_infeasible_row())
        out.push_back({DiagnosticKind::InfeasibleRow, c.label,
                       "all-zero inequality with negative rhs is "
                       "infeasible-by-construction"});
      else if (c.is_vacuous())
        out.push_back({DiagnosticKind::Vacuous, c.label,
                       "all-zero inequality with nonnegative rhs is vacuous"});
    }
  }
  for (const auto& c : system.equalities) {
    check_label(c);
    check_lengths(c, system, out);
  }
  return out;
}

LinearSystem eliminate_states(const LinearSystem& system) {
  const Eigen::Index nx = system.n_state();
  if (nx == 0) return system;
  const Eigen::Index m = static_cast<Eigen::Index>(system.equalities.size());
  if (m != nx)
    throw DimensionMismatch("eliminate_states: " + std::to_string(m) +
                            " equalities but " + std::to_string(nx) +
                            " states");

  // Equality block: Bx x = rhs - Bt theta - Bz z
  Eigen::MatrixXd Bx(m, nx), Bt(m, system.n_theta()), Bz(m, system.n_recourse());
  Eigen::VectorXd br(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& e = system.equalities[i];
    Bx.row(i) = e.state.transpose();
    Bt.row(i) = e.theta.transpose();
    Bz.row(i) = e.recourse.transpose();
    br(i) = e.rhs;
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(Bx);
  lu.setThreshold(1e-10);
  if (lu.rank() < nx)
    throw SingularElimination(
        "eliminate_states: state block is rank-deficient");

  // x = Bx^{-1} (br - Bt theta - Bz z); substitute into each inequality.
  Eigen::MatrixXd Xt = lu.solve(Bt);   // d x / d theta = -Xt
  Eigen::MatrixXd Xz = lu.solve(Bz);
  Eigen::VectorXd x0 = lu.solve(br);

  LinearSystem out;
  out.theta_names = system.theta_names;
  out.recourse_names = system.recourse_names;
  for (const auto& c : system.inequalities) {
    AffineConstraint nc;
    nc.label = c.label;
    nc.theta = c.theta - Xt.transpose() * c.state;
    nc.recourse = c.recourse - Xz.transpose() * c.state;
    nc.state = Eigen::VectorXd(0);
    nc.rhs = c.rhs - c.state.dot(x0);
    out.inequalities.push_back(std::move(nc));
  }
  return out;
}

LinearSystem apply_filter(const LinearSystem& system,
                          const ConstraintFilter& filter) {
  for (const auto& lbl : filter.excluded_labels) {
    if (system.find_inequality(lbl)) continue;
    for (const auto& e : system.equalities)
      if (e.label == lbl)
        throw EqualityExclusion("cannot exclude equality constraint '" + lbl +
                                "'");
    throw UnknownLabel("no inequality labeled '" + lbl + "'");
  }
  LinearSystem out = system;
  out.inequalities.clear();
  for (const auto& c : system.inequalities)
    if (!filter.excluded_labels.count(c.label)) out.inequalities.push_back(c);
  return out;
}

}  // namespace flexkit
