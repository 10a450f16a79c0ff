#pragma once

#include <Eigen/Dense>
#include <set>
#include <string>
#include <vector>

#include "flexkit/errors.hpp"

namespace flexkit {

// One affine row a_theta.theta + a_z.z + a_x.x - rhs {<=,=} 0,
// stored in the LP-standard orientation a.v <= rhs / a.v = rhs.
struct AffineConstraint {
  std::string label;
  Eigen::VectorXd theta;
  Eigen::VectorXd recourse;
  Eigen::VectorXd state;
  double rhs = 0.0;

  bool is_vacuous() const {
    return theta.isZero(0.0) && recourse.isZero(0.0) && state.isZero(0.0) &&
           rhs >= 0.0;
  }
  bool is_infeasible_row() const {
    return theta.isZero(0.0) && recourse.isZero(0.0) && state.isZero(0.0) &&
           rhs < 0.0;
  }
};

// Linear constrained system with uncertain parameters theta, recourse z and
// states x. Immutable after construction; transformations return new values.
struct LinearSystem {
  std::vector<std::string> theta_names;
  std::vector<std::string> recourse_names;
  std::vector<std::string> state_names;
  std::vector<AffineConstraint> inequalities;
  std::vector<AffineConstraint> equalities;

  Eigen::Index n_theta() const {
    return static_cast<Eigen::Index>(theta_names.size());
  }
  Eigen::Index n_recourse() const {
    return static_cast<Eigen::Index>(recourse_names.size());
  }
  Eigen::Index n_state() const {
    return static_cast<Eigen::Index>(state_names.size());
  }

  const AffineConstraint* find_inequality(const std::string& label) const;
};

struct ConstraintFilter {
  std::set<std::string> excluded_labels;
};

enum class DiagnosticKind { Error, Vacuous, InfeasibleRow };

struct Diagnostic {
  DiagnosticKind kind;
  std::string subject;  // label or field name
  std::string message;
};

// Empty result means every structural invariant holds and no row is
// degenerate. Vacuous/infeasible-by-construction rows are reported as flags.
std::vector<Diagnostic> validate(const LinearSystem& system);

// Substitutes the states out of the system using the equality block, which
// must be square and nonsingular in x. The result has n_x = 0 and no
// equalities; inequality labels survive unchanged.
LinearSystem eliminate_states(const LinearSystem& system);

// Drops the excluded inequalities, leaving everything else untouched.
LinearSystem apply_filter(const LinearSystem& system,
                          const ConstraintFilter& filter);

}  // namespace flexkit
