#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "flexkit/errors.hpp"

namespace flexkit {

struct UncertaintySetSpec;

// delta is the squared Mahalanobis level: (theta - mean)' V^-1 (theta - mean) <= delta
struct Ellipsoid {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

// mean - delta*dev_minus <= theta <= mean + delta*dev_plus
struct Hyperbox {
  Eigen::VectorXd mean;
  Eigen::VectorXd dev_minus;
  Eigen::VectorXd dev_plus;
};

// ||theta - mean||_p <= delta, p in {1, 2, inf}
struct PNorm {
  Eigen::VectorXd mean;
  double p = 2.0;  // use infinity() for the max norm
};

// <<theta - mean>>_alpha <= delta
struct CVaRNorm {
  Eigen::VectorXd mean;
  double alpha = 0.0;
};

// A theta <= b, independent of delta (truncations)
struct Halfspaces {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

struct Intersection {
  std::vector<UncertaintySetSpec> members;
};

struct UncertaintySetSpec {
  std::variant<Ellipsoid, Hyperbox, PNorm, CVaRNorm, Halfspaces, Intersection>
      value;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&value);
  }
};

// CVaR norm <<x>>_alpha = min_{t>=0} { t(1-alpha)n + sum_i max(|x_i|-t, 0) };
// reproduces the l1 norm at alpha=0 and the max norm at alpha=(n-1)/n.
double cvar_norm(const Eigen::VectorXd& x, double alpha);

// Throws (DimensionMismatch, NonCompactComposite, InputError) on violations.
void validate_spec(const UncertaintySetSpec& spec);

int dimension(const UncertaintySetSpec& spec);

// Shared nominal point; throws for a pure Halfspaces spec.
Eigen::VectorXd nominal_point(const UncertaintySetSpec& spec);

// Smallest delta at which theta belongs to the set (+inf outside a
// delta-independent member). membership(spec, theta, d) == set_value <= d.
double set_value(const UncertaintySetSpec& spec, const Eigen::VectorXd& theta);

bool membership(const UncertaintySetSpec& spec, const Eigen::VectorXd& theta,
                double delta);

struct CompiledRow {
  Eigen::VectorXd a_theta;
  double c_delta = 0.0;
  Eigen::VectorXd a_aux;  // over the full auxiliary block
  double rhs = 0.0;       // a_theta.theta + c_delta*delta + a_aux.aux <= rhs
};

enum class QuadKind { MahalanobisLevel, RadiusSq };

struct QuadConstraint {
  QuadKind kind;
  Eigen::MatrixXd inv;  // V^-1 (Mahalanobis) or I (radius)
  Eigen::VectorXd center;
};

struct CompiledSetConstraints {
  int n_theta = 0;
  int n_aux = 0;
  std::vector<CompiledRow> rows;
  Eigen::VectorXd aux_lower;  // -inf or 0 per auxiliary
  std::vector<QuadConstraint> quads;

  bool delta_in_rows() const {
    for (const auto& r : rows)
      if (r.c_delta != 0.0) return true;
    return false;
  }
};

CompiledSetConstraints compile(const UncertaintySetSpec& spec);

// Deterministic boundary points: set-defining value delta within 1e-9 for
// simple sets; for intersections, inside at delta and outside at
// delta*(1 - 1e-6).
std::vector<Eigen::VectorXd> boundary_sample(const UncertaintySetSpec& spec,
                                             double delta, int count,
                                             unsigned long long seed);

// Regularized lower incomplete gamma at (n_theta/2, F/2): the Gaussian
// confidence level attached to an ellipsoidal flexibility index.
double confidence_level(double flex_index, int n_theta);

}  // namespace flexkit
