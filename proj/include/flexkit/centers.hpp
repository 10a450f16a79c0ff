#pragma once

#include <Eigen/Dense>

#include "flexkit/model.hpp"

namespace flexkit {

enum class CenterMethod { Analytic, Arithmetic, Feasible };

const char* to_string(CenterMethod m);

struct CenterResult {
  Eigen::VectorXd theta_bar;
  Eigen::VectorXd recourse;  // z component of the centering point
  Eigen::VectorXd state;     // x component of the centering point
  CenterMethod method = CenterMethod::Feasible;
  double psi_at_center = 0.0;
  Eigen::VectorXd slacks;  // rhs_j - a_j.(theta,z,x) per inequality
};

// Maximizer of sum_j log s_j over f_j + s_j <= 0, h_i = 0; started from the
// feasible center. Throws NoInteriorPoint when no strictly interior point
// exists.
CenterResult analytic_center(const LinearSystem& system);

// Maximizer of sum_j s_j over the same region, with degenerate ties broken
// by the point closest to the feasible center. Throws UnboundedModel when
// the total slack grows without limit.
CenterResult arithmetic_center(const LinearSystem& system);

// Maximizer of the worst-case slack: argmax s with f_j + s <= 0, h_i = 0;
// equivalently argmin psi. Throws InfeasibleModel / UnboundedModel.
CenterResult feasible_center(const LinearSystem& system);

}  // namespace flexkit
