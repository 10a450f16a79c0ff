#pragma once

#include <Eigen/Dense>
#include <string>

#include "flexkit/model.hpp"

namespace flexkit {

// Tolerance under which a psi value counts as feasible.
inline constexpr double kPsiFeasTol = 1e-9;

struct GaussianSpec {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  bool truncated = false;  // rejection against the nonnegative orthant
};

struct SFEstimate {
  double estimate = 0.0;
  long samples = 0;
  double half_width = 0.0;  // 1.96 sqrt(p(1-p)/N)
  unsigned long long seed = 0;
};

// Worst constraint violation minimized over recourse and state at fixed
// theta: min u s.t. f_j <= u, h_i = 0. Negative means feasible with margin,
// +inf means the equalities are inconsistent at theta, -inf means some
// recourse ray improves every constraint without limit (note names it).
double psi(const LinearSystem& system, const Eigen::VectorXd& theta,
           std::string* note = nullptr);

// Fraction of Gaussian draws with psi <= kPsiFeasTol. Deterministic for a
// given seed. Throws ImpracticalTruncation when a truncated spec accepts
// fewer than 1e-3 of 10^4 pilot draws.
SFEstimate stochastic_flexibility(const LinearSystem& system,
                                  const GaussianSpec& dist, long samples,
                                  unsigned long long seed);

}  // namespace flexkit
