#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "flexkit/feasibility.hpp"
#include "flexkit/model.hpp"
#include "flexkit/sets.hpp"
#include "flexkit/solver.hpp"

namespace flexkit {

struct SolveStats {
  long nodes = 0;
  double seconds = 0.0;
};

struct FlexSolution {
  double F = 0.0;
  Eigen::VectorXd theta_star;
  Eigen::VectorXd z_star;
  Eigen::VectorXd x_star;
  Eigen::VectorXd lambda;  // per inequality, system order (0 for vacuous)
  Eigen::VectorXd mu;      // per equality
  Eigen::VectorXd slacks;  // s_j per inequality
  std::vector<std::string> active_labels;         // y = 1 and lambda > 1e-7
  std::vector<std::string> weakly_active_labels;  // y = 1, lambda ~ 0
  UncertaintySetSpec set_used;
  SolveStats stats;
  SolveStatus status = SolveStatus::Optimal;  // Optimal or NodeLimit
  double gap = 0.0;
};

// Smallest delta at which the uncertainty set touches the feasible-region
// boundary, via the KKT active-set mixed-binary program. Throws
// InfeasibleNominal when psi(nominal) > 1e-9 and UnboundedModel when no
// boundary exists to touch.
FlexSolution flexibility_index(const LinearSystem& system,
                               const UncertaintySetSpec& set,
                               const BnBConfig& config = BnBConfig{},
                               double feas_tol = 1e-8);

struct VerificationReport {
  long samples = 0;
  long violations_at_F = 0;  // psi > 1e-7 on the delta = F boundary
  double worst_psi_at_F = -kInf;
  long infeasible_at_inflated = 0;  // at delta = F (1 + 1e-3), advisory
};

VerificationReport verify_solution(const LinearSystem& system,
                                   const FlexSolution& sol, long samples,
                                   unsigned long long seed);

struct RankLevel {
  int level = 1;
  std::vector<std::string> labels;
  double F_value = 0.0;
  double increase_pct = 0.0;  // vs level 1; meaningless when level == 1
};

enum class RankTermination { MaxLevels, Unbounded, Exhausted };

const char* to_string(RankTermination t);

struct RankResult {
  std::vector<RankLevel> levels;
  RankTermination termination = RankTermination::MaxLevels;
};

// Iteratively removes the limiting constraints and re-solves; consecutive
// levels with F equal within 1e-6 relative are merged.
RankResult rank_constraints(const LinearSystem& system,
                            const UncertaintySetSpec& set, int max_levels,
                            const BnBConfig& config = BnBConfig{});

struct DesignEntry {
  std::string name;
  LinearSystem system;
};

struct CompareCell {
  bool ok = false;
  double F = 0.0;
  std::string error;
};

struct CompareRow {
  std::string name;
  std::vector<CompareCell> F;  // one per requested set, in order
  bool has_alpha = false;      // from the first ellipsoidal set's F
  double alpha_star = 0.0;
  bool has_sf = false;
  SFEstimate sf;
  std::string sf_error;
};

// One row per design: F per set, confidence level for the first ellipsoidal
// set, and an optional Monte Carlo SF column. Per-row failures are recorded
// instead of thrown.
std::vector<CompareRow> compare_designs(
    const std::vector<DesignEntry>& designs,
    const std::vector<UncertaintySetSpec>& sets,
    const GaussianSpec* mc = nullptr, long mc_samples = 0,
    unsigned long long seed = 0, const BnBConfig& config = BnBConfig{});

}  // namespace flexkit
