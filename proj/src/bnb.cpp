#include <algorithm>
#include <cmath>
#include <vector>

#include "flexkit/solver.hpp"

namespace flexkit {

namespace {

struct Node {
  std::vector<int> fixings;
  double bound;
};

}  // namespace

BnBResult branch_and_bound(const RelaxationSolver& relax, int n_binaries,
                           const BnBConfig& config) {
  BnBResult res;
  res.assignment.assign(n_binaries, -1);

  std::vector<Node> stack;
  stack.push_back({std::vector<int>(n_binaries, -1), -kInf});

  double incumbent = kInf;
  RelaxationResult best;
  std::vector<int> best_assign;
  double worst_open_bound = -kInf;
  bool hit_node_limit = false;

  auto prune_cut = [&](double bound) {
    return bound >= incumbent - std::max(config.abs_gap,
                                         config.rel_gap * std::abs(incumbent));
  };

  while (!stack.empty()) {
    if (res.nodes >= config.node_limit) {
      hit_node_limit = true;
      break;
    }
    Node node = std::move(stack.back());
    stack.pop_back();
    if (std::isfinite(incumbent) && prune_cut(node.bound)) continue;
    ++res.nodes;

    RelaxationResult r = relax(node.fixings);
    if (r.status == SolveStatus::Infeasible) continue;
    if (r.status == SolveStatus::Unbounded) {
      res.status = SolveStatus::Unbounded;
      res.incumbent = r;
      return res;
    }
    if (r.status != SolveStatus::Optimal)
      throw NumericalBreakdown("branch_and_bound: relaxation solve failed");
    if (std::isfinite(incumbent) && prune_cut(r.bound)) continue;

    // Most fractional binary, ties by lowest index.
    int branch_var = -1;
    double best_frac = config.int_tol;
    for (int j = 0; j < n_binaries; ++j) {
      const double v = r.binaries(j);
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > best_frac + 1e-15) {
        best_frac = frac;
        branch_var = j;
      }
    }

    if (branch_var < 0) {
      // integral
      if (r.bound < incumbent) {
        incumbent = r.bound;
        best = r;
        best_assign.resize(n_binaries);
        for (int j = 0; j < n_binaries; ++j)
          best_assign[j] = static_cast<int>(std::lround(r.binaries(j)));
      }
      continue;
    }

    Node zero{node.fixings, r.bound}, one{node.fixings, r.bound};
    zero.fixings[branch_var] = 0;
    one.fixings[branch_var] = 1;
    stack.push_back(std::move(zero));
    stack.push_back(std::move(one));  // explored first
  }

  if (!std::isfinite(incumbent)) {
    res.status = hit_node_limit ? SolveStatus::NodeLimit
                                : SolveStatus::Infeasible;
    return res;
  }
  if (hit_node_limit) {
    worst_open_bound = incumbent;
    for (const auto& nd : stack)
      worst_open_bound = std::min(worst_open_bound, nd.bound);
    res.gap = incumbent - worst_open_bound;
    res.status = SolveStatus::NodeLimit;
  } else {
    res.status = SolveStatus::Optimal;
    res.gap = 0.0;
  }
  res.objective = incumbent;
  res.incumbent = best;
  res.assignment = best_assign;
  return res;
}

}  // namespace flexkit
