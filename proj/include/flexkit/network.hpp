#pragma once

#include <string>
#include <vector>

#include "flexkit/flex.hpp"
#include "flexkit/model.hpp"

namespace flexkit {

struct Arc {
  std::string id;
  std::string from;
  std::string to;
  double capacity = 0.0;  // -capacity <= flow <= capacity
};

struct Supplier {
  std::string id;
  std::string node;
  double capacity = 0.0;  // 0 <= supply <= capacity
};

struct Demand {
  std::string id;
  std::string node;
  bool uncertain = true;
  double fixed_value = 0.0;  // used when not uncertain
};

struct NetworkModel {
  std::vector<std::string> nodes;
  std::vector<Arc> arcs;
  std::vector<Supplier> suppliers;
  std::vector<Demand> demands;
};

std::vector<Diagnostic> validate_network(const NetworkModel& net);

// One balance equality per node; two capacity inequalities per arc
// ("lambda_L:<id>", "lambda_U:<id>") and per supplier ("gamma_L:<id>",
// "gamma_U:<id>"); theta = uncertain demands, z = arc flows then supplies.
LinearSystem build_system(const NetworkModel& net);

struct ComponentRank {
  std::string id;
  std::string kind;  // "arc" or "supplier"
  bool ranked = false;
  int level = 0;
  double F = 0.0;
  std::vector<std::string> labels;  // ranked constraint labels of this part
};

struct ComponentRankMap {
  std::vector<ComponentRank> components;  // arcs first, then suppliers
};

// Maps ranked constraint labels back onto arcs/suppliers; a component's rank
// is the lowest level touching any of its labels.
ComponentRankMap component_rank_map(const NetworkModel& net,
                                    const std::vector<RankLevel>& ranks);

// Graphviz digraph with components colored along a fixed gradient keyed by
// F across the ranked components; unranked parts are gray. Deterministic.
std::string emit_dot(const NetworkModel& net, const ComponentRankMap& map);

}  // namespace flexkit
