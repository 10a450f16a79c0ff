#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "flexkit/network.hpp"

namespace flexkit {

namespace {

void check_unique(const std::vector<std::string>& ids, const char* what,
                  std::vector<Diagnostic>& out) {
  std::set<std::string> seen;
  for (const auto& id : ids)
    if (!seen.insert(id).second)
      out.push_back({DiagnosticKind::Error, id,
                     std::string(what) + " identifier appears twice"});
}

}  // namespace

std::vector<Diagnostic> validate_network(const NetworkModel& net) {
  std::vector<Diagnostic> out;
  std::set<std::string> nodes(net.nodes.begin(), net.nodes.end());
  check_unique(net.nodes, "node", out);
  {
    std::vector<std::string> ids;
    for (const auto& a : net.arcs) ids.push_back(a.id);
    check_unique(ids, "arc", out);
    ids.clear();
    for (const auto& s : net.suppliers) ids.push_back(s.id);
    check_unique(ids, "supplier", out);
    ids.clear();
    for (const auto& d : net.demands) ids.push_back(d.id);
    check_unique(ids, "demand", out);
  }
  for (const auto& a : net.arcs) {
    if (!nodes.count(a.from))
      out.push_back({DiagnosticKind::Error, a.id,
                     "arc endpoint '" + a.from + "' is not a node"});
    if (!nodes.count(a.to))
      out.push_back({DiagnosticKind::Error, a.id,
                     "arc endpoint '" + a.to + "' is not a node"});
    if (!(a.capacity > 0.0) || !std::isfinite(a.capacity))
      out.push_back({DiagnosticKind::Error, a.id,
                     "arc capacity must be finite and positive"});
  }
  for (const auto& s : net.suppliers) {
    if (!nodes.count(s.node))
      out.push_back({DiagnosticKind::Error, s.id,
                     "supplier node '" + s.node + "' is not a node"});
    if (!(s.capacity > 0.0) || !std::isfinite(s.capacity))
      out.push_back({DiagnosticKind::Error, s.id,
                     "supplier capacity must be finite and positive"});
  }
  bool any_uncertain = false;
  for (const auto& d : net.demands) {
    if (!nodes.count(d.node))
      out.push_back({DiagnosticKind::Error, d.id,
                     "demand node '" + d.node + "' is not a node"});
    if (d.uncertain) any_uncertain = true;
  }
  if (!any_uncertain)
    out.push_back({DiagnosticKind::Error, "demands",
                   "at least one demand must be uncertain"});
  return out;
}

LinearSystem build_system(const NetworkModel& net) {
  for (const auto& d : validate_network(net))
    if (d.kind == DiagnosticKind::Error)
      throw InputError("network '" + d.subject + "': " + d.message);

  LinearSystem sys;
  for (const auto& d : net.demands)
    if (d.uncertain) sys.theta_names.push_back(d.id);
  for (const auto& a : net.arcs) sys.recourse_names.push_back(a.id);
  for (const auto& s : net.suppliers) sys.recourse_names.push_back(s.id);

  const Eigen::Index nt = sys.n_theta();
  const Eigen::Index nz = sys.n_recourse();
  std::map<std::string, Eigen::Index> theta_of;
  for (Eigen::Index i = 0; i < nt; ++i) theta_of[sys.theta_names[i]] = i;
  const Eigen::Index n_arcs = static_cast<Eigen::Index>(net.arcs.size());

  auto blank = [&](const std::string& label) {
    AffineConstraint c;
    c.label = label;
    c.theta = Eigen::VectorXd::Zero(nt);
    c.recourse = Eigen::VectorXd::Zero(nz);
    c.state = Eigen::VectorXd::Zero(0);
    return c;
  };

  // Balance per node: inflow - outflow + supply - demand = 0.
  for (const auto& node : net.nodes) {
    AffineConstraint h = blank("balance:" + node);
    for (Eigen::Index k = 0; k < n_arcs; ++k) {
      if (net.arcs[static_cast<size_t>(k)].to == node) h.recourse(k) += 1.0;
      if (net.arcs[static_cast<size_t>(k)].from == node) h.recourse(k) -= 1.0;
    }
    for (size_t b = 0; b < net.suppliers.size(); ++b)
      if (net.suppliers[b].node == node)
        h.recourse(n_arcs + static_cast<Eigen::Index>(b)) += 1.0;
    for (const auto& d : net.demands) {
      if (d.node != node) continue;
      if (d.uncertain)
        h.theta(theta_of.at(d.id)) -= 1.0;
      else
        h.rhs += d.fixed_value;
    }
    sys.equalities.push_back(std::move(h));
  }

  for (Eigen::Index k = 0; k < n_arcs; ++k) {
    const auto& a = net.arcs[static_cast<size_t>(k)];
    AffineConstraint up = blank("lambda_U:" + a.id);
    up.recourse(k) = 1.0;
    up.rhs = a.capacity;
    sys.inequalities.push_back(std::move(up));
    AffineConstraint lo = blank("lambda_L:" + a.id);
    lo.recourse(k) = -1.0;
    lo.rhs = a.capacity;
    sys.inequalities.push_back(std::move(lo));
  }
  for (size_t b = 0; b < net.suppliers.size(); ++b) {
    const auto& s = net.suppliers[b];
    const Eigen::Index col = n_arcs + static_cast<Eigen::Index>(b);
    AffineConstraint up = blank("gamma_U:" + s.id);
    up.recourse(col) = 1.0;
    up.rhs = s.capacity;
    sys.inequalities.push_back(std::move(up));
    AffineConstraint lo = blank("gamma_L:" + s.id);
    lo.recourse(col) = -1.0;
    lo.rhs = 0.0;
    sys.inequalities.push_back(std::move(lo));
  }
  return sys;
}

ComponentRankMap component_rank_map(const NetworkModel& net,
                                    const std::vector<RankLevel>& ranks) {
  ComponentRankMap map;
  std::map<std::string, size_t> of_label;  // component id keyed by label
  for (const auto& a : net.arcs) {
    ComponentRank c;
    c.id = a.id;
    c.kind = "arc";
    of_label["lambda_L:" + a.id] = map.components.size();
    of_label["lambda_U:" + a.id] = map.components.size();
    map.components.push_back(std::move(c));
  }
  for (const auto& s : net.suppliers) {
    ComponentRank c;
    c.id = s.id;
    c.kind = "supplier";
    of_label["gamma_L:" + s.id] = map.components.size();
    of_label["gamma_U:" + s.id] = map.components.size();
    map.components.push_back(std::move(c));
  }
  for (const auto& lv : ranks) {
    for (const auto& lab : lv.labels) {
      auto it = of_label.find(lab);
      if (it == of_label.end())
        throw UnknownLabel("component_rank_map: label '" + lab +
                           "' does not name an arc or supplier bound");
      auto& c = map.components[it->second];
      if (!c.ranked || lv.level < c.level) {
        c.ranked = true;
        c.level = lv.level;
        c.F = lv.F_value;
      }
      c.labels.push_back(lab);
    }
  }
  return map;
}

namespace {

std::string gradient_color(double t) {
  // deep red (most limiting) to light blue, componentwise linear
  const int r0 = 0xd7, g0 = 0x30, b0 = 0x27;
  const int r1 = 0x45, g1 = 0x75, b1 = 0xb4;
  const auto mix = [&](int a, int b) {
    return static_cast<int>(std::lround(a + t * (b - a)));
  };
  std::ostringstream os;
  os << '#' << std::hex;
  for (int v : {mix(r0, r1), mix(g0, g1), mix(b0, b1)}) {
    os.width(2);
    os.fill('0');
    os << v;
  }
  return os.str();
}

}  // namespace

std::string emit_dot(const NetworkModel& net, const ComponentRankMap& map) {
  double fmin = kInf, fmax = -kInf;
  for (const auto& c : map.components)
    if (c.ranked) {
      fmin = std::min(fmin, c.F);
      fmax = std::max(fmax, c.F);
    }
  auto color_of = [&](const ComponentRank& c) -> std::string {
    if (!c.ranked) return "#c8c8c8";
    const double t = fmax > fmin ? (c.F - fmin) / (fmax - fmin) : 0.0;
    return gradient_color(t);
  };
  std::map<std::string, const ComponentRank*> by_id;
  for (const auto& c : map.components) by_id[c.kind + ":" + c.id] = &c;

  std::ostringstream os;
  os << "digraph network {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=circle, style=filled, fillcolor=\"#ffffff\"];\n";
  for (const auto& n : net.nodes) os << "  \"" << n << "\";\n";
  for (const auto& s : net.suppliers) {
    const auto* c = by_id.at("supplier:" + s.id);
    os << "  \"supply_" << s.id << "\" [shape=box, label=\"" << s.id
       << "\", fillcolor=\"" << color_of(*c) << "\"];\n";
    os << "  \"supply_" << s.id << "\" -> \"" << s.node << "\";\n";
  }
  for (const auto& d : net.demands) {
    os << "  \"demand_" << d.id << "\" [shape=plaintext, label=\"" << d.id
       << (d.uncertain ? " (uncertain)" : "") << "\"];\n";
    os << "  \"" << d.node << "\" -> \"demand_" << d.id << "\";\n";
  }
  for (const auto& a : net.arcs) {
    const auto* c = by_id.at("arc:" + a.id);
    os << "  \"" << a.from << "\" -> \"" << a.to << "\" [label=\"" << a.id
       << "\", penwidth=2, color=\"" << color_of(*c) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace flexkit
