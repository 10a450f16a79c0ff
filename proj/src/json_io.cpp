#include <cmath>
#include <fstream>
#include <sstream>

#include "flexkit/json_io.hpp"

namespace flexkit {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw InputError(msg); }

json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail("'" + path + "': " + e.what());
  }
  return j;
}

double number_at(const json& j, const std::string& key, const char* where) {
  if (!j.contains(key) || !j.at(key).is_number())
    fail(std::string(where) + ": missing numeric field '" + key + "'");
  return j.at(key).get<double>();
}

std::string string_at(const json& j, const std::string& key,
                      const char* where) {
  if (!j.contains(key) || !j.at(key).is_string())
    fail(std::string(where) + ": missing string field '" + key + "'");
  return j.at(key).get<std::string>();
}

Eigen::VectorXd vector_at(const json& j, const std::string& key,
                          const char* where) {
  if (!j.contains(key) || !j.at(key).is_array())
    fail(std::string(where) + ": missing array field '" + key + "'");
  const auto& arr = j.at(key);
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const auto& e = arr[static_cast<size_t>(i)];
    if (!e.is_number())
      fail(std::string(where) + ": '" + key + "' must hold numbers");
    v(i) = e.get<double>();
  }
  return v;
}

Eigen::VectorXd vector_or_zeros(const json& j, const std::string& key,
                                Eigen::Index n, const char* where) {
  if (!j.contains(key)) return Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v = vector_at(j, key, where);
  if (v.size() != n)
    fail(std::string(where) + ": '" + key + "' has length " +
         std::to_string(v.size()) + ", expected " + std::to_string(n));
  return v;
}

Eigen::MatrixXd matrix_at(const json& j, const std::string& key,
                          const char* where) {
  if (!j.contains(key) || !j.at(key).is_array())
    fail(std::string(where) + ": missing matrix field '" + key + "'");
  const auto& arr = j.at(key);
  if (arr.empty()) fail(std::string(where) + ": '" + key + "' is empty");
  const Eigen::Index rows = static_cast<Eigen::Index>(arr.size());
  Eigen::Index cols = -1;
  Eigen::MatrixXd m;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = arr[static_cast<size_t>(i)];
    if (!row.is_array())
      fail(std::string(where) + ": '" + key + "' must be an array of rows");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    }
    if (static_cast<Eigen::Index>(row.size()) != cols)
      fail(std::string(where) + ": ragged matrix '" + key + "'");
    for (Eigen::Index k = 0; k < cols; ++k) {
      const auto& e = row[static_cast<size_t>(k)];
      if (!e.is_number())
        fail(std::string(where) + ": '" + key + "' must hold numbers");
      m(i, k) = e.get<double>();
    }
  }
  return m;
}

std::vector<std::string> names_at(const json& j, const std::string& key,
                                  const char* where) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  if (!j.at(key).is_array())
    fail(std::string(where) + ": '" + key + "' must be a name array");
  for (const auto& e : j.at(key)) {
    if (!e.is_string())
      fail(std::string(where) + ": '" + key + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::vector<AffineConstraint> constraints_at(const json& j,
                                             const std::string& key,
                                             const LinearSystem& sys,
                                             const char* where) {
  std::vector<AffineConstraint> out;
  if (!j.contains(key)) return out;
  if (!j.at(key).is_array())
    fail(std::string(where) + ": '" + key + "' must be an array");
  for (const auto& e : j.at(key)) {
    AffineConstraint c;
    c.label = string_at(e, "label", where);
    const std::string ctx = std::string(where) + " '" + c.label + "'";
    c.theta = vector_or_zeros(e, "theta", sys.n_theta(), ctx.c_str());
    c.recourse = vector_or_zeros(e, "recourse", sys.n_recourse(), ctx.c_str());
    c.state = vector_or_zeros(e, "state", sys.n_state(), ctx.c_str());
    c.rhs = number_at(e, "rhs", ctx.c_str());
    out.push_back(std::move(c));
  }
  return out;
}

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(sig6(v(i)));
  return a;
}

}  // namespace

double sig6(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  const double mag = std::pow(10.0, 5 - std::floor(std::log10(std::abs(v))));
  return std::round(v * mag) / mag;
}

LinearSystem system_from_json(const json& j) {
  if (!j.is_object()) fail("system: top level must be an object");
  LinearSystem sys;
  sys.theta_names = names_at(j, "theta", "system");
  sys.recourse_names = names_at(j, "recourse", "system");
  sys.state_names = names_at(j, "state", "system");
  if (sys.theta_names.empty()) fail("system: 'theta' must name >= 1 variable");
  sys.inequalities = constraints_at(j, "inequalities", sys, "inequality");
  sys.equalities = constraints_at(j, "equalities", sys, "equality");
  if (sys.inequalities.empty())
    fail("system: at least one inequality is required");
  for (const auto& d : validate(sys))
    if (d.kind == DiagnosticKind::Error)
      fail("system '" + d.subject + "': " + d.message);
  return sys;
}

namespace {

// Builds the variant without validating it, so composite members that are
// only compact jointly (e.g. halfspaces inside an intersection) can parse.
UncertaintySetSpec parse_set(const json& j) {
  if (!j.is_object()) fail("set: top level must be an object");
  const std::string type = string_at(j, "type", "set");
  UncertaintySetSpec spec;
  if (type == "ellipsoid") {
    Ellipsoid e;
    e.mean = vector_at(j, "mean", "set ellipsoid");
    e.covariance = matrix_at(j, "covariance", "set ellipsoid");
    spec.value = std::move(e);
  } else if (type == "hyperbox") {
    Hyperbox b;
    b.mean = vector_at(j, "mean", "set hyperbox");
    b.dev_minus = vector_at(j, "dev_minus", "set hyperbox");
    b.dev_plus = vector_at(j, "dev_plus", "set hyperbox");
    spec.value = std::move(b);
  } else if (type == "pnorm") {
    PNorm p;
    p.mean = vector_at(j, "mean", "set pnorm");
    if (j.contains("p") && j.at("p").is_string()) {
      const std::string s = j.at("p").get<std::string>();
      if (s != "inf") fail("set pnorm: 'p' must be 1, 2 or \"inf\"");
      p.p = kInf;
    } else {
      p.p = number_at(j, "p", "set pnorm");
    }
    spec.value = std::move(p);
  } else if (type == "cvar") {
    CVaRNorm c;
    c.mean = vector_at(j, "mean", "set cvar");
    c.alpha = number_at(j, "alpha", "set cvar");
    spec.value = std::move(c);
  } else if (type == "halfspaces") {
    Halfspaces h;
    h.A = matrix_at(j, "A", "set halfspaces");
    h.b = vector_at(j, "b", "set halfspaces");
    spec.value = std::move(h);
  } else if (type == "nonnegative") {
    const double n = number_at(j, "dimension", "set nonnegative");
    if (n < 1 || n != std::floor(n))
      fail("set nonnegative: 'dimension' must be a positive integer");
    Halfspaces h;
    h.A = -Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                     static_cast<Eigen::Index>(n));
    h.b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    spec.value = std::move(h);
  } else if (type == "intersection") {
    if (!j.contains("members") || !j.at("members").is_array())
      fail("set intersection: missing 'members' array");
    Intersection inter;
    for (const auto& m : j.at("members")) inter.members.push_back(parse_set(m));
    spec.value = std::move(inter);
  } else {
    fail("set: unknown type '" + type + "'");
  }
  return spec;
}

}  // namespace

UncertaintySetSpec set_from_json(const json& j) {
  UncertaintySetSpec spec = parse_set(j);
  try {
    validate_spec(spec);
  } catch (const FlexError& e) {
    fail(std::string("set: ") + e.what());
  }
  return spec;
}

GaussianSpec dist_from_json(const json& j) {
  if (!j.is_object()) fail("dist: top level must be an object");
  GaussianSpec d;
  d.mean = vector_at(j, "mean", "dist");
  d.covariance = matrix_at(j, "covariance", "dist");
  if (j.contains("truncated")) {
    if (!j.at("truncated").is_boolean())
      fail("dist: 'truncated' must be a boolean");
    d.truncated = j.at("truncated").get<bool>();
  }
  if (d.covariance.rows() != d.mean.size() ||
      d.covariance.cols() != d.mean.size())
    fail("dist: covariance shape does not match the mean");
  return d;
}

NetworkModel network_from_json(const json& j) {
  if (!j.is_object()) fail("network: top level must be an object");
  NetworkModel net;
  net.nodes = names_at(j, "nodes", "network");
  if (net.nodes.empty()) fail("network: 'nodes' must name >= 1 node");
  if (j.contains("arcs")) {
    if (!j.at("arcs").is_array()) fail("network: 'arcs' must be an array");
    for (const auto& e : j.at("arcs")) {
      Arc a;
      a.id = string_at(e, "id", "arc");
      a.from = string_at(e, "from", "arc");
      a.to = string_at(e, "to", "arc");
      a.capacity = number_at(e, "capacity", "arc");
      net.arcs.push_back(std::move(a));
    }
  }
  if (j.contains("suppliers")) {
    if (!j.at("suppliers").is_array())
      fail("network: 'suppliers' must be an array");
    for (const auto& e : j.at("suppliers")) {
      Supplier s;
      s.id = string_at(e, "id", "supplier");
      s.node = string_at(e, "node", "supplier");
      s.capacity = number_at(e, "capacity", "supplier");
      net.suppliers.push_back(std::move(s));
    }
  }
  if (j.contains("demands")) {
    if (!j.at("demands").is_array())
      fail("network: 'demands' must be an array");
    for (const auto& e : j.at("demands")) {
      Demand d;
      d.id = string_at(e, "id", "demand");
      d.node = string_at(e, "node", "demand");
      if (e.contains("uncertain")) {
        if (!e.at("uncertain").is_boolean())
          fail("demand '" + d.id + "': 'uncertain' must be a boolean");
        d.uncertain = e.at("uncertain").get<bool>();
      }
      if (!d.uncertain) d.fixed_value = number_at(e, "fixed_value", "demand");
      net.demands.push_back(std::move(d));
    }
  }
  for (const auto& d : validate_network(net))
    if (d.kind == DiagnosticKind::Error)
      fail("network '" + d.subject + "': " + d.message);
  return net;
}

LinearSystem load_system(const std::string& path) {
  return system_from_json(load_file(path));
}
UncertaintySetSpec load_set(const std::string& path) {
  return set_from_json(load_file(path));
}
GaussianSpec load_dist(const std::string& path) {
  return dist_from_json(load_file(path));
}
NetworkModel load_network(const std::string& path) {
  return network_from_json(load_file(path));
}

std::string set_type_name(const UncertaintySetSpec& spec) {
  if (spec.as<Ellipsoid>()) return "ellipsoid";
  if (spec.as<Hyperbox>()) return "hyperbox";
  if (spec.as<PNorm>()) return "pnorm";
  if (spec.as<CVaRNorm>()) return "cvar";
  if (spec.as<Halfspaces>()) return "halfspaces";
  return "intersection";
}

json to_json(const NetworkModel& net) {
  json j;
  j["nodes"] = net.nodes;
  j["arcs"] = json::array();
  for (const auto& a : net.arcs)
    j["arcs"].push_back({{"id", a.id},
                         {"from", a.from},
                         {"to", a.to},
                         {"capacity", a.capacity}});
  j["suppliers"] = json::array();
  for (const auto& s : net.suppliers)
    j["suppliers"].push_back(
        {{"id", s.id}, {"node", s.node}, {"capacity", s.capacity}});
  j["demands"] = json::array();
  for (const auto& d : net.demands)
    j["demands"].push_back({{"id", d.id},
                            {"node", d.node},
                            {"uncertain", d.uncertain},
                            {"fixed_value", d.uncertain ? 0.0 : d.fixed_value}});
  return j;
}

json to_json(const LinearSystem& system) {
  auto exact_vec = [](const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
  };
  auto block = [&](const std::vector<AffineConstraint>& cs) {
    json arr = json::array();
    for (const auto& c : cs) {
      json e;
      e["label"] = c.label;
      if (!c.theta.isZero(0.0)) e["theta"] = exact_vec(c.theta);
      if (!c.recourse.isZero(0.0)) e["recourse"] = exact_vec(c.recourse);
      if (!c.state.isZero(0.0)) e["state"] = exact_vec(c.state);
      e["rhs"] = c.rhs;
      arr.push_back(std::move(e));
    }
    return arr;
  };
  json j;
  j["theta"] = system.theta_names;
  if (!system.recourse_names.empty()) j["recourse"] = system.recourse_names;
  if (!system.state_names.empty()) j["state"] = system.state_names;
  j["inequalities"] = block(system.inequalities);
  if (!system.equalities.empty()) j["equalities"] = block(system.equalities);
  return j;
}

json to_json(const FlexSolution& sol, const LinearSystem& system) {
  json j;
  j["F"] = sig6(sol.F);
  j["set"] = set_type_name(sol.set_used);
  j["active"] = sol.active_labels;
  j["weakly_active"] = sol.weakly_active_labels;
  j["theta_star"] = vec_json(sol.theta_star);
  if (sol.z_star.size() > 0) j["z_star"] = vec_json(sol.z_star);
  if (sol.x_star.size() > 0) j["x_star"] = vec_json(sol.x_star);
  json lambda = json::object();
  for (size_t i = 0; i < system.inequalities.size(); ++i)
    lambda[system.inequalities[i].label] =
        sig6(sol.lambda(static_cast<Eigen::Index>(i)));
  json mu = json::object();
  for (size_t i = 0; i < system.equalities.size(); ++i)
    mu[system.equalities[i].label] = sig6(sol.mu(static_cast<Eigen::Index>(i)));
  j["multipliers"] = {{"lambda", lambda}, {"mu", mu}};
  j["stats"] = {{"nodes", sol.stats.nodes}, {"seconds", sig6(sol.stats.seconds)}};
  j["status"] = to_string(sol.status);
  j["gap"] = sig6(sol.gap);
  return j;
}

json to_json(const RankResult& result) {
  json levels = json::array();
  for (const auto& lv : result.levels) {
    json e;
    e["level"] = lv.level;
    e["labels"] = lv.labels;
    e["F"] = sig6(lv.F_value);
    e["increase_pct"] = sig6(lv.increase_pct);
    levels.push_back(std::move(e));
  }
  return {{"levels", levels}, {"termination", to_string(result.termination)}};
}

json to_json(const SFEstimate& est, double elapsed_seconds) {
  return {{"estimate", sig6(est.estimate)},
          {"half_width", sig6(est.half_width)},
          {"samples", est.samples},
          {"seed", est.seed},
          {"elapsed_seconds", sig6(elapsed_seconds)}};
}

json to_json(const CenterResult& center, const LinearSystem& system) {
  json j;
  j["method"] = to_string(center.method);
  j["theta_bar"] = vec_json(center.theta_bar);
  if (center.recourse.size() > 0) j["recourse"] = vec_json(center.recourse);
  if (center.state.size() > 0) j["state"] = vec_json(center.state);
  j["psi_at_center"] = sig6(center.psi_at_center);
  json slacks = json::object();
  for (size_t i = 0; i < system.inequalities.size(); ++i)
    slacks[system.inequalities[i].label] =
        sig6(center.slacks(static_cast<Eigen::Index>(i)));
  j["slacks"] = slacks;
  return j;
}

json to_json(const VerificationReport& report) {
  return {{"samples", report.samples},
          {"violations_at_F", report.violations_at_F},
          {"worst_psi_at_F", sig6(report.worst_psi_at_F)},
          {"infeasible_at_inflated", report.infeasible_at_inflated}};
}

json to_json(const ComponentRankMap& map) {
  json arr = json::array();
  for (const auto& c : map.components) {
    json e;
    e["id"] = c.id;
    e["kind"] = c.kind;
    e["ranked"] = c.ranked;
    if (c.ranked) {
      e["level"] = c.level;
      e["F"] = sig6(c.F);
    }
    e["labels"] = c.labels;
    arr.push_back(std::move(e));
  }
  return arr;
}

namespace {

std::string fmt6(double v) {
  std::ostringstream os;
  os.precision(6);
  os << sig6(v);
  return os.str();
}

std::string joined(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

}  // namespace

std::string rank_csv(const RankResult& result) {
  std::ostringstream os;
  os << "level,constraints,F,increase_pct\n";
  for (const auto& lv : result.levels)
    os << lv.level << ',' << joined(lv.labels) << ',' << fmt6(lv.F_value)
       << ',' << fmt6(lv.increase_pct) << '\n';
  return os.str();
}

std::string compare_csv(const std::vector<CompareRow>& rows, int box_col,
                        int ellip_col) {
  std::ostringstream os;
  os << "design,F_box,F_ellip,alpha_star_pct,SF_pct\n";
  auto cell = [&](const CompareRow& r, int col) -> std::string {
    if (col < 0 || col >= static_cast<int>(r.F.size())) return "";
    const auto& c = r.F[static_cast<size_t>(col)];
    return c.ok ? fmt6(c.F) : "";
  };
  for (const auto& r : rows) {
    os << r.name << ',' << cell(r, box_col) << ',' << cell(r, ellip_col)
       << ',';
    if (r.has_alpha) os << fmt6(100.0 * r.alpha_star);
    os << ',';
    if (r.has_sf) os << fmt6(100.0 * r.sf.estimate);
    os << '\n';
  }
  return os.str();
}

}  // namespace flexkit
