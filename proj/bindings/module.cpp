#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "flexkit/json_io.hpp"

namespace py = pybind11;
using namespace flexkit;

namespace {

LinearSystem system_from_string(const std::string& text) {
  return system_from_json(nlohmann::json::parse(text));
}
UncertaintySetSpec set_from_string(const std::string& text) {
  return set_from_json(nlohmann::json::parse(text));
}
GaussianSpec dist_from_string(const std::string& text) {
  return dist_from_json(nlohmann::json::parse(text));
}
NetworkModel network_from_string(const std::string& text) {
  return network_from_json(nlohmann::json::parse(text));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "flexibility analysis of linear constrained systems";

  py::register_exception<FlexError>(m, "FlexError");

  py::class_<AffineConstraint>(m, "AffineConstraint")
      .def(py::init<>())
      .def_readwrite("label", &AffineConstraint::label)
      .def_readwrite("theta", &AffineConstraint::theta)
      .def_readwrite("recourse", &AffineConstraint::recourse)
      .def_readwrite("state", &AffineConstraint::state)
      .def_readwrite("rhs", &AffineConstraint::rhs);

  py::class_<LinearSystem>(m, "LinearSystem")
      .def(py::init<>())
      .def_readwrite("theta_names", &LinearSystem::theta_names)
      .def_readwrite("recourse_names", &LinearSystem::recourse_names)
      .def_readwrite("state_names", &LinearSystem::state_names)
      .def_readwrite("inequalities", &LinearSystem::inequalities)
      .def_readwrite("equalities", &LinearSystem::equalities)
      .def("n_theta", &LinearSystem::n_theta)
      .def("n_recourse", &LinearSystem::n_recourse)
      .def("n_state", &LinearSystem::n_state);

  py::class_<UncertaintySetSpec>(m, "UncertaintySetSpec");

  py::class_<GaussianSpec>(m, "GaussianSpec")
      .def(py::init([](Eigen::VectorXd mean, Eigen::MatrixXd covariance,
                       bool truncated) {
             GaussianSpec d;
             d.mean = std::move(mean);
             d.covariance = std::move(covariance);
             d.truncated = truncated;
             return d;
           }),
           py::arg("mean"), py::arg("covariance"),
           py::arg("truncated") = false)
      .def_readwrite("mean", &GaussianSpec::mean)
      .def_readwrite("covariance", &GaussianSpec::covariance)
      .def_readwrite("truncated", &GaussianSpec::truncated);

  py::class_<SFEstimate>(m, "SFEstimate")
      .def_readonly("estimate", &SFEstimate::estimate)
      .def_readonly("samples", &SFEstimate::samples)
      .def_readonly("half_width", &SFEstimate::half_width)
      .def_readonly("seed", &SFEstimate::seed);

  py::class_<SolveStats>(m, "SolveStats")
      .def_readonly("nodes", &SolveStats::nodes)
      .def_readonly("seconds", &SolveStats::seconds);

  py::class_<FlexSolution>(m, "FlexSolution")
      .def_readonly("F", &FlexSolution::F)
      .def_readonly("theta_star", &FlexSolution::theta_star)
      .def_readonly("z_star", &FlexSolution::z_star)
      .def_readonly("x_star", &FlexSolution::x_star)
      .def_readonly("lambda_", &FlexSolution::lambda)
      .def_readonly("mu", &FlexSolution::mu)
      .def_readonly("slacks", &FlexSolution::slacks)
      .def_readonly("active_labels", &FlexSolution::active_labels)
      .def_readonly("weakly_active_labels", &FlexSolution::weakly_active_labels)
      .def_readonly("stats", &FlexSolution::stats)
      .def_readonly("gap", &FlexSolution::gap);

  py::class_<VerificationReport>(m, "VerificationReport")
      .def_readonly("samples", &VerificationReport::samples)
      .def_readonly("violations_at_F", &VerificationReport::violations_at_F)
      .def_readonly("worst_psi_at_F", &VerificationReport::worst_psi_at_F)
      .def_readonly("infeasible_at_inflated",
                    &VerificationReport::infeasible_at_inflated);

  py::class_<RankLevel>(m, "RankLevel")
      .def_readonly("level", &RankLevel::level)
      .def_readonly("labels", &RankLevel::labels)
      .def_readonly("F_value", &RankLevel::F_value)
      .def_readonly("increase_pct", &RankLevel::increase_pct);

  py::class_<RankResult>(m, "RankResult")
      .def_readonly("levels", &RankResult::levels)
      .def_property_readonly("termination", [](const RankResult& r) {
        return std::string(to_string(r.termination));
      });

  py::class_<CenterResult>(m, "CenterResult")
      .def_readonly("theta_bar", &CenterResult::theta_bar)
      .def_readonly("recourse", &CenterResult::recourse)
      .def_readonly("state", &CenterResult::state)
      .def_readonly("psi_at_center", &CenterResult::psi_at_center)
      .def_readonly("slacks", &CenterResult::slacks)
      .def_property_readonly("method", [](const CenterResult& c) {
        return std::string(to_string(c.method));
      });

  py::class_<NetworkModel>(m, "NetworkModel");

  // parsing and serialization
  m.def("load_system", &load_system, py::arg("path"));
  m.def("load_set", &load_set, py::arg("path"));
  m.def("load_dist", &load_dist, py::arg("path"));
  m.def("load_network", &load_network, py::arg("path"));
  m.def("system_from_json", &system_from_string, py::arg("text"));
  m.def("set_from_json", &set_from_string, py::arg("text"));
  m.def("dist_from_json", &dist_from_string, py::arg("text"));
  m.def("network_from_json", &network_from_string, py::arg("text"));
  m.def("set_type_name", &set_type_name, py::arg("spec"));

  // analyses
  m.def(
      "flexibility_index",
      [](const LinearSystem& sys, const UncertaintySetSpec& set,
         double tol_gap, double big_m, double tol_feas) {
        BnBConfig cfg;
        cfg.rel_gap = tol_gap;
        cfg.abs_gap = tol_gap;
        cfg.big_m = big_m;
        return flexibility_index(sys, set, cfg, tol_feas);
      },
      py::arg("system"), py::arg("set"), py::arg("tol_gap") = 1e-9,
      py::arg("big_m") = -1.0, py::arg("tol_feas") = 1e-8);
  m.def(
      "verify_solution",
      [](const LinearSystem& sys, const FlexSolution& sol, long samples,
         unsigned long long seed) {
        return verify_solution(sys, sol, samples, seed);
      },
      py::arg("system"), py::arg("solution"), py::arg("samples") = 10000,
      py::arg("seed") = 0);
  m.def(
      "rank_constraints",
      [](const LinearSystem& sys, const UncertaintySetSpec& set,
         int max_levels) { return rank_constraints(sys, set, max_levels); },
      py::arg("system"), py::arg("set"), py::arg("max_levels") = 4);
  m.def(
      "psi",
      [](const LinearSystem& sys, const Eigen::VectorXd& theta) {
        return psi(sys, theta);
      },
      py::arg("system"), py::arg("theta"));
  m.def("stochastic_flexibility", &stochastic_flexibility, py::arg("system"),
        py::arg("dist"), py::arg("samples"), py::arg("seed") = 0);
  m.def("analytic_center", &analytic_center, py::arg("system"));
  m.def("arithmetic_center", &arithmetic_center, py::arg("system"));
  m.def("feasible_center", &feasible_center, py::arg("system"));
  m.def("confidence_level", &confidence_level, py::arg("flex_index"),
        py::arg("n_theta"));
  m.def("cvar_norm", &cvar_norm, py::arg("x"), py::arg("alpha"));
  m.def("set_value", &set_value, py::arg("spec"), py::arg("theta"));
  m.def("membership", &membership, py::arg("spec"), py::arg("theta"),
        py::arg("delta"));
  m.def("eliminate_states", &eliminate_states, py::arg("system"));
  m.def(
      "apply_filter",
      [](const LinearSystem& sys, const std::vector<std::string>& excluded) {
        ConstraintFilter f;
        f.excluded_labels.insert(excluded.begin(), excluded.end());
        return apply_filter(sys, f);
      },
      py::arg("system"), py::arg("excluded_labels"));

  // networks
  m.def("build_system", &build_system, py::arg("network"));
  m.def(
      "network_rank_dot",
      [](const NetworkModel& net, const RankResult& result) {
        return emit_dot(net, component_rank_map(net, result.levels));
      },
      py::arg("network"), py::arg("ranking"));

  m.attr("__version__") = FLEXKIT_VERSION;
}
