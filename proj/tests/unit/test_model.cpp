#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"

using namespace flexkit;
using namespace testing_helpers;

namespace {

// Builds a system with two states determined by two equalities so the
// elimination path has something to do:
//   x1 = t1 + z1, x2 = 2 t2 - x1
// with inequalities touching both states.
LinearSystem stateful_system() {
  LinearSystem sys;
  sys.theta_names = {"t1", "t2"};
  sys.recourse_names = {"z1"};
  sys.state_names = {"x1", "x2"};
  auto make = [](const std::string& label, Eigen::Vector2d th, double z,
                 Eigen::Vector2d xc, double rhs) {
    AffineConstraint c;
    c.label = label;
    c.theta = th;
    c.recourse = Eigen::VectorXd::Constant(1, z);
    c.state = xc;
    c.rhs = rhs;
    return c;
  };
  sys.inequalities = {
      make("g1", {1.0, 0.0}, 0.5, {1.0, 0.0}, 10.0),
      make("g2", {0.0, 1.0}, -1.0, {0.5, 1.0}, 8.0),
      make("g3", {-1.0, -1.0}, 0.0, {0.0, -2.0}, 6.0),
  };
  AffineConstraint h1 = make("h1", {-1.0, 0.0}, -1.0, {1.0, 0.0}, 0.0);
  AffineConstraint h2 = make("h2", {0.0, -2.0}, 0.0, {1.0, 1.0}, 0.0);
  sys.equalities = {h1, h2};
  return sys;
}

}  // namespace

TEST_CASE("validate accepts the benchmark system") {
  CHECK(validate(design_a()).empty());
}

TEST_CASE("validate flags duplicate labels") {
  LinearSystem sys = design_a();
  sys.inequalities[1].label = "f1";
  auto diags = validate(sys);
  REQUIRE(!diags.empty());
  bool found = false;
  for (const auto& d : diags)
    if (d.kind == DiagnosticKind::Error && d.subject == "f1") found = true;
  CHECK(found);
}

TEST_CASE("validate flags degenerate rows without failing") {
  LinearSystem sys = design_a();
  sys.inequalities.push_back(row2("empty_bad", 0.0, 0.0, -1.0));
  sys.inequalities.push_back(row2("empty_ok", 0.0, 0.0, 2.0));
  auto diags = validate(sys);
  int infeasible = 0, vacuous = 0;
  for (const auto& d : diags) {
    if (d.kind == DiagnosticKind::InfeasibleRow && d.subject == "empty_bad")
      ++infeasible;
    if (d.kind == DiagnosticKind::Vacuous && d.subject == "empty_ok")
      ++vacuous;
  }
  CHECK(infeasible == 1);
  CHECK(vacuous == 1);
}

TEST_CASE("validate flags dimension mismatches") {
  LinearSystem sys = design_a();
  sys.inequalities[0].theta = Eigen::Vector3d(1.0, 1.0, 0.0);
  bool found = false;
  for (const auto& d : validate(sys))
    if (d.kind == DiagnosticKind::Error) found = true;
  CHECK(found);
}

TEST_CASE("eliminate_states is the identity without states") {
  LinearSystem sys = design_a();
  LinearSystem out = eliminate_states(sys);
  CHECK(out.n_state() == 0);
  REQUIRE(out.inequalities.size() == sys.inequalities.size());
  for (size_t j = 0; j < sys.inequalities.size(); ++j) {
    CHECK(out.inequalities[j].label == sys.inequalities[j].label);
    CHECK((out.inequalities[j].theta - sys.inequalities[j].theta).norm() ==
          0.0);
  }
}

TEST_CASE("eliminate_states preserves row values on 1000 random samples") {
  LinearSystem sys = stateful_system();
  LinearSystem red = eliminate_states(sys);
  CHECK(red.n_state() == 0);
  CHECK(red.equalities.empty());
  REQUIRE(red.inequalities.size() == sys.inequalities.size());

  // Solve the equality block for x at each sample and compare every
  // inequality's value before and after elimination.
  const Eigen::Index nx = sys.n_state();
  Eigen::MatrixXd X(static_cast<Eigen::Index>(sys.equalities.size()), nx);
  for (size_t i = 0; i < sys.equalities.size(); ++i)
    X.row(static_cast<Eigen::Index>(i)) = sys.equalities[i].state.transpose();

  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss(0.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::Vector2d theta(gauss(rng), gauss(rng));
    Eigen::VectorXd z = Eigen::VectorXd::Constant(1, gauss(rng));
    Eigen::VectorXd rhs(X.rows());
    for (size_t i = 0; i < sys.equalities.size(); ++i)
      rhs(static_cast<Eigen::Index>(i)) =
          sys.equalities[i].rhs - sys.equalities[i].theta.dot(theta) -
          sys.equalities[i].recourse.dot(z);
    Eigen::VectorXd x = X.fullPivLu().solve(rhs);
    for (size_t j = 0; j < sys.inequalities.size(); ++j) {
      const auto& before = sys.inequalities[j];
      const auto& after = red.inequalities[j];
      const double v0 = before.theta.dot(theta) + before.recourse.dot(z) +
                        before.state.dot(x) - before.rhs;
      const double v1 =
          after.theta.dot(theta) + after.recourse.dot(z) - after.rhs;
      CHECK(std::abs(v0 - v1) < 1e-8);
    }
  }
}

TEST_CASE("eliminate_states rejects rank-deficient state blocks") {
  LinearSystem sys = stateful_system();
  sys.state_names.push_back("x3");
  for (auto& c : sys.inequalities)
    c.state = (Eigen::VectorXd(3) << c.state(0), c.state(1), 0.0).finished();
  for (auto& c : sys.equalities)
    c.state = (Eigen::VectorXd(3) << c.state(0), c.state(1), 0.0).finished();
  AffineConstraint h3 = sys.equalities[0];
  h3.label = "h3";
  sys.equalities.push_back(h3);  // duplicate row: singular in x
  CHECK_THROWS_AS(eliminate_states(sys), SingularElimination);
}

TEST_CASE("eliminate_states rejects mismatched equality counts") {
  LinearSystem sys = stateful_system();
  sys.equalities.pop_back();
  CHECK_THROWS_AS(eliminate_states(sys), DimensionMismatch);
}

TEST_CASE("apply_filter drops exactly the excluded inequalities") {
  LinearSystem sys = design_a();
  ConstraintFilter f;
  f.excluded_labels = {"f1"};
  LinearSystem out = apply_filter(sys, f);
  REQUIRE(out.inequalities.size() == 3);
  CHECK(out.inequalities[0].label == "f2");
  CHECK(out.inequalities[1].label == "f3");
  CHECK(out.inequalities[2].label == "f4");
}

TEST_CASE("apply_filter with an empty filter is the identity") {
  LinearSystem sys = design_a();
  LinearSystem out = apply_filter(sys, ConstraintFilter{});
  CHECK(out.inequalities.size() == sys.inequalities.size());
}

TEST_CASE("apply_filter rejects unknown and equality labels") {
  LinearSystem sys = stateful_system();
  ConstraintFilter unknown;
  unknown.excluded_labels = {"nope"};
  CHECK_THROWS_AS(apply_filter(sys, unknown), UnknownLabel);
  ConstraintFilter eq;
  eq.excluded_labels = {"h1"};
  CHECK_THROWS_AS(apply_filter(sys, eq), EqualityExclusion);
}

TEST_CASE("apply_filter enlarges the feasible region") {
  LinearSystem sys = design_a();
  ConstraintFilter f;
  f.excluded_labels = {"f1"};
  LinearSystem out = apply_filter(sys, f);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 16.0);
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::Vector2d theta(u(rng), u(rng));
    bool feas_before = true;
    for (const auto& c : sys.inequalities)
      if (c.theta.dot(theta) > c.rhs) feas_before = false;
    if (!feas_before) continue;
    for (const auto& c : out.inequalities)
      CHECK(c.theta.dot(theta) <= c.rhs);
  }
}
