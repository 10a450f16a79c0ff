#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "flexkit/feasibility.hpp"
#include "flexkit/solver.hpp"
#include "helpers.hpp"

using namespace flexkit;
using namespace testing_helpers;

namespace {

LinearSystem recourse_system() {
  // One recourse variable shared by two opposing rows: the optimal recourse
  // balances them, psi(t) = t - 1 at z = 0.
  LinearSystem sys;
  sys.theta_names = {"t1"};
  sys.recourse_names = {"z1"};
  auto make = [](const std::string& label, double th, double z, double rhs) {
    AffineConstraint c;
    c.label = label;
    c.theta = Eigen::VectorXd::Constant(1, th);
    c.recourse = Eigen::VectorXd::Constant(1, z);
    c.state = Eigen::VectorXd::Zero(0);
    c.rhs = rhs;
    return c;
  };
  sys.inequalities = {make("f1", 1.0, -1.0, 1.0), make("f2", 1.0, 1.0, 1.0)};
  return sys;
}

}  // namespace

TEST_CASE("psi oracles on the wedge system") {
  LinearSystem sys = design_a();
  CHECK(psi(sys, Eigen::Vector2d(4.0, 5.0)) == doctest::Approx(-4.0));
  CHECK(psi(sys, Eigen::Vector2d(7.0, 7.0)) == doctest::Approx(0.0));
  CHECK(psi(sys, Eigen::Vector2d(7.5, 7.5)) == doctest::Approx(1.0));
  CHECK(psi(sys, Eigen::Vector2d(-3.0, 2.0)) == doctest::Approx(3.0));
}

TEST_CASE("psi equals the worst row value for recourse-free systems") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    LinearSystem sys = random_system(rng, 3, 6);
    std::normal_distribution<double> gauss(0.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::Vector3d theta(gauss(rng), gauss(rng), gauss(rng));
      double worst = -kInf;
      for (const auto& f : sys.inequalities)
        worst = std::max(worst, f.theta.dot(theta) - f.rhs);
      CHECK(psi(sys, theta) == doctest::Approx(worst).epsilon(1e-12));
    }
  }
}

TEST_CASE("psi minimizes over recourse") {
  LinearSystem sys = recourse_system();
  for (double t : {-2.0, 0.0, 0.5, 1.0, 3.0})
    CHECK(psi(sys, Eigen::VectorXd::Constant(1, t)) ==
          doctest::Approx(t - 1.0).epsilon(1e-9));
}

TEST_CASE("psi is invariant under state elimination") {
  LinearSystem sys;
  sys.theta_names = {"t1", "t2"};
  sys.recourse_names = {"z1"};
  sys.state_names = {"x1"};
  auto make = [](const std::string& label, Eigen::Vector2d th, double z,
                 double xc, double rhs) {
    AffineConstraint c;
    c.label = label;
    c.theta = th;
    c.recourse = Eigen::VectorXd::Constant(1, z);
    c.state = Eigen::VectorXd::Constant(1, xc);
    c.rhs = rhs;
    return c;
  };
  sys.inequalities = {make("g1", {1.0, 0.0}, 0.0, 1.0, 6.0),
                      make("g2", {0.0, 1.0}, 1.0, -0.5, 4.0),
                      make("g3", {-1.0, -1.0}, -1.0, 0.25, 5.0)};
  sys.equalities = {make("h1", {-1.0, -1.0}, -0.5, 1.0, 0.0)};
  LinearSystem red = eliminate_states(sys);
  std::mt19937_64 rng(22);
  std::normal_distribution<double> gauss(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::Vector2d theta(gauss(rng), gauss(rng));
    CHECK(psi(sys, theta) == doctest::Approx(psi(red, theta)).epsilon(1e-8));
  }
}

TEST_CASE("psi reports +inf for inconsistent equalities") {
  LinearSystem sys;
  sys.theta_names = {"t1"};
  sys.recourse_names = {"z1"};
  auto make = [](const std::string& label, double th, double z, double rhs) {
    AffineConstraint c;
    c.label = label;
    c.theta = Eigen::VectorXd::Constant(1, th);
    c.recourse = Eigen::VectorXd::Constant(1, z);
    c.state = Eigen::VectorXd::Zero(0);
    c.rhs = rhs;
    return c;
  };
  sys.inequalities = {make("f1", 1.0, 0.0, 10.0)};
  sys.equalities = {make("h1", 1.0, 1.0, 0.0), make("h2", 1.0, 1.0, 1.0)};
  CHECK(psi(sys, Eigen::VectorXd::Constant(1, 0.0)) == kInf);
}

TEST_CASE("psi reports -inf with a named recourse ray") {
  LinearSystem sys;
  sys.theta_names = {"t1"};
  sys.recourse_names = {"z1"};
  AffineConstraint c;
  c.label = "f1";
  c.theta = Eigen::VectorXd::Constant(1, 1.0);
  c.recourse = Eigen::VectorXd::Constant(1, -1.0);
  c.state = Eigen::VectorXd::Zero(0);
  c.rhs = 0.0;
  sys.inequalities = {c};
  std::string note;
  CHECK(psi(sys, Eigen::VectorXd::Constant(1, 5.0), &note) == -kInf);
  CHECK(note.find("ray") != std::string::npos);
}

TEST_CASE("psi rejects mismatched theta dimensions") {
  CHECK_THROWS_AS(psi(design_a(), Eigen::Vector3d::Zero()), DimensionMismatch);
}

TEST_CASE("stochastic_flexibility half-width follows the binomial formula") {
  GaussianSpec dist;
  dist.mean = Eigen::Vector2d(4.0, 5.0);
  dist.covariance = (Eigen::Matrix2d() << 2.0, 1.0, 1.0, 3.0).finished();
  SFEstimate est = stochastic_flexibility(design_a(), dist, 5000, 17);
  CHECK(est.samples == 5000);
  CHECK(est.seed == 17);
  CHECK(est.estimate >= 0.0);
  CHECK(est.estimate <= 1.0);
  const double hw =
      1.96 * std::sqrt(est.estimate * (1.0 - est.estimate) / 5000.0);
  CHECK(est.half_width == doctest::Approx(hw).epsilon(1e-14));
}

TEST_CASE("stochastic_flexibility is deterministic for a fixed seed") {
  GaussianSpec dist;
  dist.mean = Eigen::Vector2d(4.0, 5.0);
  dist.covariance = (Eigen::Matrix2d() << 2.0, 1.0, 1.0, 3.0).finished();
  SFEstimate a = stochastic_flexibility(design_a(), dist, 2000, 7);
  SFEstimate b = stochastic_flexibility(design_a(), dist, 2000, 7);
  SFEstimate c = stochastic_flexibility(design_a(), dist, 2000, 8);
  CHECK(a.estimate == b.estimate);
  CHECK(a.half_width == b.half_width);
  CHECK(a.estimate != c.estimate);
}

TEST_CASE("removing a constraint cannot lower SF under common draws") {
  GaussianSpec dist;
  dist.mean = Eigen::Vector2d(4.0, 5.0);
  dist.covariance = (Eigen::Matrix2d() << 2.0, 1.0, 1.0, 3.0).finished();
  ConstraintFilter f;
  f.excluded_labels = {"f1"};
  LinearSystem relaxed = apply_filter(design_a(), f);
  for (unsigned long long seed : {1ULL, 2ULL, 3ULL}) {
    SFEstimate full = stochastic_flexibility(design_a(), dist, 3000, seed);
    SFEstimate less = stochastic_flexibility(relaxed, dist, 3000, seed);
    CHECK(less.estimate >= full.estimate);
  }
}

TEST_CASE("a median halfspace scores one half") {
  LinearSystem sys;
  sys.theta_names = {"t1"};
  AffineConstraint c;
  c.label = "f1";
  c.theta = Eigen::VectorXd::Constant(1, 1.0);
  c.recourse = Eigen::VectorXd::Zero(0);
  c.state = Eigen::VectorXd::Zero(0);
  c.rhs = 0.0;
  sys.inequalities = {c};
  GaussianSpec dist;
  dist.mean = Eigen::VectorXd::Zero(1);
  dist.covariance = Eigen::MatrixXd::Identity(1, 1);
  SFEstimate est = stochastic_flexibility(sys, dist, 20000, 3);
  CHECK(std::abs(est.estimate - 0.5) < 3.0 * est.half_width / 1.96);
}

TEST_CASE("truncation shifts mass into the nonnegative orthant") {
  LinearSystem sys = design_a();
  GaussianSpec dist;
  dist.mean = Eigen::Vector2d(1.0, 1.0);
  dist.covariance = 4.0 * Eigen::Matrix2d::Identity();
  GaussianSpec trunc = dist;
  trunc.truncated = true;
  SFEstimate plain = stochastic_flexibility(sys, dist, 8000, 9);
  SFEstimate cut = stochastic_flexibility(sys, trunc, 8000, 9);
  // f3/f4 forbid negative theta, so conditioning on theta >= 0 must help.
  CHECK(cut.estimate > plain.estimate);
}

TEST_CASE("hopeless truncation is rejected") {
  GaussianSpec dist;
  dist.mean = Eigen::Vector2d(-50.0, -50.0);
  dist.covariance = Eigen::Matrix2d::Identity();
  dist.truncated = true;
  CHECK_THROWS_AS(stochastic_flexibility(design_a(), dist, 1000, 1),
                  ImpracticalTruncation);
}

TEST_CASE("stochastic_flexibility input validation") {
  GaussianSpec dist;
  dist.mean = Eigen::Vector2d(4.0, 5.0);
  dist.covariance = (Eigen::Matrix2d() << 2.0, 1.0, 1.0, 3.0).finished();
  CHECK_THROWS_AS(stochastic_flexibility(design_a(), dist, 99, 1), InputError);
  GaussianSpec bad_mean = dist;
  bad_mean.mean = Eigen::Vector3d::Zero();
  CHECK_THROWS_AS(stochastic_flexibility(design_a(), bad_mean, 1000, 1),
                  DimensionMismatch);
  GaussianSpec bad_cov = dist;
  bad_cov.covariance = (Eigen::Matrix2d() << 1.0, 2.0, 2.0, 1.0).finished();
  CHECK_THROWS_AS(stochastic_flexibility(design_a(), bad_cov, 1000, 1),
                  InputError);
}
