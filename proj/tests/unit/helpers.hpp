#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>

#include "flexkit/model.hpp"
#include "flexkit/sets.hpp"

namespace testing_helpers {

inline std::string data_path(const std::string& name) {
  return std::string(FLEXKIT_DATA_DIR) + "/" + name;
}

inline flexkit::AffineConstraint row2(const std::string& label, double a1,
                                      double a2, double rhs) {
  flexkit::AffineConstraint c;
  c.label = label;
  c.theta = Eigen::Vector2d(a1, a2);
  c.recourse = Eigen::VectorXd::Zero(0);
  c.state = Eigen::VectorXd::Zero(0);
  c.rhs = rhs;
  return c;
}

// Two-parameter benchmark system, first variant: four inequalities over
// (t1, t2) bounding a wedge in the nonnegative quadrant.
inline flexkit::LinearSystem design_a() {
  flexkit::LinearSystem sys;
  sys.theta_names = {"t1", "t2"};
  sys.inequalities = {row2("f1", 1.0, 1.0, 14.0), row2("f2", 1.0, -2.0, 2.0),
                      row2("f3", -1.0, 0.0, 0.0), row2("f4", 0.0, -1.0, 0.0)};
  return sys;
}

// Second variant: the first inequality pair is rotated by scaling the t1
// coefficients to 3/4.
inline flexkit::LinearSystem design_b() {
  flexkit::LinearSystem sys = design_a();
  sys.inequalities[0].theta(0) = 0.75;
  sys.inequalities[1].theta(0) = 0.75;
  return sys;
}

inline flexkit::UncertaintySetSpec bench_ellipsoid() {
  flexkit::Ellipsoid e;
  e.mean = Eigen::Vector2d(4.0, 5.0);
  e.covariance = (Eigen::Matrix2d() << 2.0, 1.0, 1.0, 3.0).finished();
  flexkit::UncertaintySetSpec s;
  s.value = std::move(e);
  return s;
}

inline flexkit::UncertaintySetSpec bench_box() {
  flexkit::Hyperbox b;
  b.mean = Eigen::Vector2d(4.0, 5.0);
  b.dev_minus = Eigen::Vector2d(4.243, 5.196);
  b.dev_plus = Eigen::Vector2d(4.243, 5.196);
  flexkit::UncertaintySetSpec s;
  s.value = std::move(b);
  return s;
}

// Random recourse-free system with a strictly interior origin: every row
// has rhs > 0 so theta = 0 is feasible with margin.
inline flexkit::LinearSystem random_system(std::mt19937_64& rng, int n_theta,
                                           int n_rows) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> pos(0.2, 3.0);
  flexkit::LinearSystem sys;
  for (int i = 0; i < n_theta; ++i)
    sys.theta_names.push_back("t" + std::to_string(i + 1));
  for (int jx = 0; jx < n_rows; ++jx) {
    flexkit::AffineConstraint c;
    c.label = "f" + std::to_string(jx + 1);
    c.theta = Eigen::VectorXd::NullaryExpr(n_theta,
                                           [&](Eigen::Index) { return gauss(rng); });
    if (c.theta.cwiseAbs().maxCoeff() < 0.1) c.theta(0) = 1.0;
    c.recourse = Eigen::VectorXd::Zero(0);
    c.state = Eigen::VectorXd::Zero(0);
    c.rhs = pos(rng);
    sys.inequalities.push_back(std::move(c));
  }
  return sys;
}

// Random SPD covariance via A A' + eps I.
inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(
      n, n, [&](Eigen::Index, Eigen::Index) { return gauss(rng); });
  return a * a.transpose() + 0.3 * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace testing_helpers
