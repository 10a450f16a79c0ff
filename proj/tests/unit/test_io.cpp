#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "flexkit/json_io.hpp"
#include "helpers.hpp"

using namespace flexkit;
using namespace testing_helpers;
using nlohmann::json;

TEST_CASE("sig6 rounds to six significant digits") {
  CHECK(sig6(3.14159265358979) == 3.14159);
  CHECK(sig6(123456789.0) == 123457000.0);
  CHECK(sig6(-0.00012345654) == -0.000123457);
  CHECK(sig6(0.0) == 0.0);
  CHECK(sig6(-2.0) == -2.0);
  CHECK(std::isinf(sig6(kInf)));
  CHECK(sig6(0.999999949) == 1.0);  // carries into the next decade
}

TEST_CASE("system serialization round-trips exactly") {
  LinearSystem sys;
  sys.theta_names = {"t1", "t2"};
  sys.recourse_names = {"z1"};
  sys.state_names = {"x1"};
  AffineConstraint g;
  g.label = "g1";
  g.theta = Eigen::Vector2d(0.123456789123, -7.0);
  g.recourse = Eigen::VectorXd::Constant(1, 1.5);
  g.state = Eigen::VectorXd::Constant(1, -0.25);
  g.rhs = 14.0000001;
  AffineConstraint h = g;
  h.label = "h1";
  h.state = Eigen::VectorXd::Constant(1, 2.0);
  sys.inequalities = {g};
  sys.equalities = {h};

  LinearSystem back = system_from_json(to_json(sys));
  CHECK(back.theta_names == sys.theta_names);
  CHECK(back.recourse_names == sys.recourse_names);
  CHECK(back.state_names == sys.state_names);
  REQUIRE(back.inequalities.size() == 1);
  REQUIRE(back.equalities.size() == 1);
  CHECK(back.inequalities[0].label == "g1");
  CHECK((back.inequalities[0].theta - g.theta).norm() == 0.0);
  CHECK(back.inequalities[0].rhs == g.rhs);
  CHECK((back.equalities[0].state - h.state).norm() == 0.0);
}

TEST_CASE("missing coefficient arrays default to zeros") {
  json j = {{"theta", {"t1", "t2"}},
            {"inequalities",
             {{{"label", "f1"}, {"theta", {1.0, 1.0}}, {"rhs", 14.0}},
              {{"label", "f2"}, {"rhs", 1.0}}}}};
  LinearSystem sys = system_from_json(j);
  REQUIRE(sys.inequalities.size() == 2);
  CHECK(sys.inequalities[1].theta.isZero(0.0));
  CHECK(sys.inequalities[1].theta.size() == 2);
}

TEST_CASE("malformed systems are rejected as input errors") {
  CHECK_THROWS_AS(system_from_json(json::array()), InputError);
  CHECK_THROWS_AS(system_from_json(json{{"theta", json::array()}}), InputError);
  CHECK_THROWS_AS(
      system_from_json(json{{"theta", {"t1"}}, {"inequalities", json::array()}}),
      InputError);
  // missing rhs
  CHECK_THROWS_AS(
      system_from_json(json{{"theta", {"t1"}},
                            {"inequalities",
                             {{{"label", "f1"}, {"theta", {1.0}}}}}}),
      InputError);
  // wrong coefficient length
  CHECK_THROWS_AS(
      system_from_json(json{
          {"theta", {"t1"}},
          {"inequalities",
           {{{"label", "f1"}, {"theta", {1.0, 2.0}}, {"rhs", 1.0}}}}}),
      InputError);
  // duplicate labels surface through validation
  CHECK_THROWS_AS(
      system_from_json(json{
          {"theta", {"t1"}},
          {"inequalities",
           {{{"label", "f1"}, {"theta", {1.0}}, {"rhs", 1.0}},
            {{"label", "f1"}, {"theta", {-1.0}}, {"rhs", 0.0}}}}}),
      InputError);
}

TEST_CASE("every set type parses from json") {
  json mean = {0.0, 0.0};
  CHECK(set_type_name(set_from_json(json{
            {"type", "ellipsoid"},
            {"mean", mean},
            {"covariance", {{2.0, 1.0}, {1.0, 3.0}}}})) == "ellipsoid");
  CHECK(set_type_name(set_from_json(json{{"type", "hyperbox"},
                                         {"mean", mean},
                                         {"dev_minus", {1.0, 1.0}},
                                         {"dev_plus", {1.0, 1.0}}})) ==
        "hyperbox");
  CHECK(set_type_name(set_from_json(
            json{{"type", "pnorm"}, {"mean", mean}, {"p", 1.0}})) == "pnorm");
  UncertaintySetSpec inf_ball =
      set_from_json(json{{"type", "pnorm"}, {"mean", mean}, {"p", "inf"}});
  REQUIRE(inf_ball.as<PNorm>() != nullptr);
  CHECK(std::isinf(inf_ball.as<PNorm>()->p));
  CHECK(set_type_name(set_from_json(json{{"type", "cvar"},
                                         {"mean", mean},
                                         {"alpha", 0.3}})) == "cvar");
  UncertaintySetSpec inter = set_from_json(json{
      {"type", "intersection"},
      {"members",
       {{{"type", "hyperbox"},
         {"mean", mean},
         {"dev_minus", {1.0, 1.0}},
         {"dev_plus", {1.0, 1.0}}},
        {{"type", "nonnegative"}, {"dimension", 2}}}}});
  CHECK(set_type_name(inter) == "intersection");
  REQUIRE(inter.as<Intersection>() != nullptr);
  const auto& members = inter.as<Intersection>()->members;
  REQUIRE(members.size() == 2);
  const auto* hs = members[1].as<Halfspaces>();
  REQUIRE(hs != nullptr);
  CHECK((hs->A + Eigen::Matrix2d::Identity()).norm() == 0.0);
  CHECK(hs->b.isZero(0.0));
}

TEST_CASE("set parsing rejects bad content") {
  CHECK_THROWS_AS(set_from_json(json{{"type", "wedge"}}), InputError);
  CHECK_THROWS_AS(set_from_json(json{{"type", "pnorm"},
                                     {"mean", {0.0}},
                                     {"p", 3.0}}),
                  InputError);
  CHECK_THROWS_AS(set_from_json(json{{"type", "ellipsoid"},
                                     {"mean", {0.0, 0.0}},
                                     {"covariance", {{1.0, 2.0}, {2.0, 1.0}}}}),
                  InputError);
  CHECK_THROWS_AS(set_from_json(json{{"type", "nonnegative"},
                                     {"dimension", 1.5}}),
                  InputError);
  // a bare halfspace set is not compact
  CHECK_THROWS_AS(set_from_json(json{{"type", "nonnegative"},
                                     {"dimension", 2}}),
                  InputError);
  // ragged covariance
  CHECK_THROWS_AS(
      set_from_json(json{{"type", "ellipsoid"},
                         {"mean", {0.0, 0.0}},
                         {"covariance", {{1.0, 0.0}, {0.0}}}}),
      InputError);
}

TEST_CASE("distributions parse with optional truncation") {
  GaussianSpec d = dist_from_json(json{
      {"mean", {4.0, 5.0}}, {"covariance", {{2.0, 1.0}, {1.0, 3.0}}}});
  CHECK(!d.truncated);
  CHECK(d.mean(1) == 5.0);
  GaussianSpec t = dist_from_json(json{{"mean", {1.0}},
                                       {"covariance", {{1.0}}},
                                       {"truncated", true}});
  CHECK(t.truncated);
  CHECK_THROWS_AS(dist_from_json(json{{"mean", {1.0, 2.0}},
                                      {"covariance", {{1.0}}}}),
                  InputError);
  CHECK_THROWS_AS(dist_from_json(json{{"mean", {1.0}},
                                      {"covariance", {{1.0}}},
                                      {"truncated", 1}}),
                  InputError);
}

TEST_CASE("bundled data files load and agree with the benchmark") {
  LinearSystem a = load_system(data_path("designA.json"));
  UncertaintySetSpec ellip = load_set(data_path("ellip.json"));
  UncertaintySetSpec box = load_set(data_path("box.json"));
  GaussianSpec dist = load_dist(data_path("gauss.json"));
  CHECK(a.n_theta() == 2);
  CHECK(set_type_name(ellip) == "ellipsoid");
  CHECK(set_type_name(box) == "hyperbox");
  CHECK(dist.mean(0) == 4.0);
  FlexSolution sol = flexibility_index(a, ellip);
  CHECK(sol.F == doctest::Approx(25.0 / 7.0).epsilon(1e-6));
  CHECK_THROWS_AS(load_system(data_path("no_such_file.json")), InputError);
}

TEST_CASE("network serialization is idempotent") {
  NetworkModel net = load_network(data_path("three_node_design1.json"));
  CHECK(net.nodes.size() == 3);
  CHECK(net.arcs.size() == 2);
  CHECK(net.suppliers.size() == 1);
  json once = to_json(net);
  NetworkModel back = network_from_json(once);
  CHECK(to_json(back) == once);
  LinearSystem sys = build_system(back);
  CHECK(sys.inequalities.size() == 6);
}

TEST_CASE("flex solution json carries labeled multipliers") {
  LinearSystem sys = design_a();
  FlexSolution sol = flexibility_index(sys, bench_ellipsoid());
  json j = to_json(sol, sys);
  CHECK(j["F"] == sig6(25.0 / 7.0));
  CHECK(j["set"] == "ellipsoid");
  CHECK(j["status"] == "Optimal");
  REQUIRE(j["multipliers"]["lambda"].contains("f1"));
  CHECK(j["multipliers"]["lambda"]["f1"].get<double>() ==
        doctest::Approx(1.0));
  CHECK(j["theta_star"].size() == 2);
}

TEST_CASE("rank csv lays out levels with space-joined labels") {
  RankResult r;
  r.levels.push_back({1, {"f1"}, 3.571428, 0.0});
  r.levels.push_back({2, {"f2", "f3"}, 8.0, 124.0});
  const std::string csv = rank_csv(r);
  CHECK(csv ==
        "level,constraints,F,increase_pct\n"
        "1,f1,3.57143,0\n"
        "2,f2 f3,8,124\n");
}

TEST_CASE("compare csv leaves failed cells empty and scales to percent") {
  CompareRow good;
  good.name = "designA";
  CompareCell box{true, 0.529717, ""};
  CompareCell ellip{true, 3.5714285, ""};
  good.F = {box, ellip};
  good.has_alpha = true;
  good.alpha_star = 0.83232;
  good.has_sf = true;
  good.sf.estimate = 0.96285;
  CompareRow bad;
  bad.name = "broken";
  bad.F = {CompareCell{false, 0.0, "unbounded"}, CompareCell{false, 0.0, ""}};
  const std::string csv = compare_csv({good, bad}, 0, 1);
  CHECK(csv ==
        "design,F_box,F_ellip,alpha_star_pct,SF_pct\n"
        "designA,0.529717,3.57143,83.232,96.285\n"
        "broken,,,,\n");
  // column indices outside the set list leave the cells empty
  const std::string none = compare_csv({good}, -1, 1);
  CHECK(none.find("designA,,3.57143") != std::string::npos);
}
