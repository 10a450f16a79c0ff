// End-to-end acceptance run: pinned benchmark values, solver cross-checks
// against closed forms and exhaustive enumeration, certificate verification,
// and structural properties. Prints one PASS/FAIL line per check and exits
// nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "flexkit/centers.hpp"
#include "flexkit/feasibility.hpp"
#include "flexkit/flex.hpp"
#include "flexkit/network.hpp"
#include "flexkit/sets.hpp"
#include "flexkit/solver.hpp"
#include "helpers.hpp"

using namespace flexkit;
using namespace testing_helpers;

namespace {

int g_failures = 0;
int g_checks = 0;

void check(const std::string& name, bool ok, double got = 0.0,
           double want = 0.0) {
  ++g_checks;
  if (ok) {
    std::printf("PASS  %s\n", name.c_str());
  } else {
    ++g_failures;
    std::printf("FAIL  %s  (got %.8g, want %.8g)\n", name.c_str(), got, want);
  }
}

void check_near(const std::string& name, double got, double want, double tol) {
  check(name, std::abs(got - want) <= tol, got, want);
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

UncertaintySetSpec pnorm_set(const Eigen::VectorXd& mean, double p) {
  PNorm s;
  s.mean = mean;
  s.p = p;
  UncertaintySetSpec spec;
  spec.value = std::move(s);
  return spec;
}

// Closed-form index for a recourse-free system under an ellipsoid:
// min_j (b_j - a_j.mean)^2 / (a_j' V a_j) over rows with positive margin.
double ellipsoid_closed_form(const LinearSystem& sys, const Ellipsoid& e) {
  double best = kInf;
  for (const auto& row : sys.inequalities) {
    const double margin = row.rhs - row.theta.dot(e.mean);
    const double spread = row.theta.dot(e.covariance * row.theta);
    if (spread < 1e-14) continue;
    best = std::min(best, margin * margin / spread);
  }
  return best;
}

// --- criterion 1-3: pinned two-design benchmark -------------------------

void criterion_benchmark() {
  const double t_start = now_seconds();
  const LinearSystem a = design_a();
  const LinearSystem b = design_b();
  const UncertaintySetSpec ellip = bench_ellipsoid();
  const UncertaintySetSpec box = bench_box();

  const FlexSolution a_box = flexibility_index(a, box);
  const FlexSolution a_ell = flexibility_index(a, ellip);
  const FlexSolution b_box = flexibility_index(b, box);
  const FlexSolution b_ell = flexibility_index(b, ellip);

  check_near("benchmark: design A hyperbox F", a_box.F, 0.53, 0.01);
  check_near("benchmark: design B hyperbox F", b_box.F, 0.66, 0.01);
  check_near("benchmark: design A ellipsoid F", a_ell.F, 3.57, 0.02);
  check_near("benchmark: design B ellipsoid F", b_ell.F, 6.40, 0.02);

  check_near("benchmark: design A confidence level pct",
             100.0 * confidence_level(a_ell.F, 2), 83.2, 0.3);
  check_near("benchmark: design B confidence level pct",
             100.0 * confidence_level(b_ell.F, 2), 95.9, 0.3);

  const double t_det = now_seconds() - t_start;
  check("benchmark: deterministic block under 5 s", t_det < 5.0, t_det, 5.0);

  GaussianSpec dist;
  dist.mean = Eigen::Vector2d(4.0, 5.0);
  dist.covariance = (Eigen::Matrix2d() << 2.0, 1.0, 1.0, 3.0).finished();
  const SFEstimate sf_a = stochastic_flexibility(a, dist, 100000, 7);
  const SFEstimate sf_b = stochastic_flexibility(b, dist, 100000, 7);
  check_near("benchmark: design A stochastic flexibility pct",
             100.0 * sf_a.estimate, 96.6, 0.4);
  check_near("benchmark: design B stochastic flexibility pct",
             100.0 * sf_b.estimate, 98.9, 0.4);
  const double t_all = now_seconds() - t_start;
  check("benchmark: full block under 60 s", t_all < 60.0, t_all, 60.0);

  // criterion 2: limiting-constraint ladder for design A, ellipsoid.
  const RankResult rank = rank_constraints(a, ellip, 4);
  bool ladder_shape = rank.levels.size() == 4;
  for (const auto& lv : rank.levels)
    ladder_shape = ladder_shape && lv.labels.size() == 1;
  check("ranking: four singleton levels", ladder_shape,
        static_cast<double>(rank.levels.size()), 4.0);
  if (rank.levels.size() == 4) {
    check_near("ranking: level 1 F", rank.levels[0].F_value, 25.0 / 7.0, 0.02);
    check_near("ranking: level 2 F", rank.levels[1].F_value, 6.40, 0.02);
    check_near("ranking: level 3 F", rank.levels[2].F_value, 8.0, 0.02);
    check_near("ranking: level 4 F", rank.levels[3].F_value, 25.0 / 3.0, 0.02);
    check("ranking: ladder order f1 f2 f3 f4",
          rank.levels[0].labels[0] == "f1" && rank.levels[1].labels[0] == "f2" &&
              rank.levels[2].labels[0] == "f3" &&
              rank.levels[3].labels[0] == "f4");
    check_near("ranking: level 2 increase pct", rank.levels[1].increase_pct,
               79.3, 0.5);
    check_near("ranking: level 3 increase pct", rank.levels[2].increase_pct,
               124.1, 0.5);
  }

  // criterion 3: limiting labels flip between set geometries on design B.
  check("labels: design B hyperbox limited by f2",
        b_box.active_labels.size() >= 1 && b_box.active_labels[0] == "f2");
  check("labels: design B ellipsoid limited by f1",
        b_ell.active_labels.size() >= 1 && b_ell.active_labels[0] == "f1");
  check("labels: design A limited by f1 under both sets",
        a_box.active_labels.size() >= 1 && a_box.active_labels[0] == "f1" &&
            a_ell.active_labels.size() >= 1 && a_ell.active_labels[0] == "f1");
}

// --- criterion 4: solver cross-checks ----------------------------------

void criterion_solvers() {
  // Random recourse-free ellipsoidal instances against the closed form.
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> dim(2, 5);
  int bad = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = dim(rng);
    const LinearSystem sys = random_system(rng, n, n + 3);
    Ellipsoid e;
    e.mean = Eigen::VectorXd::Zero(n);
    e.covariance = random_spd(rng, n);
    UncertaintySetSpec spec;
    spec.value = e;
    const double want = ellipsoid_closed_form(sys, e);
    const double got = flexibility_index(sys, spec).F;
    const double rel = std::abs(got - want) / std::max(1.0, std::abs(want));
    worst = std::max(worst, rel);
    if (rel > 1e-6) ++bad;
  }
  check("solvers: 200 ellipsoidal instances match closed form to 1e-6",
        bad == 0, worst, 1e-6);

  // Random mixed-binary LPs against exhaustive enumeration.
  const int nb = 6;
  const int nc = 3;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int milp_bad = 0;
  double milp_worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    LPProblem base;
    base.resize(nb + nc);
    for (int i = 0; i < nb + nc; ++i) base.c(i) = gauss(rng);
    for (int i = 0; i < nb; ++i) {
      base.lower(i) = 0.0;
      base.upper(i) = 1.0;
    }
    for (int i = nb; i < nb + nc; ++i) {
      base.lower(i) = -5.0;
      base.upper(i) = 5.0;
    }
    // Anchor feasibility at a random mixed point.
    Eigen::VectorXd anchor(nb + nc);
    for (int i = 0; i < nb; ++i) anchor(i) = unif(rng) < 0.5 ? 0.0 : 1.0;
    for (int i = nb; i < nb + nc; ++i) anchor(i) = 4.0 * (unif(rng) - 0.5);
    for (int r = 0; r < 7; ++r) {
      LinearRow row;
      row.a = Eigen::VectorXd::NullaryExpr(
          nb + nc, [&](Eigen::Index) { return gauss(rng); });
      row.b = row.a.dot(anchor) + 0.5 * unif(rng);
      base.rows.push_back(std::move(row));
    }

    const auto relax = [&](const std::vector<int>& fix) {
      LPProblem p = base;
      for (int i = 0; i < nb; ++i) {
        if (fix[static_cast<size_t>(i)] == 0) p.upper(i) = 0.0;
        if (fix[static_cast<size_t>(i)] == 1) p.lower(i) = 1.0;
      }
      const SolveOutcome out = solve_lp(p);
      RelaxationResult res;
      res.status = out.status;
      if (out.status == SolveStatus::Optimal) {
        res.bound = out.objective;
        res.primal = out.x;
        res.binaries = out.x.head(nb);
      }
      return res;
    };
    const BnBResult got = branch_and_bound(relax, nb, BnBConfig{});

    double best = kInf;
    for (int mask = 0; mask < (1 << nb); ++mask) {
      LPProblem p = base;
      for (int i = 0; i < nb; ++i) {
        const double v = (mask >> i) & 1 ? 1.0 : 0.0;
        p.lower(i) = v;
        p.upper(i) = v;
      }
      const SolveOutcome out = solve_lp(p);
      if (out.status == SolveStatus::Optimal)
        best = std::min(best, out.objective);
    }
    if (got.status == SolveStatus::Optimal && std::isfinite(best)) {
      const double err = std::abs(got.objective - best);
      milp_worst = std::max(milp_worst, err);
      if (err > 1e-8) ++milp_bad;
    } else if ((got.status == SolveStatus::Optimal) != std::isfinite(best)) {
      ++milp_bad;
    }
  }
  check("solvers: 100 mixed-binary instances match enumeration to 1e-8",
        milp_bad == 0, milp_worst, 1e-8);
}

// --- criterion 5: confidence levels ------------------------------------

void criterion_confidence() {
  check_near("confidence: F=4.3103 n=3", confidence_level(4.3103, 3), 0.7702,
             1e-4);
  check_near("confidence: F=15.3125 n=3", confidence_level(15.3125, 3), 0.9984,
             1e-4);
  double worst = 0.0;
  for (int i = 0; i <= 500; ++i) {
    const double f = 0.1 * i;
    worst = std::max(worst,
                     std::abs(confidence_level(f, 2) - (1.0 - std::exp(-f / 2.0))));
  }
  check("confidence: n=2 closed form to 1e-10 on [0,50]", worst <= 1e-10,
        worst, 1e-10);
}

// --- criterion 6: certificates -----------------------------------------

void criterion_certificates() {
  const std::vector<std::pair<std::string, LinearSystem>> designs = {
      {"A", design_a()}, {"B", design_b()}};
  const std::vector<std::pair<std::string, UncertaintySetSpec>> sets = {
      {"ellipsoid", bench_ellipsoid()}, {"hyperbox", bench_box()}};
  for (const auto& [dname, sys] : designs) {
    for (const auto& [sname, spec] : sets) {
      const FlexSolution sol = flexibility_index(sys, spec);
      const std::string tag = "certificates: design " + dname + " " + sname;
      check(tag + " multipliers sum to one",
            std::abs(sol.lambda.sum() - 1.0) <= 1e-7 &&
                sol.lambda.minCoeff() >= -1e-9,
            sol.lambda.sum(), 1.0);
      check_near(tag + " critical point on the set boundary",
                 set_value(spec, sol.theta_star), sol.F,
                 1e-6 * (1.0 + sol.F));
      const double p = psi(sys, sol.theta_star);
      check(tag + " critical point on the feasibility boundary",
            std::abs(p) <= 1e-7, p, 0.0);
      const VerificationReport rep = verify_solution(sys, sol, 10000, 23);
      check(tag + " 10000 boundary samples without violation",
            rep.samples == 10000 && rep.violations_at_F == 0,
            static_cast<double>(rep.violations_at_F), 0.0);
    }
  }
}

// --- criterion 7: structural properties --------------------------------

void criterion_properties() {
  const LinearSystem a = design_a();
  const Eigen::VectorXd mean = Eigen::Vector2d(4.0, 5.0);

  // Nested sets order the index: the unit l1 ball sits inside the l2 ball,
  // which sits inside the max-norm ball, so F can only shrink outward.
  const double f1 = flexibility_index(a, pnorm_set(mean, 1.0)).F;
  const double f2 = flexibility_index(a, pnorm_set(mean, 2.0)).F;
  const double fi = flexibility_index(a, pnorm_set(mean, kInf)).F;
  check("properties: nested norm balls order the index",
        f1 >= f2 - 1e-9 && f2 >= fi - 1e-9, f2, fi);

  // CVaR norm interpolates between those extremes.
  CVaRNorm c0;
  c0.mean = mean;
  c0.alpha = 0.0;
  CVaRNorm c1;
  c1.mean = mean;
  c1.alpha = 0.5;  // (n-1)/n with n = 2
  UncertaintySetSpec s0, s1;
  s0.value = c0;
  s1.value = c1;
  check_near("properties: cvar alpha=0 reproduces the l1 index",
             flexibility_index(a, s0).F, f1, 1e-8 * (1.0 + f1));
  check_near("properties: cvar alpha=(n-1)/n reproduces the max-norm index",
             flexibility_index(a, s1).F, fi, 1e-8 * (1.0 + fi));

  // Intersection dominance: cutting the set away can only raise the index.
  Halfspaces hs;
  hs.A = (Eigen::MatrixXd(1, 2) << 0.0, 1.0).finished();
  hs.b = Eigen::VectorXd::Constant(1, 5.0);
  Intersection inter;
  inter.members.push_back(bench_ellipsoid());
  UncertaintySetSpec member;
  member.value = hs;
  inter.members.push_back(member);
  UncertaintySetSpec ispec;
  ispec.value = inter;
  const double f_ell = flexibility_index(a, bench_ellipsoid()).F;
  const double f_cut = flexibility_index(a, ispec).F;
  check("properties: intersection dominates its members",
        f_cut >= f_ell - 1e-9, f_cut, f_ell);

  // Ranking ladders never decrease.
  const RankResult rank = rank_constraints(a, bench_ellipsoid(), 4);
  bool monotone = true;
  for (size_t i = 1; i < rank.levels.size(); ++i)
    monotone = monotone &&
               rank.levels[i].F_value >= rank.levels[i - 1].F_value - 1e-9;
  check("properties: ranking ladder is monotone", monotone);

  // Scaling the set devs by s scales the index by 1/s.
  Hyperbox wide = *bench_box().as<Hyperbox>();
  wide.dev_minus *= 4.0;
  wide.dev_plus *= 4.0;
  UncertaintySetSpec wspec;
  wspec.value = wide;
  const double f_box = flexibility_index(a, bench_box()).F;
  const double f_wide = flexibility_index(a, wspec).F;
  check_near("properties: inverse scale law", f_wide, f_box / 4.0, 1e-9);

  // The feasible center minimizes psi against a dense probe cloud.
  const CenterResult fc = feasible_center(a);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-2.0, 16.0);
  double best_probe = kInf;
  for (int i = 0; i < 10000; ++i)
    best_probe =
        std::min(best_probe, psi(a, Eigen::Vector2d(u(rng), u(rng))));
  check("properties: feasible center attains the minimal psi",
        fc.psi_at_center <= best_probe + 1e-7, fc.psi_at_center, best_probe);

  // Network translation: row counts, conservation, and the capacity ladder
  // putting the supplier level ahead of both arcs.
  NetworkModel net;
  net.nodes = {"n1", "n2", "n3"};
  net.arcs = {{"a21", "n2", "n1", 35.0}, {"a23", "n2", "n3", 50.0}};
  net.suppliers = {{"s2", "n2", 100.0}};
  net.demands = {{"d1", "n1", true, 0.0},
                 {"d2", "n2", true, 0.0},
                 {"d3", "n3", true, 0.0}};
  const LinearSystem nsys = build_system(net);
  check("properties: network system has 2 rows per arc + 2 per supplier",
        nsys.inequalities.size() == 6 && nsys.equalities.size() == 3 &&
            nsys.n_recourse() == 3);
  Eigen::VectorXd colsum = Eigen::VectorXd::Zero(nsys.n_recourse());
  for (const auto& h : nsys.equalities) colsum += h.recourse;
  check("properties: balance rows conserve arc flow",
        colsum.head(2).cwiseAbs().maxCoeff() == 0.0 && colsum(2) == 1.0);

  Ellipsoid ne;
  ne.mean = Eigen::Vector3d(0.0, 50.0, 0.0);
  ne.covariance = (Eigen::Matrix3d() << 80.0, 50.0, 50.0, 50.0, 80.0, 50.0,
                   50.0, 50.0, 120.0)
                      .finished();
  UncertaintySetSpec nspec;
  nspec.value = ne;
  const RankResult nrank = rank_constraints(nsys, nspec, 4);
  bool supplier_first = nrank.levels.size() >= 3;
  if (supplier_first) {
    bool sup = false;
    for (const auto& lab : nrank.levels[0].labels)
      sup = sup || lab.rfind("gamma_", 0) == 0;
    bool arcs_later = true;
    for (const auto& lab : nrank.levels[0].labels)
      arcs_later = arcs_later && lab.rfind("lambda_", 0) != 0;
    supplier_first = sup && arcs_later;
  }
  check("properties: supplier level precedes the arc levels", supplier_first);
  if (nrank.levels.size() >= 3) {
    check_near("properties: network ladder level 1", nrank.levels[0].F_value,
               2500.0 / 580.0, 1e-5);
    check_near("properties: network ladder level 2", nrank.levels[1].F_value,
               1225.0 / 80.0, 1e-4);
    check_near("properties: network ladder level 3", nrank.levels[2].F_value,
               2500.0 / 120.0, 1e-4);
  }
}

}  // namespace

int main() {
  criterion_benchmark();
  criterion_solvers();
  criterion_confidence();
  criterion_certificates();
  criterion_properties();
  std::printf("----\n%d checks, %d failures\n", g_checks, g_failures);
  return g_failures == 0 ? 0 : 1;
}
