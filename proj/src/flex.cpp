#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "flexkit/flex.hpp"

namespace flexkit {

const char* to_string(RankTermination t) {
  switch (t) {
    case RankTermination::MaxLevels: return "max_levels";
    case RankTermination::Unbounded: return "unbounded";
    case RankTermination::Exhausted: return "exhausted";
  }
  return "?";
}

namespace {

constexpr double kActiveLambdaTol = 1e-7;

enum class Route { Lp, Quad, Bisect };

// Variable layout of the KKT program:
// [delta?] theta z x lambda s y mu w
struct Layout {
  Eigen::Index nt = 0, nz = 0, nx = 0, nJ = 0, nI = 0, naux = 0;
  bool has_delta = false;
  Eigen::Index delta = -1, theta = 0, z = 0, x = 0, lam = 0, s = 0, y = 0,
               mu = 0, w = 0, total = 0;

  void place() {
    Eigen::Index at = 0;
    if (has_delta) delta = at++;
    theta = at; at += nt;
    z = at; at += nz;
    x = at; at += nx;
    lam = at; at += nJ;
    s = at; at += nJ;
    y = at; at += nJ;
    mu = at; at += nI;
    w = at; at += naux;
    total = at;
  }
};

struct MipContext {
  const LinearSystem* sys = nullptr;
  std::vector<const AffineConstraint*> rows;  // non-vacuous inequalities
  std::vector<size_t> row_index;              // position in sys->inequalities
  CompiledSetConstraints cs;
  Route route = Route::Lp;
  double big_m = 0.0;
  long nodes = 0;
};

double quad_level(const QuadConstraint& q, double delta) {
  return q.kind == QuadKind::MahalanobisLevel ? delta : delta * delta;
}

double quad_to_delta(const QuadConstraint& q, double value) {
  return q.kind == QuadKind::MahalanobisLevel ? value
                                              : std::sqrt(std::max(value, 0.0));
}

// Shared row/bound assembly. delta_fixed only matters when the layout has no
// delta variable but the compiled set references it.
QPProblem assemble(const MipContext& ctx, const Layout& L, double delta_fixed) {
  const LinearSystem& sys = *ctx.sys;
  QPProblem p;
  p.resize(L.total);

  if (L.has_delta) p.lower(L.delta) = 0.0;
  for (Eigen::Index j = 0; j < L.nJ; ++j) {
    p.lower(L.lam + j) = 0.0;
    p.upper(L.lam + j) = 1.0;
    p.lower(L.s + j) = 0.0;
    p.upper(L.s + j) = ctx.big_m;
    p.lower(L.y + j) = 0.0;
    p.upper(L.y + j) = 1.0;
  }
  for (Eigen::Index a = 0; a < L.naux; ++a)
    p.lower(L.w + a) = ctx.cs.aux_lower(a);

  auto body = [&](const AffineConstraint& c, Eigen::VectorXd& a) {
    a.segment(L.theta, L.nt) = c.theta;
    a.segment(L.z, L.nz) = c.recourse;
    a.segment(L.x, L.nx) = c.state;
  };

  // f_j + s_j = 0
  for (Eigen::Index j = 0; j < L.nJ; ++j) {
    LinearRow r;
    r.a = Eigen::VectorXd::Zero(L.total);
    body(*ctx.rows[static_cast<size_t>(j)], r.a);
    r.a(L.s + j) = 1.0;
    r.sense = RowSense::EQ;
    r.b = ctx.rows[static_cast<size_t>(j)]->rhs;
    p.rows.push_back(std::move(r));
  }
  // h_i = 0
  for (Eigen::Index i = 0; i < L.nI; ++i) {
    LinearRow r;
    r.a = Eigen::VectorXd::Zero(L.total);
    body(sys.equalities[static_cast<size_t>(i)], r.a);
    r.sense = RowSense::EQ;
    r.b = sys.equalities[static_cast<size_t>(i)].rhs;
    p.rows.push_back(std::move(r));
  }
  // sum lambda = 1
  {
    LinearRow r;
    r.a = Eigen::VectorXd::Zero(L.total);
    r.a.segment(L.lam, L.nJ).setOnes();
    r.sense = RowSense::EQ;
    r.b = 1.0;
    p.rows.push_back(std::move(r));
  }
  // stationarity over every inner variable (recourse and state)
  for (Eigen::Index k = 0; k < L.nz + L.nx; ++k) {
    LinearRow r;
    r.a = Eigen::VectorXd::Zero(L.total);
    for (Eigen::Index j = 0; j < L.nJ; ++j) {
      const auto& c = *ctx.rows[static_cast<size_t>(j)];
      r.a(L.lam + j) = k < L.nz ? c.recourse(k) : c.state(k - L.nz);
    }
    for (Eigen::Index i = 0; i < L.nI; ++i) {
      const auto& c = sys.equalities[static_cast<size_t>(i)];
      r.a(L.mu + i) = k < L.nz ? c.recourse(k) : c.state(k - L.nz);
    }
    r.sense = RowSense::EQ;
    r.b = 0.0;
    p.rows.push_back(std::move(r));
  }
  // lambda_j <= y_j and s_j <= U (1 - y_j)
  for (Eigen::Index j = 0; j < L.nJ; ++j) {
    LinearRow r1;
    r1.a = Eigen::VectorXd::Zero(L.total);
    r1.a(L.lam + j) = 1.0;
    r1.a(L.y + j) = -1.0;
    r1.sense = RowSense::LE;
    r1.b = 0.0;
    p.rows.push_back(std::move(r1));
    LinearRow r2;
    r2.a = Eigen::VectorXd::Zero(L.total);
    r2.a(L.s + j) = 1.0;
    r2.a(L.y + j) = ctx.big_m;
    r2.sense = RowSense::LE;
    r2.b = ctx.big_m;
    p.rows.push_back(std::move(r2));
  }
  // theta in T(delta): compiled linear rows
  for (const auto& sr : ctx.cs.rows) {
    LinearRow r;
    r.a = Eigen::VectorXd::Zero(L.total);
    r.a.segment(L.theta, L.nt) = sr.a_theta;
    for (Eigen::Index a = 0; a < sr.a_aux.size(); ++a)
      r.a(L.w + a) = sr.a_aux(a);
    r.sense = RowSense::LE;
    if (L.has_delta) {
      r.a(L.delta) = sr.c_delta;
      r.b = sr.rhs;
    } else {
      r.b = sr.rhs - sr.c_delta * delta_fixed;
    }
    p.rows.push_back(std::move(r));
  }
  return p;
}

// Puts the single quadratic member's form into the objective:
// q(theta) = (theta - c)' M (theta - c).
void set_quad_objective(QPProblem& p, const Layout& L, const QuadConstraint& q,
                        double* offset) {
  p.Q.block(L.theta, L.theta, L.nt, L.nt) = 2.0 * q.inv;
  p.c.segment(L.theta, L.nt) = -2.0 * (q.inv * q.center);
  *offset = q.center.dot(q.inv * q.center);
}

struct MipSolve {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = kInf;  // delta (Lp) or quad value (Quad/Bisect)
  Eigen::VectorXd primal;
  double gap = 0.0;
};

// One branch-and-bound run over the y binaries. forbid_y (when >= 0) fixes
// that binary to zero; delta_cap (when finite, Lp route) caps the delta
// variable for the alternate-optima sweep.
MipSolve run_mip(MipContext& ctx, const Layout& L, double delta_fixed,
                 const BnBConfig& config, Eigen::Index forbid_y = -1,
                 double delta_cap = kInf) {
  QPProblem base = assemble(ctx, L, delta_fixed);
  const bool use_lp = ctx.route == Route::Lp;
  double offset = 0.0;
  if (use_lp) {
    base.c(L.delta) = 1.0;
    if (std::isfinite(delta_cap)) base.upper(L.delta) = delta_cap;
  } else {
    set_quad_objective(base, L, ctx.cs.quads.front(), &offset);
  }
  if (forbid_y >= 0) base.upper(L.y + forbid_y) = 0.0;

  RelaxationSolver relax = [&](const std::vector<int>& fixings) {
    QPProblem node = base;
    for (Eigen::Index j = 0; j < L.nJ; ++j) {
      if (fixings[static_cast<size_t>(j)] == 0) node.upper(L.y + j) = 0.0;
      if (fixings[static_cast<size_t>(j)] == 1) node.lower(L.y + j) = 1.0;
    }
    SolveOutcome out;
    if (use_lp) {
      LPProblem lp;
      lp.c = node.c;
      lp.rows = node.rows;
      lp.lower = node.lower;
      lp.upper = node.upper;
      out = solve_lp(lp);
    } else {
      out = solve_qp(node);
    }
    RelaxationResult r;
    r.status = out.status;
    if (out.status == SolveStatus::Optimal) {
      r.bound = out.objective + offset;
      r.primal = out.x;
      r.binaries = out.x.segment(L.y, L.nJ);
    }
    return r;
  };

  BnBResult bb = branch_and_bound(relax, static_cast<int>(L.nJ), config);
  ctx.nodes += bb.nodes;
  MipSolve ms;
  ms.status = bb.status;
  ms.gap = bb.gap;
  if (bb.status == SolveStatus::Optimal || bb.status == SolveStatus::NodeLimit) {
    if (bb.incumbent.status == SolveStatus::Optimal) {
      ms.objective = bb.objective;
      ms.primal = bb.incumbent.primal;
    } else if (bb.status == SolveStatus::Optimal) {
      ms.status = SolveStatus::Infeasible;
    }
    // NodeLimit without an incumbent keeps its status and carries no primal;
    // callers must surface it rather than conclude anything about the model.
  }
  return ms;
}

void harvest_labels(const MipContext& ctx, const Layout& L,
                    const Eigen::VectorXd& v,
                    std::vector<std::string>* active,
                    std::vector<std::string>* weakly) {
  for (Eigen::Index j = 0; j < L.nJ; ++j) {
    if (v(L.y + j) < 0.5) continue;
    const std::string& lab = ctx.rows[static_cast<size_t>(j)]->label;
    if (v(L.lam + j) > kActiveLambdaTol) {
      if (active) active->push_back(lab);
    } else {
      if (weakly) weakly->push_back(lab);
    }
  }
}

FlexSolution extract(const MipContext& ctx, const Layout& L,
                     const Eigen::VectorXd& v, double F,
                     const UncertaintySetSpec& set) {
  const LinearSystem& sys = *ctx.sys;
  FlexSolution sol;
  sol.F = F;
  sol.theta_star = v.segment(L.theta, L.nt);
  sol.z_star = v.segment(L.z, L.nz);
  sol.x_star = v.segment(L.x, L.nx);
  sol.lambda = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(sys.inequalities.size()));
  sol.slacks = Eigen::VectorXd::Zero(sol.lambda.size());
  for (Eigen::Index j = 0; j < L.nJ; ++j) {
    sol.lambda(static_cast<Eigen::Index>(ctx.row_index[static_cast<size_t>(j)])) =
        v(L.lam + j);
  }
  for (size_t jj = 0; jj < sys.inequalities.size(); ++jj) {
    const auto& c = sys.inequalities[jj];
    sol.slacks(static_cast<Eigen::Index>(jj)) =
        c.rhs - c.theta.dot(sol.theta_star) - c.recourse.dot(sol.z_star) -
        c.state.dot(sol.x_star);
  }
  sol.mu = v.segment(L.mu, L.nI);
  harvest_labels(ctx, L, v, &sol.active_labels, &sol.weakly_active_labels);
  sol.set_used = set;
  return sol;
}

MipContext make_context(const LinearSystem& sys, const UncertaintySetSpec& set,
                        double big_m) {
  MipContext ctx;
  ctx.sys = &sys;
  for (size_t j = 0; j < sys.inequalities.size(); ++j) {
    if (!sys.inequalities[j].is_vacuous()) {
      ctx.rows.push_back(&sys.inequalities[j]);
      ctx.row_index.push_back(j);
    }
  }
  ctx.cs = compile(set);
  if (static_cast<Eigen::Index>(sys.theta_names.size()) != ctx.cs.n_theta)
    throw DimensionMismatch(
        "flexibility_index: set dimension differs from the system's theta");
  if (ctx.cs.quads.size() > 1)
    throw InputError(
        "flexibility_index: more than one quadratic set member is not "
        "supported");
  if (ctx.cs.quads.empty())
    ctx.route = Route::Lp;
  else if (!ctx.cs.delta_in_rows())
    ctx.route = Route::Quad;
  else
    ctx.route = Route::Bisect;

  if (big_m > 0.0) {
    ctx.big_m = big_m;
  } else {
    double scale = 0.0;
    for (const auto* r : ctx.rows) scale = std::max(scale, std::abs(r->rhs));
    for (const auto& h : sys.equalities)
      scale = std::max(scale, std::abs(h.rhs));
    ctx.big_m = 1e4 * (1.0 + scale);
  }
  return ctx;
}

Layout make_layout(const MipContext& ctx, bool with_delta) {
  Layout L;
  L.nt = ctx.sys->n_theta();
  L.nz = ctx.sys->n_recourse();
  L.nx = ctx.sys->n_state();
  L.nJ = static_cast<Eigen::Index>(ctx.rows.size());
  L.nI = static_cast<Eigen::Index>(ctx.sys->equalities.size());
  L.naux = ctx.cs.n_aux;
  L.has_delta = with_delta;
  L.place();
  return L;
}

FlexSolution solve_zero_index(const LinearSystem& sys,
                              const UncertaintySetSpec& set,
                              const Eigen::VectorXd& nominal) {
  // The nominal point already sits on the boundary: F = 0 with the touching
  // constraints marked active.
  FlexSolution sol;
  sol.F = 0.0;
  sol.theta_star = nominal;
  sol.z_star = Eigen::VectorXd::Zero(sys.n_recourse());
  sol.x_star = Eigen::VectorXd::Zero(sys.n_state());
  const Eigen::Index nj = static_cast<Eigen::Index>(sys.inequalities.size());
  sol.lambda = Eigen::VectorXd::Zero(nj);
  sol.slacks = Eigen::VectorXd::Zero(nj);
  sol.mu = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(sys.equalities.size()));
  // Evaluate at the psi-optimal recourse when the system has any.
  if (sys.n_recourse() + sys.n_state() > 0) {
    // Recompute the inner LP to obtain an attaining point.
    LPProblem lp;
    const Eigen::Index nz = sys.n_recourse(), nx = sys.n_state();
    lp.resize(nz + nx + 1);
    lp.c(nz + nx) = 1.0;
    for (const auto& f : sys.inequalities) {
      LinearRow r;
      r.a = Eigen::VectorXd::Zero(nz + nx + 1);
      r.a.head(nz) = f.recourse;
      r.a.segment(nz, nx) = f.state;
      r.a(nz + nx) = -1.0;
      r.b = f.rhs - f.theta.dot(nominal);
      lp.rows.push_back(std::move(r));
    }
    for (const auto& h : sys.equalities) {
      LinearRow r;
      r.a = Eigen::VectorXd::Zero(nz + nx + 1);
      r.a.head(nz) = h.recourse;
      r.a.segment(nz, nx) = h.state;
      r.sense = RowSense::EQ;
      r.b = h.rhs - h.theta.dot(nominal);
      lp.rows.push_back(std::move(r));
    }
    SolveOutcome out = solve_lp(lp);
    if (out.status == SolveStatus::Optimal) {
      sol.z_star = out.x.head(nz);
      sol.x_star = out.x.segment(nz, nx);
    }
  }
  double n_active = 0;
  for (Eigen::Index j = 0; j < nj; ++j) {
    const auto& c = sys.inequalities[static_cast<size_t>(j)];
    sol.slacks(j) = c.rhs - c.theta.dot(sol.theta_star) -
                    c.recourse.dot(sol.z_star) - c.state.dot(sol.x_star);
    if (std::abs(sol.slacks(j)) <= 1e-8) {
      sol.active_labels.push_back(c.label);
      n_active += 1.0;
    }
  }
  for (Eigen::Index j = 0; j < nj; ++j)
    if (std::abs(sol.slacks(j)) <= 1e-8) sol.lambda(j) = 1.0 / n_active;
  sol.set_used = set;
  return sol;
}

}  // namespace

FlexSolution flexibility_index(const LinearSystem& system,
                               const UncertaintySetSpec& set,
                               const BnBConfig& config, double feas_tol) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_spec(set);
  const Eigen::VectorXd nominal = nominal_point(set);
  const double psi0 = psi(system, nominal);
  if (psi0 > kPsiFeasTol)
    throw InfeasibleNominal(
        "flexibility_index: the system is infeasible at the nominal point "
        "(psi = " + std::to_string(psi0) + ")");
  if (psi0 >= -kPsiFeasTol) {
    FlexSolution sol = solve_zero_index(system, set, nominal);
    sol.stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return sol;
  }

  MipContext ctx = make_context(system, set, config.big_m);
  if (ctx.rows.empty())
    throw UnboundedModel(
        "flexibility_index: no inequality can limit flexibility");

  FlexSolution sol;
  for (int attempt = 0;; ++attempt) {
    ctx.nodes = 0;
    if (ctx.route == Route::Lp) {
      Layout L = make_layout(ctx, true);
      MipSolve ms = run_mip(ctx, L, 0.0, config);
      if (ms.status == SolveStatus::Infeasible)
        throw UnboundedModel(
            "flexibility_index: the uncertainty set never reaches the "
            "feasible-region boundary");
      if (ms.status != SolveStatus::Optimal &&
          ms.status != SolveStatus::NodeLimit)
        throw NumericalBreakdown("flexibility_index: search failed");
      if (ms.status == SolveStatus::NodeLimit && ms.primal.size() == 0)
        throw NumericalBreakdown(
            "flexibility_index: node limit reached before an incumbent was "
            "found; raise the node budget");
      sol = extract(ctx, L, ms.primal, ms.objective, set);
      sol.status = ms.status;
      sol.gap = ms.gap;
      // Alternate-optima sweep: co-limiting constraints at the same delta.
      if (ms.status == SolveStatus::Optimal) {
        const double cap = sol.F + 1e-6 * (1.0 + sol.F);
        std::vector<std::string> seed_active = sol.active_labels;
        for (const auto& lab : seed_active) {
          Eigen::Index jj = -1;
          for (Eigen::Index j = 0; j < L.nJ; ++j)
            if (ctx.rows[static_cast<size_t>(j)]->label == lab) jj = j;
          MipSolve alt = run_mip(ctx, L, 0.0, config, jj, cap);
          if (alt.status == SolveStatus::Optimal)
            harvest_labels(ctx, L, alt.primal, &sol.active_labels, nullptr);
        }
      }
    } else if (ctx.route == Route::Quad) {
      Layout L = make_layout(ctx, false);
      MipSolve ms = run_mip(ctx, L, 0.0, config);
      if (ms.status == SolveStatus::Infeasible)
        throw UnboundedModel(
            "flexibility_index: the uncertainty set never reaches the "
            "feasible-region boundary");
      if (ms.status != SolveStatus::Optimal &&
          ms.status != SolveStatus::NodeLimit)
        throw NumericalBreakdown("flexibility_index: search failed");
      if (ms.status == SolveStatus::NodeLimit && ms.primal.size() == 0)
        throw NumericalBreakdown(
            "flexibility_index: node limit reached before an incumbent was "
            "found; raise the node budget");
      const auto& q = ctx.cs.quads.front();
      sol = extract(ctx, L, ms.primal, quad_to_delta(q, ms.objective), set);
      sol.status = ms.status;
      sol.gap = ms.gap;
      if (ms.status == SolveStatus::Optimal) {
        const double cap = ms.objective + 1e-6 * (1.0 + ms.objective);
        std::vector<std::string> seed_active = sol.active_labels;
        for (const auto& lab : seed_active) {
          Eigen::Index jj = -1;
          for (Eigen::Index j = 0; j < L.nJ; ++j)
            if (ctx.rows[static_cast<size_t>(j)]->label == lab) jj = j;
          MipSolve alt = run_mip(ctx, L, 0.0, config, jj);
          if (alt.status == SolveStatus::Optimal && alt.objective <= cap)
            harvest_labels(ctx, L, alt.primal, &sol.active_labels, nullptr);
        }
      }
    } else {
      // Mixed quadratic/linear composites: bisection on delta, each probe a
      // feasibility MIP (minimize the quadratic form, compare to its level).
      Layout L = make_layout(ctx, false);
      const auto& q = ctx.cs.quads.front();
      auto probe = [&](double delta,
                       Eigen::Index forbid = -1) -> MipSolve {
        MipSolve ms = run_mip(ctx, L, delta, config, forbid);
        if (ms.status == SolveStatus::Optimal &&
            ms.objective > quad_level(q, delta) + 1e-9 * (1.0 + delta))
          ms.status = SolveStatus::Infeasible;
        return ms;
      };
      double hi = 1.0;
      MipSolve at_hi = probe(hi);
      int grow = 0;
      while (at_hi.status != SolveStatus::Optimal) {
        if (++grow > 60)
          throw UnboundedModel(
              "flexibility_index: the uncertainty set never reaches the "
              "feasible-region boundary");
        hi *= 2.0;
        at_hi = probe(hi);
      }
      double lo = 0.0;
      while (hi - lo > std::max(config.rel_gap * hi, 1e-12)) {
        const double mid = 0.5 * (lo + hi);
        MipSolve at_mid = probe(mid);
        if (at_mid.status == SolveStatus::Optimal) {
          hi = mid;
          at_hi = at_mid;
        } else {
          lo = mid;
        }
      }
      sol = extract(ctx, L, at_hi.primal, hi, set);
      sol.status = SolveStatus::Optimal;
      sol.gap = hi - lo;
      std::vector<std::string> seed_active = sol.active_labels;
      const double probe_delta = hi * (1.0 + 1e-6);
      for (const auto& lab : seed_active) {
        Eigen::Index jj = -1;
        for (Eigen::Index j = 0; j < L.nJ; ++j)
          if (ctx.rows[static_cast<size_t>(j)]->label == lab) jj = j;
        MipSolve alt = probe(probe_delta, jj);
        if (alt.status == SolveStatus::Optimal)
          harvest_labels(ctx, L, alt.primal, &sol.active_labels, nullptr);
      }
    }

    // The slack deactivation bound must dominate the actual slacks.
    bool strained = false;
    for (Eigen::Index j = 0; j < sol.slacks.size(); ++j)
      if (sol.slacks(j) > 0.5 * ctx.big_m) strained = true;
    if (!strained || attempt >= 5) break;
    ctx.big_m *= 2.0;
  }

  // Deduplicate labels gathered across sweeps.
  auto dedup = [](std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  dedup(sol.active_labels);
  dedup(sol.weakly_active_labels);
  // A label cannot be both limiting and weakly active.
  sol.weakly_active_labels.erase(
      std::remove_if(sol.weakly_active_labels.begin(),
                     sol.weakly_active_labels.end(),
                     [&](const std::string& lab) {
                       return std::find(sol.active_labels.begin(),
                                        sol.active_labels.end(),
                                        lab) != sol.active_labels.end();
                     }),
      sol.weakly_active_labels.end());

  (void)feas_tol;
  sol.stats.nodes = ctx.nodes;
  sol.stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return sol;
}

VerificationReport verify_solution(const LinearSystem& system,
                                   const FlexSolution& sol, long samples,
                                   unsigned long long seed) {
  VerificationReport rep;
  rep.samples = samples;
  if (sol.F <= 0.0) {
    // Every sample degenerates to the nominal point, which is feasible.
    rep.worst_psi_at_F = psi(system, nominal_point(sol.set_used));
    rep.violations_at_F = rep.worst_psi_at_F > 1e-7 ? samples : 0;
    return rep;
  }
  auto pts = boundary_sample(sol.set_used, sol.F, static_cast<int>(samples),
                             seed);
  for (const auto& p : pts) {
    const double v = psi(system, p);
    rep.worst_psi_at_F = std::max(rep.worst_psi_at_F, v);
    if (v > 1e-7) ++rep.violations_at_F;
  }
  auto inflated = boundary_sample(sol.set_used, sol.F * (1.0 + 1e-3),
                                  static_cast<int>(samples), seed + 1);
  for (const auto& p : inflated)
    if (psi(system, p) > 1e-7) ++rep.infeasible_at_inflated;
  return rep;
}

RankResult rank_constraints(const LinearSystem& system,
                            const UncertaintySetSpec& set, int max_levels,
                            const BnBConfig& config) {
  RankResult res;
  res.termination = RankTermination::MaxLevels;
  ConstraintFilter filter;
  while (static_cast<int>(res.levels.size()) < max_levels) {
    LinearSystem current = apply_filter(system, filter);
    bool any_row = false;
    for (const auto& f : current.inequalities)
      if (!f.is_vacuous()) any_row = true;
    if (!any_row) {
      res.termination = RankTermination::Exhausted;
      break;
    }
    FlexSolution sol;
    try {
      sol = flexibility_index(current, set, config);
    } catch (const UnboundedModel&) {
      res.termination = RankTermination::Unbounded;
      break;
    }
    std::vector<std::string> labels = sol.active_labels;
    if (labels.empty()) labels = sol.weakly_active_labels;
    if (labels.empty())
      throw NumericalBreakdown("rank_constraints: no active constraint found");
    for (const auto& lab : labels) filter.excluded_labels.insert(lab);

    const bool merge =
        !res.levels.empty() &&
        std::abs(sol.F - res.levels.back().F_value) <=
            1e-6 * std::max(1.0, std::abs(res.levels.back().F_value));
    if (merge) {
      auto& lv = res.levels.back();
      lv.labels.insert(lv.labels.end(), labels.begin(), labels.end());
    } else {
      RankLevel lv;
      lv.level = static_cast<int>(res.levels.size()) + 1;
      lv.labels = labels;
      lv.F_value = sol.F;
      res.levels.push_back(std::move(lv));
    }
  }
  // increase over level 1 (undefined there, left 0)
  for (auto& lv : res.levels)
    if (lv.level > 1 && res.levels.front().F_value > 0.0)
      lv.increase_pct = 100.0 * (lv.F_value - res.levels.front().F_value) /
                        res.levels.front().F_value;
  return res;
}

std::vector<CompareRow> compare_designs(
    const std::vector<DesignEntry>& designs,
    const std::vector<UncertaintySetSpec>& sets, const GaussianSpec* mc,
    long mc_samples, unsigned long long seed, const BnBConfig& config) {
  std::vector<CompareRow> out;
  for (const auto& d : designs) {
    CompareRow row;
    row.name = d.name;
    for (const auto& s : sets) {
      CompareCell cell;
      try {
        FlexSolution sol = flexibility_index(d.system, s, config);
        cell.ok = true;
        cell.F = sol.F;
        if (!row.has_alpha && s.as<Ellipsoid>() != nullptr) {
          row.has_alpha = true;
          row.alpha_star =
              confidence_level(sol.F, static_cast<int>(d.system.n_theta()));
        }
      } catch (const FlexError& e) {
        cell.error = e.what();
      }
      row.F.push_back(std::move(cell));
    }
    if (mc != nullptr) {
      try {
        row.sf = stochastic_flexibility(d.system, *mc, mc_samples, seed);
        row.has_sf = true;
      } catch (const FlexError& e) {
        row.sf_error = e.what();
      }
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace flexkit
