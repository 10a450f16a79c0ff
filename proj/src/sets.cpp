#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "flexkit/sets.hpp"
#include "flexkit/solver.hpp"

namespace flexkit {

namespace {

constexpr double kMemberTol = 1e-12;

bool is_norm_type(const UncertaintySetSpec& spec) {
  return std::visit(
      [](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Halfspaces>) {
          return false;
        } else if constexpr (std::is_same_v<T, Intersection>) {
          for (const auto& m : v.members)
            if (is_norm_type(m)) return true;
          return false;
        } else {
          return true;
        }
      },
      spec.value);
}

void collect_means(const UncertaintySetSpec& spec,
                   std::vector<const Eigen::VectorXd*>& out) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Intersection>) {
          for (const auto& m : v.members) collect_means(m, out);
        } else if constexpr (!std::is_same_v<T, Halfspaces>) {
          out.push_back(&v.mean);
        }
      },
      spec.value);
}

}  // namespace

double cvar_norm(const Eigen::VectorXd& x, double alpha) {
  const Eigen::Index n = x.size();
  const Eigen::VectorXd a = x.cwiseAbs();
  const double scale = (1.0 - alpha) * static_cast<double>(n);
  // piecewise linear in t; the minimum sits at a breakpoint
  double best = a.sum();  // t = 0
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = a(i);
    double v = t * scale;
    for (Eigen::Index j = 0; j < n; ++j) v += std::max(a(j) - t, 0.0);
    best = std::min(best, v);
  }
  return best;
}

int dimension(const UncertaintySetSpec& spec) {
  return std::visit(
      [](const auto& v) -> int {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Halfspaces>) {
          return static_cast<int>(v.A.cols());
        } else if constexpr (std::is_same_v<T, Intersection>) {
          if (v.members.empty())
            throw InputError("intersection with no members");
          return dimension(v.members.front());
        } else {
          return static_cast<int>(v.mean.size());
        }
      },
      spec.value);
}

Eigen::VectorXd nominal_point(const UncertaintySetSpec& spec) {
  std::vector<const Eigen::VectorXd*> means;
  collect_means(spec, means);
  if (means.empty())
    throw InputError("set has no nominal point (halfspaces only)");
  return *means.front();
}

namespace {

// Shape/value checks; member compactness is judged at the top level only.
void validate_members(const UncertaintySetSpec& spec) {
  const int n = dimension(spec);
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Ellipsoid>) {
          if (v.covariance.rows() != n || v.covariance.cols() != n)
            throw DimensionMismatch("covariance shape");
          if (!v.covariance.isApprox(v.covariance.transpose(), 1e-10))
            throw InputError("covariance must be symmetric");
          Eigen::LLT<Eigen::MatrixXd> llt(v.covariance);
          if (llt.info() != Eigen::Success)
            throw InputError("covariance must be positive definite");
        } else if constexpr (std::is_same_v<T, Hyperbox>) {
          if (v.dev_minus.size() != n || v.dev_plus.size() != n)
            throw DimensionMismatch("deviation vector shape");
          for (int i = 0; i < n; ++i) {
            if (v.dev_minus(i) < 0.0 || v.dev_plus(i) < 0.0)
              throw InputError("hyperbox deviations must be nonnegative");
            if (v.dev_minus(i) == 0.0 && v.dev_plus(i) == 0.0)
              throw InputError(
                  "hyperbox deviations must not both vanish in a coordinate");
          }
        } else if constexpr (std::is_same_v<T, PNorm>) {
          if (!(v.p == 1.0 || v.p == 2.0 || std::isinf(v.p)))
            throw InputError("p must be 1, 2 or inf");
        } else if constexpr (std::is_same_v<T, CVaRNorm>) {
          if (!(v.alpha >= 0.0 && v.alpha < 1.0))
            throw InputError("cvar alpha must lie in [0, 1)");
        } else if constexpr (std::is_same_v<T, Halfspaces>) {
          if (v.A.rows() != v.b.size())
            throw DimensionMismatch("halfspace A/b shape");
        } else if constexpr (std::is_same_v<T, Intersection>) {
          if (v.members.empty())
            throw InputError("intersection with no members");
          for (const auto& m : v.members) {
            if (dimension(m) != n)
              throw DimensionMismatch("intersection member dimensions differ");
            validate_members(m);
          }
          std::vector<const Eigen::VectorXd*> means;
          collect_means(spec, means);
          for (const auto* mv : means)
            if (!mv->isApprox(*means.front(), 1e-12))
              throw InputError(
                  "intersection members must share one nominal point");
        }
      },
      spec.value);
}

}  // namespace

void validate_spec(const UncertaintySetSpec& spec) {
  validate_members(spec);
  if (!is_norm_type(spec))
    throw NonCompactComposite(
        "set must contain at least one norm-type member");
}

double set_value(const UncertaintySetSpec& spec,
                 const Eigen::VectorXd& theta) {
  const int n = dimension(spec);
  if (theta.size() != n)
    throw DimensionMismatch("set_value: theta dimension");
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Ellipsoid>) {
          const Eigen::VectorXd w = theta - v.mean;
          return w.dot(v.covariance.llt().solve(w));
        } else if constexpr (std::is_same_v<T, Hyperbox>) {
          double worst = 0.0;
          for (int i = 0; i < n; ++i) {
            const double w = theta(i) - v.mean(i);
            if (w > 0.0) {
              if (v.dev_plus(i) == 0.0) return kInf;
              worst = std::max(worst, w / v.dev_plus(i));
            } else if (w < 0.0) {
              if (v.dev_minus(i) == 0.0) return kInf;
              worst = std::max(worst, -w / v.dev_minus(i));
            }
          }
          return worst;
        } else if constexpr (std::is_same_v<T, PNorm>) {
          const Eigen::VectorXd w = theta - v.mean;
          if (v.p == 1.0) return w.lpNorm<1>();
          if (v.p == 2.0) return w.norm();
          return w.lpNorm<Eigen::Infinity>();
        } else if constexpr (std::is_same_v<T, CVaRNorm>) {
          return cvar_norm(theta - v.mean, v.alpha);
        } else if constexpr (std::is_same_v<T, Halfspaces>) {
          if (v.A.rows() == 0) return 0.0;
          return ((v.A * theta - v.b).maxCoeff() <= 1e-12) ? 0.0 : kInf;
        } else {
          double worst = 0.0;
          for (const auto& m : v.members)
            worst = std::max(worst, set_value(m, theta));
          return worst;
        }
      },
      spec.value);
}

bool membership(const UncertaintySetSpec& spec, const Eigen::VectorXd& theta,
                double delta) {
  const double val = set_value(spec, theta);
  return val <= delta + kMemberTol * (1.0 + std::abs(delta));
}

namespace {

void compile_into(const UncertaintySetSpec& spec, CompiledSetConstraints& out);

void add_abs_rows(CompiledSetConstraints& out, const Eigen::VectorXd& mean,
                  int e_base) {
  // e_i >= theta_i - mean_i and e_i >= mean_i - theta_i
  const int n = out.n_theta;
  for (int i = 0; i < n; ++i) {
    CompiledRow r1;
    r1.a_theta = Eigen::VectorXd::Zero(n);
    r1.a_theta(i) = 1.0;
    r1.a_aux = Eigen::VectorXd::Zero(out.n_aux);
    r1.a_aux(e_base + i) = -1.0;
    r1.rhs = mean(i);
    out.rows.push_back(std::move(r1));
    CompiledRow r2;
    r2.a_theta = Eigen::VectorXd::Zero(n);
    r2.a_theta(i) = -1.0;
    r2.a_aux = Eigen::VectorXd::Zero(out.n_aux);
    r2.a_aux(e_base + i) = -1.0;
    r2.rhs = -mean(i);
    out.rows.push_back(std::move(r2));
  }
}

void compile_into(const UncertaintySetSpec& spec, CompiledSetConstraints& out) {
  const int n = out.n_theta;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Ellipsoid>) {
          out.quads.push_back(
              {QuadKind::MahalanobisLevel, v.covariance.inverse(), v.mean});
        } else if constexpr (std::is_same_v<T, Hyperbox>) {
          for (int i = 0; i < n; ++i) {
            CompiledRow up;
            up.a_theta = Eigen::VectorXd::Zero(n);
            up.a_theta(i) = 1.0;
            up.c_delta = -v.dev_plus(i);
            up.rhs = v.mean(i);
            out.rows.push_back(std::move(up));
            CompiledRow lo;
            lo.a_theta = Eigen::VectorXd::Zero(n);
            lo.a_theta(i) = -1.0;
            lo.c_delta = -v.dev_minus(i);
            lo.rhs = -v.mean(i);
            out.rows.push_back(std::move(lo));
          }
        } else if constexpr (std::is_same_v<T, PNorm>) {
          if (v.p == 2.0) {
            out.quads.push_back(
                {QuadKind::RadiusSq, Eigen::MatrixXd::Identity(n, n), v.mean});
          } else if (std::isinf(v.p)) {
            Hyperbox box{v.mean, Eigen::VectorXd::Ones(n),
                         Eigen::VectorXd::Ones(n)};
            compile_into(UncertaintySetSpec{box}, out);
          } else {  // l1: e_i >= |w_i|, sum e <= delta
            const int e_base = out.n_aux;
            out.n_aux += n;
            out.aux_lower.conservativeResize(out.n_aux);
            out.aux_lower.tail(n).setConstant(-kInf);
            for (auto& r : out.rows) {
              r.a_aux.conservativeResize(out.n_aux);
              r.a_aux.tail(n).setZero();
            }
            add_abs_rows(out, v.mean, e_base);
            CompiledRow sum;
            sum.a_theta = Eigen::VectorXd::Zero(n);
            sum.c_delta = -1.0;
            sum.a_aux = Eigen::VectorXd::Zero(out.n_aux);
            sum.a_aux.segment(e_base, n).setOnes();
            sum.rhs = 0.0;
            out.rows.push_back(std::move(sum));
          }
        } else if constexpr (std::is_same_v<T, CVaRNorm>) {
          // aux block: e_i (n), m_i (n), t (1)
          const int e_base = out.n_aux;
          const int m_base = e_base + n;
          const int t_idx = m_base + n;
          out.n_aux += 2 * n + 1;
          out.aux_lower.conservativeResize(out.n_aux);
          out.aux_lower.segment(e_base, n).setConstant(-kInf);
          out.aux_lower.segment(m_base, n).setZero();
          out.aux_lower(t_idx) = 0.0;
          for (auto& r : out.rows) {
            r.a_aux.conservativeResize(out.n_aux);
            r.a_aux.tail(2 * n + 1).setZero();
          }
          add_abs_rows(out, v.mean, e_base);
          for (int i = 0; i < n; ++i) {
            // m_i >= e_i - t
            CompiledRow r;
            r.a_theta = Eigen::VectorXd::Zero(n);
            r.a_aux = Eigen::VectorXd::Zero(out.n_aux);
            r.a_aux(e_base + i) = 1.0;
            r.a_aux(m_base + i) = -1.0;
            r.a_aux(t_idx) = -1.0;
            r.rhs = 0.0;
            out.rows.push_back(std::move(r));
          }
          CompiledRow budget;
          budget.a_theta = Eigen::VectorXd::Zero(n);
          budget.c_delta = -1.0;
          budget.a_aux = Eigen::VectorXd::Zero(out.n_aux);
          budget.a_aux.segment(m_base, n).setOnes();
          budget.a_aux(t_idx) = (1.0 - v.alpha) * static_cast<double>(n);
          budget.rhs = 0.0;
          out.rows.push_back(std::move(budget));
        } else if constexpr (std::is_same_v<T, Halfspaces>) {
          for (Eigen::Index i = 0; i < v.A.rows(); ++i) {
            CompiledRow r;
            r.a_theta = v.A.row(i).transpose();
            r.rhs = v.b(i);
            out.rows.push_back(std::move(r));
          }
        } else {
          for (const auto& m : v.members) compile_into(m, out);
        }
      },
      spec.value);
}

}  // namespace

CompiledSetConstraints compile(const UncertaintySetSpec& spec) {
  validate_spec(spec);
  CompiledSetConstraints out;
  out.n_theta = dimension(spec);
  compile_into(spec, out);
  for (auto& r : out.rows)
    if (r.a_aux.size() < out.n_aux) {
      const Eigen::Index old = r.a_aux.size();
      r.a_aux.conservativeResize(out.n_aux);
      r.a_aux.tail(out.n_aux - old).setZero();
    }
  return out;
}

std::vector<Eigen::VectorXd> boundary_sample(const UncertaintySetSpec& spec,
                                             double delta, int count,
                                             unsigned long long seed) {
  validate_spec(spec);
  if (!(delta > 0.0)) throw InputError("boundary_sample: delta must be > 0");
  const int n = dimension(spec);
  const Eigen::VectorXd center = nominal_point(spec);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Exact ray scale c with value(center + c u) == delta for norm members;
  // +inf marks directions a member never bounds (cannot happen for valid
  // specs), 0 marks directions blocked immediately.
  std::function<double(const UncertaintySetSpec&, const Eigen::VectorXd&)>
      ray_scale = [&](const UncertaintySetSpec& s,
                      const Eigen::VectorXd& u) -> double {
    return std::visit(
        [&](const auto& v) -> double {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Ellipsoid>) {
            const double q = u.dot(v.covariance.llt().solve(u));
            return q > 0.0 ? std::sqrt(delta / q) : kInf;
          } else if constexpr (std::is_same_v<T, Hyperbox>) {
            double worst = 0.0;
            for (int i = 0; i < n; ++i) {
              if (u(i) > 0.0)
                worst = std::max(worst, v.dev_plus(i) > 0.0
                                            ? u(i) / v.dev_plus(i)
                                            : kInf);
              else if (u(i) < 0.0)
                worst = std::max(worst, v.dev_minus(i) > 0.0
                                            ? -u(i) / v.dev_minus(i)
                                            : kInf);
            }
            return worst > 0.0 ? delta / worst : kInf;
          } else if constexpr (std::is_same_v<T, PNorm>) {
            const double nv = v.p == 1.0
                                  ? u.lpNorm<1>()
                                  : (v.p == 2.0 ? u.norm()
                                                : u.lpNorm<Eigen::Infinity>());
            return nv > 0.0 ? delta / nv : kInf;
          } else if constexpr (std::is_same_v<T, CVaRNorm>) {
            const double nv = cvar_norm(u, v.alpha);
            return nv > 0.0 ? delta / nv : kInf;
          } else if constexpr (std::is_same_v<T, Halfspaces>) {
            double c = kInf;
            const Eigen::VectorXd slack = v.b - v.A * center;
            const Eigen::VectorXd au = v.A * u;
            for (Eigen::Index i = 0; i < au.size(); ++i)
              if (au(i) > 0.0) c = std::min(c, slack(i) / au(i));
            return std::max(c, 0.0);
          } else {
            double c = kInf;
            for (const auto& m : v.members) c = std::min(c, ray_scale(m, u));
            return c;
          }
        },
        s.value);
  };

  // For composites with truncations, a ray may exit through a facet before
  // reaching any norm boundary; those directions are rejected.
  auto halfspace_scale = [&](const UncertaintySetSpec& s,
                             const Eigen::VectorXd& u) -> double {
    std::function<double(const UncertaintySetSpec&)> walk =
        [&](const UncertaintySetSpec& t) -> double {
      return std::visit(
          [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Halfspaces>) {
              double c = kInf;
              const Eigen::VectorXd slack = v.b - v.A * center;
              const Eigen::VectorXd au = v.A * u;
              for (Eigen::Index i = 0; i < au.size(); ++i)
                if (au(i) > 0.0) c = std::min(c, slack(i) / au(i));
              return std::max(c, 0.0);
            } else if constexpr (std::is_same_v<T, Intersection>) {
              double c = kInf;
              for (const auto& m : v.members) c = std::min(c, walk(m));
              return c;
            } else {
              return kInf;
            }
          },
          t.value);
    };
    return walk(s);
  };
  auto norm_scale = [&](const UncertaintySetSpec& s,
                        const Eigen::VectorXd& u) -> double {
    std::function<double(const UncertaintySetSpec&)> walk =
        [&](const UncertaintySetSpec& t) -> double {
      return std::visit(
          [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Halfspaces>) {
              return kInf;
            } else if constexpr (std::is_same_v<T, Intersection>) {
              double c = kInf;
              for (const auto& m : v.members) c = std::min(c, walk(m));
              return c;
            } else {
              return ray_scale(t, u);
            }
          },
          t.value);
    };
    return walk(s);
  };

  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<size_t>(count));
  long attempts = 0;
  const long max_attempts = 10000L * std::max(count, 1) + 1000;
  while (static_cast<int>(out.size()) < count) {
    if (++attempts > max_attempts)
      throw FlexError(
          "boundary_sample: rejection sampling failed (set may be "
          "degenerate along most directions)");
    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i) u(i) = gauss(rng);
    if (u.norm() < 1e-12) continue;
    const double cn = norm_scale(spec, u);
    const double ch = halfspace_scale(spec, u);
    if (!std::isfinite(cn) || cn <= 0.0) continue;
    if (ch < cn) continue;  // exits through a facet first
    out.push_back(center + cn * u);
  }
  return out;
}

}  // namespace flexkit
