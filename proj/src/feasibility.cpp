#include <cmath>
#include <random>
#include <sstream>

#include "flexkit/feasibility.hpp"
#include "flexkit/solver.hpp"

namespace flexkit {

namespace {

// With no recourse or state, psi degenerates to max_j f_j(theta), with the
// equalities acting as a pointwise consistency check.
double psi_direct(const LinearSystem& system, const Eigen::VectorXd& theta) {
  for (const auto& h : system.equalities)
    if (std::abs(h.theta.dot(theta) - h.rhs) > kPsiFeasTol) return kInf;
  double worst = -kInf;
  for (const auto& f : system.inequalities)
    worst = std::max(worst, f.theta.dot(theta) - f.rhs);
  return worst;
}

}  // namespace

double psi(const LinearSystem& system, const Eigen::VectorXd& theta,
           std::string* note) {
  if (theta.size() != system.n_theta())
    throw DimensionMismatch("psi: theta dimension");
  const Eigen::Index nz = system.n_recourse();
  const Eigen::Index nx = system.n_state();
  if (nz == 0 && nx == 0) return psi_direct(system, theta);

  // Variables (z, x, u); minimize u.
  LPProblem lp;
  lp.resize(nz + nx + 1);
  lp.c(nz + nx) = 1.0;
  for (const auto& f : system.inequalities) {
    LinearRow r;
    r.a = Eigen::VectorXd::Zero(nz + nx + 1);
    r.a.head(nz) = f.recourse;
    r.a.segment(nz, nx) = f.state;
    r.a(nz + nx) = -1.0;
    r.sense = RowSense::LE;
    r.b = f.rhs - f.theta.dot(theta);
    lp.rows.push_back(std::move(r));
  }
  for (const auto& h : system.equalities) {
    LinearRow r;
    r.a = Eigen::VectorXd::Zero(nz + nx + 1);
    r.a.head(nz) = h.recourse;
    r.a.segment(nz, nx) = h.state;
    r.sense = RowSense::EQ;
    r.b = h.rhs - h.theta.dot(theta);
    lp.rows.push_back(std::move(r));
  }

  SolveOutcome out = solve_lp(lp);
  if (out.status == SolveStatus::Infeasible) return kInf;
  if (out.status == SolveStatus::Unbounded) {
    if (note) {
      std::ostringstream os;
      os << "psi unbounded below: recourse ray (";
      for (Eigen::Index i = 0; i < nz + nx; ++i)
        os << (i ? ", " : "") << out.ray(i);
      os << ") improves every constraint; bound the recourse to avoid this";
      *note = os.str();
    }
    return -kInf;
  }
  if (out.status != SolveStatus::Optimal)
    throw NumericalBreakdown("psi: inner LP failed");
  return out.objective;
}

SFEstimate stochastic_flexibility(const LinearSystem& system,
                                  const GaussianSpec& dist, long samples,
                                  unsigned long long seed) {
  if (samples < 100)
    throw InputError("stochastic_flexibility: need at least 100 samples");
  const Eigen::Index n = system.n_theta();
  if (dist.mean.size() != n)
    throw DimensionMismatch("stochastic_flexibility: mean dimension");
  if (dist.covariance.rows() != n || dist.covariance.cols() != n)
    throw DimensionMismatch("stochastic_flexibility: covariance shape");
  Eigen::LLT<Eigen::MatrixXd> llt(dist.covariance);
  if (llt.info() != Eigen::Success)
    throw InputError(
        "stochastic_flexibility: covariance must be positive definite");
  const Eigen::MatrixXd L = llt.matrixL();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw_raw = [&]() {
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = gauss(rng);
    return (dist.mean + L * w).eval();
  };

  if (dist.truncated) {
    long accepted = 0;
    for (int i = 0; i < 10000; ++i)
      if (draw_raw().minCoeff() >= 0.0) ++accepted;
    if (accepted < 10) {  // acceptance below 1e-3
      std::ostringstream os;
      os << "truncated rejection sampling impractical: pilot acceptance "
         << accepted / 10000.0 << " below 1e-3";
      throw ImpracticalTruncation(os.str());
    }
  }

  auto draw = [&]() {
    if (!dist.truncated) return draw_raw();
    for (;;) {
      Eigen::VectorXd t = draw_raw();
      if (t.minCoeff() >= 0.0) return t;
    }
  };

  long feasible = 0;
  for (long i = 0; i < samples; ++i)
    if (psi(system, draw()) <= kPsiFeasTol) ++feasible;

  SFEstimate est;
  est.samples = samples;
  est.seed = seed;
  est.estimate = static_cast<double>(feasible) / static_cast<double>(samples);
  est.half_width = 1.96 * std::sqrt(est.estimate * (1.0 - est.estimate) /
                                    static_cast<double>(samples));
  return est;
}

}  // namespace flexkit
