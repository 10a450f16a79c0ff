#include <cmath>
#include <limits>

#include "flexkit/sets.hpp"

namespace flexkit {

namespace {

// Regularized lower incomplete gamma P(a, x): series for x < a + 1,
// continued fraction for the complement otherwise.
double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  const double gln = std::lgamma(a);
  const double eps = std::numeric_limits<double>::epsilon();

  if (x < a + 1.0) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * eps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }

  // Lentz continued fraction for Q(a, x)
  const double fpmin = std::numeric_limits<double>::min() / eps;
  double b = x + 1.0 - a;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  const double q = std::exp(-x + a * std::log(x) - gln) * h;
  return 1.0 - q;
}

}  // namespace

double confidence_level(double flex_index, int n_theta) {
  if (!(flex_index >= 0.0) || !std::isfinite(flex_index))
    throw InputError("confidence_level: F must be finite and nonnegative");
  if (n_theta < 1) throw InputError("confidence_level: n_theta must be >= 1");
  return gamma_p(0.5 * static_cast<double>(n_theta), 0.5 * flex_index);
}

}  // namespace flexkit
