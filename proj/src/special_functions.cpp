#include "dcxlab/special_functions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dcxlab/error.hpp"

namespace dcx {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 100000;

// x^a e^-x / Gamma(a), in log space.
double prefactor(double a, double x) { return std::exp(a * std::log(x) - x - std::lgamma(a)); }

double series_p(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * prefactor(a, x);
}

double continued_fraction_q(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return prefactor(a, x) * h;
}

void check(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ParameterError("incomplete gamma: need a > 0, got " + std::to_string(a));
  if (!(x >= 0.0)) throw ParameterError("incomplete gamma: need x >= 0, got " + std::to_string(x));
}

}  // namespace

double gamma_p(double a, double x) {
  check(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return x < a + 1.0 ? series_p(a, x) : 1.0 - continued_fraction_q(a, x);
}

double gamma_q(double a, double x) {
  check(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return x < a + 1.0 ? 1.0 - series_p(a, x) : continued_fraction_q(a, x);
}

}  // namespace dcx
