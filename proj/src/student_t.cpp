#include "flvr/student_t.hpp"

#include <cmath>
#include <limits>

#include "flvr/errors.hpp"

namespace flvr {

namespace {

// Continued fraction for I_x(a, b); converges fast for x < (a + 1) / (a + b + 2).
double beta_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  constexpr int kMaxIter = 100000;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NumericalError("incomplete_beta: continued fraction did not converge");
}

double beta_prefactor(double a, double b, double x) {
  return std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                  b * std::log1p(-x));
}

// Upper tail P(T > x) for x >= 0.
double upper_tail(double x, double df) {
  const double t = x / std::sqrt(df);
  const double w = 1.0 / (1.0 + t * t);  // df / (df + x^2)
  if (t * t < 1.0) {
    // Small x: I over x^2/(df+x^2) avoids cancellation near the centre.
    return 0.5 - 0.5 * incomplete_beta(0.5, 0.5 * df, t * t * w);
  }
  return 0.5 * incomplete_beta(0.5 * df, 0.5, w);
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw NumericalError("incomplete_beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw NumericalError("incomplete_beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  if (x < (a + 1.0) / (a + b + 2.0)) return beta_prefactor(a, b, x) * beta_fraction(a, b, x) / a;
  return 1.0 - beta_prefactor(a, b, x) * beta_fraction(b, a, 1.0 - x) / b;
}

double student_t_pdf(double x, double df) {
  if (!(df > 0.0)) throw NumericalError("student_t: degrees of freedom must be positive");
  const double log_norm = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                          0.5 * std::log(df * std::acos(-1.0));
  return std::exp(log_norm - 0.5 * (df + 1.0) * std::log1p(x * x / df));
}

double student_t_cdf(double x, double df) {
  if (!(df > 0.0)) throw NumericalError("student_t: degrees of freedom must be positive");
  if (std::isnan(x)) return x;
  return x >= 0.0 ? 1.0 - upper_tail(x, df) : upper_tail(-x, df);
}

double student_t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw NumericalError("student_t_quantile: p must lie in (0, 1)");
  if (!(df > 0.0)) throw NumericalError("student_t: degrees of freedom must be positive");
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -student_t_quantile(1.0 - p, df);

  // Solve upper_tail(x) = q on x > 0, with the tail decreasing in x.
  const double q = 1.0 - p;
  double lo = 0.0;
  double hi = 1.0;
  while (upper_tail(hi, df) > q) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericalError("student_t_quantile: bracket overflow");
  }
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    const double f = upper_tail(x, df) - q;
    if (f == 0.0) return x;
    if (f > 0.0)
      lo = x;
    else
      hi = x;
    double next = x + f / student_t_pdf(x, df);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(next) ||
        hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
      return next;
    x = next;
  }
  return x;
}

}  // namespace flvr
