#include "core/stats.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace kljn {

namespace {

// Continued fraction for the regularized incomplete beta (Lentz's
// method), valid for x < (a+1)/(a+b+2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int max_iter = 300;
  constexpr double eps = 1e-15;
  constexpr double tiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw NumericError("incomplete beta continued fraction did not converge");
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

} // namespace

SampleSummary summarize(std::span<const double> xs) {
  if (xs.empty()) throw ValidationError("cannot summarize an empty sample");
  SampleSummary s;
  s.count = xs.size();
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double x : xs) {
      const double d = x - s.mean;
      ss += d * d;
    }
    s.variance = ss / static_cast<double>(s.count - 1);
  }
  return s;
}

double student_t_two_sided_p(double t, double dof) {
  if (!(dof > 0.0)) throw ValidationError("degrees of freedom must be > 0");
  if (!std::isfinite(t)) return 0.0;
  const double x = dof / (dof + t * t);
  return regularized_incomplete_beta(0.5 * dof, 0.5, x);
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw ValidationError("Welch test needs at least 2 samples per group");
  const SampleSummary sa = summarize(a);
  const SampleSummary sb = summarize(b);
  const double va = sa.variance / static_cast<double>(sa.count);
  const double vb = sb.variance / static_cast<double>(sb.count);
  const double se2 = va + vb;

  WelchResult r;
  if (se2 == 0.0) { // degenerate: both groups constant
    r.t_statistic = sa.mean == sb.mean ? 0.0
                                       : std::numeric_limits<double>::infinity();
    r.degrees_of_freedom = static_cast<double>(sa.count + sb.count - 2);
    r.p_value = sa.mean == sb.mean ? 1.0 : 0.0;
    return r;
  }
  r.t_statistic = (sa.mean - sb.mean) / std::sqrt(se2);
  r.degrees_of_freedom =
      se2 * se2 /
      (va * va / static_cast<double>(sa.count - 1) + vb * vb / static_cast<double>(sb.count - 1));
  r.p_value = student_t_two_sided_p(r.t_statistic, r.degrees_of_freedom);
  return r;
}

double normalized_cross_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2)
    throw ValidationError("correlation needs two equal-length series (>= 2 samples)");
  const SampleSummary sa = summarize(a);
  const SampleSummary sb = summarize(b);
  double cov = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    cov += (a[i] - sa.mean) * (b[i] - sb.mean);
  const double denom = std::sqrt(sa.variance * sb.variance) * static_cast<double>(a.size() - 1);
  if (denom == 0.0) throw NumericError("correlation undefined for a constant series");
  return cov / denom;
}

} // namespace kljn
