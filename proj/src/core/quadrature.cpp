#include "core/quadrature.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace kljn {

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double recurse(const std::function<double(double)>& f, double a, double b,
               double fa, double fm, double fb, double whole, double eps,
               int depth) {
  if (depth <= 0)
    throw NumericError("adaptive quadrature failed to converge (depth exhausted)");
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  // Richardson: Simpson halving gains a factor 15 in the error estimate.
  if (std::abs(delta) <= 15.0 * eps)
    return left + right + delta / 15.0;
  return recurse(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         recurse(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

} // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double relative_tolerance, int max_depth) {
  if (!(b > a)) throw ValidationError("integration interval must have b > a");
  if (!(relative_tolerance > 0.0))
    throw ValidationError("integration tolerance must be > 0");

  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = simpson(fa, fm, fb, b - a);
  // Scale the absolute tolerance off a crude magnitude estimate; fall back
  // to the interval itself for integrals that start out near zero.
  const double scale = std::max(std::abs(whole), 1e-300);
  return recurse(f, a, b, fa, fm, fb, whole, relative_tolerance * scale, max_depth);
}

} // namespace kljn
