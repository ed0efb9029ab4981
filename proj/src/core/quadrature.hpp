#pragma once

#include <functional>

namespace kljn {

/// Adaptive Simpson integration of `f` over [a, b] to the given relative
/// tolerance.  Throws NumericError if the recursion depth is exhausted
/// before the tolerance is met -- the result is never silently truncated.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double relative_tolerance = 1e-12, int max_depth = 50);

} // namespace kljn
