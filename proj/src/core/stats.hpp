#pragma once

#include <cstddef>
#include <span>

namespace kljn {

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0; // unbiased (n-1)
};

SampleSummary summarize(std::span<const double> xs);

/// Welch's unequal-variance two-sample t-test with two-sided p-value.
struct WelchResult {
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
};

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

/// Two-sided tail probability of Student's t with `dof` degrees of
/// freedom, via the regularized incomplete beta function.
double student_t_two_sided_p(double t, double dof);

/// Pearson correlation of two equal-length series (lag zero).
double normalized_cross_correlation(std::span<const double> a, std::span<const double> b);

} // namespace kljn
