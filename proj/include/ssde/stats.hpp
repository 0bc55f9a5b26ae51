#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ssde {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs);

struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  /// Unbiased sample variance.
  double variance = 0.0;
  /// Standard error of the mean, sqrt(variance / n).
  double se = 0.0;
  /// Standard error of the sample variance, sqrt((m4 - m2^2) / n) with
  /// central moments m2, m4.
  double variance_se = 0.0;
};

/// Requires n >= 2.
SampleSummary summarize(std::span<const double> xs);

/// Linear-interpolation quantile (type 7) of an unsorted sample; q in [0, 1].
double quantile(std::span<const double> xs, double q);

}  // namespace ssde
