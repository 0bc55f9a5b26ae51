#include "ssde/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ssde {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

SampleSummary summarize(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("summarize: need at least 2 samples");
  SampleSummary out;
  out.n = xs.size();
  const double n = static_cast<double>(xs.size());
  out.mean = compensated_sum(xs) / n;
  CompensatedSum s2, s4;
  for (double x : xs) {
    const double d = x - out.mean;
    s2.add(d * d);
    s4.add(d * d * d * d);
  }
  const double m2 = s2.value() / n;
  const double m4 = s4.value() / n;
  out.variance = s2.value() / (n - 1.0);
  out.se = std::sqrt(out.variance / n);
  out.variance_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  return out;
}

double quantile(std::span<const double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q must be in [0, 1]");
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return v[lo] + w * (v[hi] - v[lo]);
}

}  // namespace ssde
