#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ssde/linalg.hpp"

namespace testing {

inline ssde::SymmetricMatrix random_symmetric(std::size_t p, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  ssde::SymmetricMatrix x(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) x.set(i, j, n(rng));
  return x;
}

inline std::vector<double> random_ascending(std::size_t p, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v;
  while (v.size() < p) {
    const double x = u(rng);
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
  }
  std::sort(v.begin(), v.end());
  return v;
}

inline double max_abs_diff(const ssde::Matrix& a, const ssde::Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

// Standard normal CDF from erfc; independent of the library's inverse.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Two-sided Kolmogorov-Smirnov statistic against the standard normal.
inline double ks_normal(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf(xs[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

}  // namespace testing
