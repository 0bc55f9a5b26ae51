#pragma once

#include <span>

#include "ssde/models.hpp"

namespace ssde {

/// U = -sum_{i<j} log(l_j - l_i). Requires strictly ascending input.
double lyapunov_U(std::span<const double> lambda);

/// Finite-variation rates of dU split as in the non-collision argument:
///   a1 = beta' sum_{i<j} (b'(l_i) - b'(l_j)) / (l_j - l_i)
///   a2 = 2 sum_{i<j} (g2_j - g2_i)(h2_j - h2_i) / (l_j - l_i)^2
///        + 2 (1 - beta') sum_{i<j} G_ij / (l_j - l_i)^2
///   a3 = beta' sum_{i<j<k} [G_jk (l_k - l_j) - G_ik (l_k - l_i) + G_ij (l_j - l_i)]
///        / ((l_j - l_i)(l_k - l_i)(l_k - l_j))
/// with (beta', b') = (beta, b) in real mode and (2 beta, b / 2) in complex mode.
struct LyapunovRates {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double total() const { return a1 + a2 + a3; }
};

LyapunovRates lyapunov_drift_components(std::span<const double> lambda, const SpectralCoefficients& coeff);

/// a3 evaluated through the double-sum form
///   beta' sum_{i<j} 1/(l_j - l_i) sum_{k != i,j} (G_ik/(l_i - l_k) - G_jk/(l_j - l_k)).
double lyapunov_a3_double_sum(std::span<const double> lambda, const SpectralCoefficients& coeff);

/// Finite-variation rate of U computed directly from the eigenvalue drift and
/// quadratic variation: sum_{i<j} (mu_i - mu_j)/(l_j - l_i) + (s_i^2 + s_j^2) / (2 (l_j - l_i)^2)
/// with s_i = 2 g(l_i) h(l_i).
double lyapunov_drift_direct(std::span<const double> lambda, const SpectralCoefficients& coeff);

}  // namespace ssde
