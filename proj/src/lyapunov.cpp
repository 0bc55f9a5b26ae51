#include "ssde/lyapunov.hpp"

#include <cmath>
#include <vector>

namespace ssde {

double lyapunov_U(std::span<const double> lambda) {
  require_strictly_ascending(lambda, "lyapunov_U");
  double u = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i)
    for (std::size_t j = i + 1; j < lambda.size(); ++j) u -= std::log(lambda[j] - lambda[i]);
  return u;
}

namespace {

struct Squares {
  std::vector<double> g2, h2;
};

Squares squares(std::span<const double> lambda, const SpectralCoefficients& coeff) {
  Squares s{std::vector<double>(lambda.size()), std::vector<double>(lambda.size())};
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const double g = coeff.g(lambda[i]);
    const double h = coeff.h(lambda[i]);
    s.g2[i] = g * g;
    s.h2[i] = h * h;
  }
  return s;
}

}  // namespace

LyapunovRates lyapunov_drift_components(std::span<const double> lambda, const SpectralCoefficients& coeff) {
  require_strictly_ascending(lambda, "lyapunov_drift_components");
  const std::size_t p = lambda.size();
  const auto [beta, b_scale] = effective_beta(coeff);
  const Squares sq = squares(lambda, coeff);
  auto G = [&](std::size_t i, std::size_t j) { return sq.g2[i] * sq.h2[j] + sq.g2[j] * sq.h2[i]; };

  LyapunovRates r;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      const double gap = lambda[j] - lambda[i];
      r.a1 += beta * (coeff.b(lambda[i]) - coeff.b(lambda[j])) / b_scale / gap;
      r.a2 += 2.0 * (sq.g2[j] - sq.g2[i]) * (sq.h2[j] - sq.h2[i]) / (gap * gap);
      r.a2 += 2.0 * (1.0 - beta) * G(i, j) / (gap * gap);
      for (std::size_t k = j + 1; k < p; ++k) {
        const double ji = lambda[j] - lambda[i];
        const double ki = lambda[k] - lambda[i];
        const double kj = lambda[k] - lambda[j];
        r.a3 += beta * (G(j, k) * kj - G(i, k) * ki + G(i, j) * ji) / (ji * ki * kj);
      }
    }
  return r;
}

double lyapunov_a3_double_sum(std::span<const double> lambda, const SpectralCoefficients& coeff) {
  require_strictly_ascending(lambda, "lyapunov_a3_double_sum");
  const std::size_t p = lambda.size();
  const double beta = effective_beta(coeff).beta;
  const Squares sq = squares(lambda, coeff);
  auto G = [&](std::size_t i, std::size_t j) { return sq.g2[i] * sq.h2[j] + sq.g2[j] * sq.h2[i]; };
  double a3 = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      double inner = 0.0;
      for (std::size_t k = 0; k < p; ++k) {
        if (k == i || k == j) continue;
        inner += G(i, k) / (lambda[i] - lambda[k]) - G(j, k) / (lambda[j] - lambda[k]);
      }
      a3 += beta * inner / (lambda[j] - lambda[i]);
    }
  return a3;
}

double lyapunov_drift_direct(std::span<const double> lambda, const SpectralCoefficients& coeff) {
  const std::vector<double> mu = eigen_drift(coeff, lambda);
  const std::size_t p = lambda.size();
  std::vector<double> var(p);
  for (std::size_t i = 0; i < p; ++i) {
    const double s = 2.0 * coeff.g(lambda[i]) * coeff.h(lambda[i]);
    var[i] = s * s;
  }
  double rate = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      const double gap = lambda[j] - lambda[i];
      rate += (mu[i] - mu[j]) / gap + 0.5 * (var[i] + var[j]) / (gap * gap);
    }
  return rate;
}

}  // namespace ssde
