#pragma once

#include <limits>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssde/linalg.hpp"

namespace ssde {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelFamily {
  dyson,
  wishart,
  generalized_wishart,
  wishart_ou,
  besq_particles,
  jacobi,
  beta_wishart,
  beta_jacobi,
  laguerre_complex,
  custom,
};

std::string to_string(ModelFamily f);
ModelFamily parse_family(const std::string& name);

/// Parameter names a family requires and accepts.
struct ParameterSpec {
  std::set<std::string> required;
  std::set<std::string> optional;
};
ParameterSpec model_parameters(ModelFamily f);

/// Named model family plus its parameters. For `custom`, the coefficient
/// expressions live in `expressions` under the keys "g", "h", "b".
struct ModelId {
  ModelFamily family = ModelFamily::dyson;
  std::map<std::string, double> params;
  std::map<std::string, std::string> expressions;
};

struct Domain {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x >= lower && x <= upper; }
  bool bounded_below() const { return lower > -std::numeric_limits<double>::infinity(); }
  bool bounded_above() const { return upper < std::numeric_limits<double>::infinity(); }
};

/// Declared hypotheses of the non-collision and uniqueness results. These are
/// declarations; see lipschitz_estimate() for a numerical spot check.
struct RegularityFlags {
  bool b_lipschitz = false;
  bool g2_lipschitz = false;
  bool h2_lipschitz = false;
  bool g2h2_convex_or_c11 = false;
  bool G_positive_off_diagonal = false;
};

struct SpectralCoefficients {
  ModelId id;
  ScalarFunction g;
  ScalarFunction h;
  ScalarFunction b;
  double beta = 1.0;
  bool complex_mode = false;
  Domain domain;
  RegularityFlags regularity;
  /// Parameters outside the ranges covered by the theory (allowed, reported).
  std::vector<std::string> flags;
};

SpectralCoefficients catalog(const ModelId& id);

/// Checks that the dimension is compatible with the model (besq-particles
/// requires p == N). Throws ModelError.
void check_dimension(const SpectralCoefficients& coeff, std::size_t p);

/// G(x, y) = g^2(x) h^2(y) + g^2(y) h^2(x).
double kernel_G(const SpectralCoefficients& coeff, double x, double y);

/// S_i = sum_{k != i} G(l_i, l_k) / (l_i - l_k). Requires strictly ascending input.
std::vector<double> interaction_sum(const SpectralCoefficients& coeff, std::span<const double> lambda);

/// beta * (b(l_i) + m * S_i) with m = 2 in complex mode, 1 otherwise.
std::vector<double> eigen_drift(const SpectralCoefficients& coeff, std::span<const double> lambda);

/// Throws ModelError unless lambda is strictly ascending.
void require_strictly_ascending(std::span<const double> lambda, const char* who);

/// Whether the model's boundary-preservation result covers dimension p
/// (alpha >= p-1, nu >= -1, q ^ r >= p-1, with beta >= 1 for beta-versions).
bool boundary_protected(const SpectralCoefficients& coeff, std::size_t p);

/// Region that eigenvalues are kept in when boundary_protected() holds.
Domain protected_domain(const SpectralCoefficients& coeff);

/// Whether the declared hypotheses imply that eigenvalues never collide.
bool noncollision_predicted(const SpectralCoefficients& coeff, std::size_t p);

/// Effective (beta, b-scale) such that the drift is beta_eff * (b / scale + S).
/// Real mode: (beta, 1). Complex mode: (2 beta, 2).
struct EffectiveBeta {
  double beta;
  double b_scale;
};
EffectiveBeta effective_beta(const SpectralCoefficients& coeff);

/// Largest finite-difference slope of f over a uniform grid on [lo, hi].
double lipschitz_estimate(const ScalarFunction& f, double lo, double hi, int points = 1000);

}  // namespace ssde
