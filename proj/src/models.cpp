#include "ssde/models.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ssde/expression.hpp"

namespace ssde {

namespace {

struct FamilyInfo {
  ModelFamily family;
  const char* name;
  std::set<std::string> required;
  std::set<std::string> optional;
};

const std::vector<FamilyInfo>& families() {
  static const std::vector<FamilyInfo> table = {
      {ModelFamily::dyson, "dyson", {}, {"beta", "complex"}},
      {ModelFamily::wishart, "wishart", {"alpha"}, {"complex"}},
      {ModelFamily::generalized_wishart, "generalized-wishart", {"alpha"}, {"complex"}},
      {ModelFamily::wishart_ou, "wishart-ou", {"alpha", "c"}, {"complex"}},
      {ModelFamily::besq_particles, "besq-particles", {"nu", "N"}, {}},
      {ModelFamily::jacobi, "jacobi", {"q", "r"}, {"complex"}},
      {ModelFamily::beta_wishart, "beta-wishart", {"alpha"}, {"beta"}},
      {ModelFamily::beta_jacobi, "beta-jacobi", {"q", "r"}, {"beta"}},
      {ModelFamily::laguerre_complex, "laguerre-complex", {"alpha"}, {}},
      {ModelFamily::custom, "custom", {}, {"beta", "complex"}},
  };
  return table;
}

const FamilyInfo& info(ModelFamily f) {
  for (const auto& fi : families())
    if (fi.family == f) return fi;
  throw ModelError("unknown model family");
}

double sqrt_abs(double x) { return std::sqrt(std::abs(x)); }

}  // namespace

std::string to_string(ModelFamily f) { return info(f).name; }

ModelFamily parse_family(const std::string& name) {
  for (const auto& fi : families())
    if (name == fi.name) return fi.family;
  throw ModelError("unknown model name '" + name + "'");
}

ParameterSpec model_parameters(ModelFamily f) {
  const FamilyInfo& fi = info(f);
  return {fi.required, fi.optional};
}

SpectralCoefficients catalog(const ModelId& id) {
  const FamilyInfo& fi = info(id.family);
  for (const auto& [key, value] : id.params) {
    if (!fi.required.contains(key) && !fi.optional.contains(key))
      throw ModelError("model " + std::string(fi.name) + ": unexpected parameter '" + key + "'");
    if (!std::isfinite(value))
      throw ModelError("model " + std::string(fi.name) + ": parameter '" + key + "' not finite");
  }
  for (const auto& key : fi.required)
    if (!id.params.contains(key))
      throw ModelError("model " + std::string(fi.name) + ": missing parameter '" + key + "'");
  if (id.family != ModelFamily::custom && !id.expressions.empty())
    throw ModelError("model " + std::string(fi.name) + ": coefficient expressions only allowed for custom");

  auto param = [&](const std::string& key, double fallback) {
    auto it = id.params.find(key);
    return it == id.params.end() ? fallback : it->second;
  };

  SpectralCoefficients c;
  c.id = id;
  c.beta = param("beta", 1.0);
  if (!(c.beta > 0.0)) throw ModelError("model " + std::string(fi.name) + ": beta must be > 0");
  c.complex_mode = param("complex", 0.0) != 0.0;

  const Domain half_line{0.0, std::numeric_limits<double>::infinity()};
  const RegularityFlags wishart_like{true, true, true, true, true};

  switch (id.family) {
    case ModelFamily::dyson:
      c.g = [](double) { return 0.5; };
      c.h = [](double) { return 1.0; };
      c.b = [](double) { return 0.0; };
      c.regularity = {true, true, true, true, true};
      break;
    case ModelFamily::wishart:
    case ModelFamily::generalized_wishart:
    case ModelFamily::beta_wishart: {
      const double alpha = param("alpha", 0.0);
      c.g = sqrt_abs;
      c.h = [](double) { return 1.0; };
      c.b = [alpha](double) { return alpha; };
      c.regularity = wishart_like;
      if (id.family != ModelFamily::generalized_wishart) c.domain = half_line;
      break;
    }
    case ModelFamily::wishart_ou: {
      const double alpha = param("alpha", 0.0);
      const double drift = param("c", 0.0);
      c.g = sqrt_abs;
      c.h = [](double) { return 1.0; };
      c.b = [alpha, drift](double x) { return alpha + drift * x; };
      c.regularity = wishart_like;
      c.domain = half_line;
      if (!(drift > 0.0)) c.flags.push_back("c <= 0: outside the c > 0 range");
      break;
    }
    case ModelFamily::besq_particles: {
      const double nu = param("nu", 0.0);
      const double n = param("N", 0.0);
      if (!(n >= 1.0) || n != std::floor(n))
        throw ModelError("model besq-particles: N must be a positive integer");
      const double drift = 2.0 * (nu + n);
      c.g = sqrt_abs;
      c.h = [](double) { return 1.0; };
      c.b = [drift](double) { return drift; };
      // Interaction 2 (x_i + x_j) / (x_i - x_j): the complex (doubled) system.
      c.complex_mode = true;
      c.regularity = wishart_like;
      c.domain = half_line;
      if (nu < -1.0) c.flags.push_back("nu < -1: outside the nu >= -1 range");
      break;
    }
    case ModelFamily::laguerre_complex: {
      const double delta = param("alpha", 0.0);
      c.g = sqrt_abs;
      c.h = [](double) { return 1.0; };
      c.b = [delta](double) { return 2.0 * delta; };
      c.complex_mode = true;
      c.regularity = wishart_like;
      c.domain = half_line;
      break;
    }
    case ModelFamily::jacobi:
    case ModelFamily::beta_jacobi: {
      const double q = param("q", 0.0);
      const double r = param("r", 0.0);
      c.g = sqrt_abs;
      c.h = [](double x) { return std::sqrt(std::abs(1.0 - x)); };
      c.b = [q, r](double x) { return q - (q + r) * x; };
      // g^2 h^2 = x - x^2 is C^{1,1} on [0, 1]; G(0, 1) = 0 off the diagonal.
      c.regularity = {true, true, true, true, false};
      c.domain = {0.0, 1.0};
      break;
    }
    case ModelFamily::custom: {
      for (const auto& [key, text] : id.expressions)
        if (key != "g" && key != "h" && key != "b")
          throw ModelError("model custom: unexpected coefficient '" + key + "'");
      auto expr = [&](const char* key, const char* fallback) {
        auto it = id.expressions.find(key);
        const Expression e = Expression::parse(it == id.expressions.end() ? fallback : it->second);
        return ScalarFunction([e](double x) { return e(x); });
      };
      c.g = expr("g", "0");
      c.h = expr("h", "0");
      c.b = expr("b", "0");
      break;
    }
  }

  if (id.family == ModelFamily::beta_wishart || id.family == ModelFamily::beta_jacobi ||
      id.family == ModelFamily::dyson) {
    if (c.beta < 1.0 && !c.complex_mode) c.flags.push_back("beta < 1: collisions are possible");
  }
  return c;
}

void check_dimension(const SpectralCoefficients& coeff, std::size_t p) {
  if (p == 0) throw ModelError("dimension must be >= 1");
  if (coeff.id.family == ModelFamily::besq_particles) {
    const double n = coeff.id.params.at("N");
    if (static_cast<double>(p) != n)
      throw ModelError("model besq-particles: dimension p must equal N");
  }
}

double kernel_G(const SpectralCoefficients& coeff, double x, double y) {
  const double gx = coeff.g(x), gy = coeff.g(y);
  const double hx = coeff.h(x), hy = coeff.h(y);
  return (gx * gx) * (hy * hy) + (gy * gy) * (hx * hx);
}

void require_strictly_ascending(std::span<const double> lambda, const char* who) {
  for (std::size_t i = 1; i < lambda.size(); ++i)
    if (!(lambda[i - 1] < lambda[i]))
      throw ModelError(std::string(who) + ": eigenvalues not strictly ascending");
}

std::vector<double> interaction_sum(const SpectralCoefficients& coeff, std::span<const double> lambda) {
  require_strictly_ascending(lambda, "interaction_sum");
  const std::size_t p = lambda.size();
  std::vector<double> g2(p), h2(p);
  for (std::size_t i = 0; i < p; ++i) {
    const double g = coeff.g(lambda[i]);
    const double h = coeff.h(lambda[i]);
    g2[i] = g * g;
    h2[i] = h * h;
  }
  std::vector<double> s(p, 0.0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t k = 0; k < p; ++k) {
      if (k == i) continue;
      const double G = g2[i] * h2[k] + g2[k] * h2[i];
      s[i] += G / (lambda[i] - lambda[k]);
    }
  return s;
}

std::vector<double> eigen_drift(const SpectralCoefficients& coeff, std::span<const double> lambda) {
  const std::vector<double> s = interaction_sum(coeff, lambda);
  std::vector<double> out(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const double interaction = coeff.complex_mode ? 2.0 * s[i] : s[i];
    out[i] = coeff.beta * (coeff.b(lambda[i]) + interaction);
  }
  return out;
}

bool boundary_protected(const SpectralCoefficients& coeff, std::size_t p) {
  const auto& params = coeff.id.params;
  const double floor_p = static_cast<double>(p) - 1.0;
  switch (coeff.id.family) {
    case ModelFamily::wishart:
    case ModelFamily::generalized_wishart:
    case ModelFamily::wishart_ou:
    case ModelFamily::laguerre_complex:
      return params.at("alpha") >= floor_p;
    case ModelFamily::beta_wishart:
      return params.at("alpha") >= floor_p && coeff.beta >= 1.0;
    case ModelFamily::besq_particles:
      return params.at("nu") >= -1.0;
    case ModelFamily::jacobi:
      return std::min(params.at("q"), params.at("r")) >= floor_p;
    case ModelFamily::beta_jacobi:
      return std::min(params.at("q"), params.at("r")) >= floor_p && coeff.beta >= 1.0;
    case ModelFamily::dyson:
    case ModelFamily::custom:
      return false;
  }
  return false;
}

Domain protected_domain(const SpectralCoefficients& coeff) {
  switch (coeff.id.family) {
    case ModelFamily::jacobi:
    case ModelFamily::beta_jacobi:
      return {0.0, 1.0};
    case ModelFamily::dyson:
    case ModelFamily::custom:
      return {};
    default:
      return {0.0, std::numeric_limits<double>::infinity()};
  }
}

EffectiveBeta effective_beta(const SpectralCoefficients& coeff) {
  if (coeff.complex_mode) return {2.0 * coeff.beta, 2.0};
  return {coeff.beta, 1.0};
}

bool noncollision_predicted(const SpectralCoefficients& coeff, std::size_t p) {
  const RegularityFlags& r = coeff.regularity;
  if (!(r.b_lipschitz && r.g2_lipschitz && r.h2_lipschitz)) return false;
  if (p > 2 && !r.g2h2_convex_or_c11) return false;
  return effective_beta(coeff).beta >= 1.0;
}

double lipschitz_estimate(const ScalarFunction& f, double lo, double hi, int points) {
  if (!(hi > lo) || points < 2) return 0.0;
  const double step = (hi - lo) / (points - 1);
  double best = 0.0;
  double prev = f(lo);
  for (int i = 1; i < points; ++i) {
    const double cur = f(lo + step * i);
    best = std::max(best, std::abs(cur - prev) / step);
    prev = cur;
  }
  return best;
}

}  // namespace ssde
