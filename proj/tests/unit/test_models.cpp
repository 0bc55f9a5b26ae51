#include <doctest.h>

#include <cmath>
#include <random>

#include "ssde/expression.hpp"
#include "ssde/models.hpp"
#include "support.hpp"

using namespace ssde;

namespace {

SpectralCoefficients model(ModelFamily f, std::map<std::string, double> params) {
  return catalog(ModelId{f, std::move(params), {}});
}

}  // namespace

TEST_CASE("family names round trip") {
  for (auto f : {ModelFamily::dyson, ModelFamily::wishart, ModelFamily::generalized_wishart, ModelFamily::wishart_ou,
                 ModelFamily::besq_particles, ModelFamily::jacobi, ModelFamily::beta_wishart,
                 ModelFamily::beta_jacobi, ModelFamily::laguerre_complex, ModelFamily::custom})
    CHECK(parse_family(to_string(f)) == f);
  CHECK_THROWS_AS(parse_family("gue"), ModelError);
}

TEST_CASE("catalog parameter validation") {
  CHECK_THROWS_AS(model(ModelFamily::wishart, {}), ModelError);
  CHECK_THROWS_AS(model(ModelFamily::wishart, {{"alpha", 3}, {"beta", 2}}), ModelError);
  CHECK_THROWS_AS(model(ModelFamily::dyson, {{"beta", -1}}), ModelError);
  CHECK_THROWS_AS(model(ModelFamily::dyson, {{"beta", 0}}), ModelError);
  CHECK_THROWS_AS(model(ModelFamily::besq_particles, {{"nu", 0}, {"N", 2.5}}), ModelError);
  CHECK_THROWS_AS(catalog(ModelId{ModelFamily::dyson, {}, {{"g", "x"}}}), ModelError);
  CHECK_NOTHROW(model(ModelFamily::jacobi, {{"q", 3}, {"r", 3}}));
}

TEST_CASE("kernel G by hand") {
  const auto w = model(ModelFamily::wishart, {{"alpha", 3}});
  CHECK(kernel_G(w, 2.0, 5.0) == doctest::Approx(7.0));
  const auto d = model(ModelFamily::dyson, {{"beta", 1}});
  CHECK(kernel_G(d, -4.0, 9.0) == 0.5);
  const auto j = model(ModelFamily::jacobi, {{"q", 2}, {"r", 3}});
  // x(1-y) + y(1-x) at (0.2, 0.5)
  CHECK(kernel_G(j, 0.2, 0.5) == doctest::Approx(0.2 * 0.5 + 0.5 * 0.8));
}

TEST_CASE("dyson drift by hand") {
  const auto d = model(ModelFamily::dyson, {{"beta", 1}});
  const std::vector<double> l = {0.0, 1.0};
  const auto mu = eigen_drift(d, l);
  CHECK(mu[0] == doctest::Approx(-0.5));
  CHECK(mu[1] == doctest::Approx(0.5));
  const auto d2 = model(ModelFamily::dyson, {{"beta", 2}});
  CHECK(eigen_drift(d2, l)[1] == doctest::Approx(1.0));
}

TEST_CASE("besq particles: interaction 2(x_i + x_j)/(x_i - x_j) and drift 2(nu + N)") {
  const double nu = -0.5;
  const auto c = model(ModelFamily::besq_particles, {{"nu", nu}, {"N", 3}});
  const std::vector<double> x = {0.5, 1.5, 4.0};
  const auto mu = eigen_drift(c, x);
  for (std::size_t i = 0; i < 3; ++i) {
    double expect = 2.0 * (nu + 3.0);
    for (std::size_t j = 0; j < 3; ++j)
      if (j != i) expect += 2.0 * (x[i] + x[j]) / (x[i] - x[j]);
    CHECK(mu[i] == doctest::Approx(expect).epsilon(1e-14));
  }
  CHECK_THROWS_AS(check_dimension(c, 2), ModelError);
  CHECK_NOTHROW(check_dimension(c, 3));
}

TEST_CASE("interaction sum cancels for every catalog model") {
  std::mt19937_64 rng(99);
  const std::vector<SpectralCoefficients> models = {
      model(ModelFamily::dyson, {{"beta", 0.7}}),
      model(ModelFamily::wishart, {{"alpha", 3}}),
      model(ModelFamily::generalized_wishart, {{"alpha", -1}}),
      model(ModelFamily::wishart_ou, {{"alpha", 3}, {"c", 0.5}}),
      model(ModelFamily::besq_particles, {{"nu", 0.5}, {"N", 4}}),
      model(ModelFamily::jacobi, {{"q", 3}, {"r", 2}}),
      model(ModelFamily::beta_wishart, {{"alpha", 3}, {"beta", 0.5}}),
      model(ModelFamily::beta_jacobi, {{"q", 3}, {"r", 2}, {"beta", 2}}),
      model(ModelFamily::laguerre_complex, {{"alpha", 2}}),
      catalog(ModelId{ModelFamily::custom, {}, {{"g", "sqrt(abs(x)) + 1"}, {"h", "x * x"}, {"b", "-x"}}}),
  };
  for (const auto& c : models)
    for (int rep = 0; rep < 500; ++rep) {
      const std::size_t p = 2 + rep % 5;
      const bool unit = c.domain.bounded_above();
      const auto l = testing::random_ascending(p, rng, unit ? 0.0 : -3.0, unit ? 1.0 : 8.0);
      if (!std::all_of(l.begin(), l.end(), [&](double x) { return c.domain.contains(x); })) continue;
      const auto s = interaction_sum(c, l);
      double total = 0.0, scale = 0.0;
      for (double v : s) {
        total += v;
        scale += std::abs(v);
      }
      CHECK(std::abs(total) <= 1e-10 * std::max(scale, 1e-300));
    }
}

TEST_CASE("beta = 1 beta-models coincide with the undeformed ones") {
  const auto bw = model(ModelFamily::beta_wishart, {{"alpha", 2.5}, {"beta", 1}});
  const auto w = model(ModelFamily::wishart, {{"alpha", 2.5}});
  const auto bj = model(ModelFamily::beta_jacobi, {{"q", 2}, {"r", 4}, {"beta", 1}});
  const auto j = model(ModelFamily::jacobi, {{"q", 2}, {"r", 4}});
  const std::vector<double> l = {0.1, 0.35, 0.8};
  CHECK(eigen_drift(bw, l) == eigen_drift(w, l));
  CHECK(eigen_drift(bj, l) == eigen_drift(j, l));
}

TEST_CASE("complex mode doubles the interaction") {
  auto real = model(ModelFamily::wishart, {{"alpha", 3}});
  auto cplx = model(ModelFamily::wishart, {{"alpha", 3}, {"complex", 1}});
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 200; ++rep) {
    const auto l = testing::random_ascending(4, rng, 0.0, 10.0);
    const auto a = eigen_drift(cplx, l), b = eigen_drift(real, l), s = interaction_sum(real, l);
    for (std::size_t i = 0; i < l.size(); ++i) {
      const double ulp = std::numeric_limits<double>::epsilon() * std::max({std::abs(a[i]), std::abs(b[i]), 1.0});
      CHECK(std::abs((a[i] - b[i]) - s[i]) <= 4.0 * ulp);
    }
  }
}

TEST_CASE("ordering is required") {
  const auto d = model(ModelFamily::dyson, {{"beta", 1}});
  CHECK_THROWS_AS(interaction_sum(d, std::vector<double>{1.0, 1.0}), ModelError);
  CHECK_THROWS_AS(eigen_drift(d, std::vector<double>{2.0, 1.0}), ModelError);
}

TEST_CASE("boundary protection thresholds") {
  CHECK(boundary_protected(model(ModelFamily::wishart, {{"alpha", 2}}), 3));
  CHECK_FALSE(boundary_protected(model(ModelFamily::wishart, {{"alpha", 1.9}}), 3));
  CHECK(boundary_protected(model(ModelFamily::besq_particles, {{"nu", -1}, {"N", 3}}), 3));
  CHECK_FALSE(boundary_protected(model(ModelFamily::besq_particles, {{"nu", -1.1}, {"N", 3}}), 3));
  CHECK(boundary_protected(model(ModelFamily::jacobi, {{"q", 2}, {"r", 3}}), 3));
  CHECK_FALSE(boundary_protected(model(ModelFamily::jacobi, {{"q", 1.5}, {"r", 3}}), 3));
  CHECK_FALSE(boundary_protected(model(ModelFamily::beta_wishart, {{"alpha", 5}, {"beta", 0.5}}), 3));
  CHECK_FALSE(boundary_protected(model(ModelFamily::dyson, {}), 2));
  const Domain jd = protected_domain(model(ModelFamily::jacobi, {{"q", 2}, {"r", 3}}));
  CHECK(jd.lower == 0.0);
  CHECK(jd.upper == 1.0);
}

TEST_CASE("non-collision prediction follows the effective beta") {
  CHECK(noncollision_predicted(model(ModelFamily::dyson, {{"beta", 1.5}}), 2));
  CHECK(noncollision_predicted(model(ModelFamily::dyson, {{"beta", 1}}), 3));
  CHECK_FALSE(noncollision_predicted(model(ModelFamily::dyson, {{"beta", 0.5}}), 2));
  // The complex system with beta = 1/2 is the real one at beta = 1.
  CHECK(noncollision_predicted(model(ModelFamily::dyson, {{"beta", 0.5}, {"complex", 1}}), 2));
  CHECK(noncollision_predicted(model(ModelFamily::wishart, {{"alpha", 3}}), 3));
  const auto e = effective_beta(model(ModelFamily::laguerre_complex, {{"alpha", 1}}));
  CHECK(e.beta == 2.0);
  CHECK(e.b_scale == 2.0);
}

TEST_CASE("lipschitz estimate on known functions") {
  CHECK(lipschitz_estimate([](double x) { return 3.0 * x - 1.0; }, -2.0, 5.0) == doctest::Approx(3.0));
  CHECK(lipschitz_estimate([](double) { return 4.0; }, 0.0, 1.0) == 0.0);
  CHECK(lipschitz_estimate([](double x) { return x * x; }, 0.0, 1.0, 1001) == doctest::Approx(1.999).epsilon(1e-9));
}

TEST_CASE("expression evaluation") {
  CHECK(Expression::parse("1 + 2 * 3")(0.0) == 7.0);
  CHECK(Expression::parse("(1 + 2) * 3")(0.0) == 9.0);
  CHECK(Expression::parse("-x * -x")(3.0) == 9.0);
  CHECK(Expression::parse("sqrt(abs(x))")(-16.0) == 4.0);
  CHECK(Expression::parse("x / 4 - 1e-1")(2.0) == doctest::Approx(0.4));
  CHECK(Expression::parse("2 - 3 - 4")(0.0) == -5.0);
  CHECK(Expression::parse("  x  ").source() == "  x  ");
}

TEST_CASE("expression errors") {
  CHECK_THROWS_AS(Expression::parse(""), ExpressionError);
  CHECK_THROWS_AS(Expression::parse("1 +"), ExpressionError);
  CHECK_THROWS_AS(Expression::parse("y"), ExpressionError);
  CHECK_THROWS_AS(Expression::parse("sqrt(x"), ExpressionError);
  CHECK_THROWS_AS(Expression::parse("x x"), ExpressionError);
  CHECK_THROWS_AS(Expression::parse("exp(x)"), ExpressionError);
}

TEST_CASE("custom model uses its expressions") {
  const auto c = catalog(ModelId{ModelFamily::custom, {}, {{"g", "0"}, {"h", "0"}, {"b", "1"}}});
  const std::vector<double> l = {0.0, 2.0, 5.0};
  CHECK(eigen_drift(c, l) == std::vector<double>{1.0, 1.0, 1.0});
}
