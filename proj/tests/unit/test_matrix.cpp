#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ssde/matrix_sde.hpp"
#include "ssde/spectral_sde.hpp"
#include "support.hpp"

using namespace ssde;

namespace {

SpectralCoefficients model(ModelFamily f, std::map<std::string, double> params) {
  return catalog(ModelId{f, std::move(params), {}});
}

SpectralCoefficients custom(const std::string& g, const std::string& h, const std::string& b) {
  return catalog(ModelId{ModelFamily::custom, {}, {{"g", g}, {"h", h}, {"b", b}}});
}

NoiseBundle noise(NoiseKind kind, std::size_t p, double T, double dt, std::uint64_t seed) {
  NoiseBundle nb;
  nb.kind = kind;
  nb.dim = p;
  nb.dt = dt;
  nb.steps = step_count(T, dt);
  nb.seed = seed;
  nb.stream = derive_stream(seed, 0);
  return nb;
}

Matrix random_matrix(std::size_t p, std::mt19937_64& rng, double s) {
  std::normal_distribution<double> n(0.0, s);
  Matrix m(p, p);
  for (double& v : m.data()) v = n(rng);
  return m;
}

}  // namespace

TEST_CASE("pure drift step on a diagonal matrix") {
  const auto c = custom("0", "0", "1");
  const std::vector<double> d = {0.5, 1.5, 4.0};
  const SymmetricMatrix x = SymmetricMatrix::diagonal(d);
  std::mt19937_64 rng(1);
  const SymmetricMatrix y = step_matrix(x, c, random_matrix(3, rng, 1.0), 0.125);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(y(i, j) == (i == j ? d[i] + 0.125 : 0.0));
}

TEST_CASE("step matches the formula with explicit matrix functions") {
  std::mt19937_64 rng(2);
  const auto w = model(ModelFamily::wishart_ou, {{"alpha", 3}, {"c", 0.5}});
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t p = 2 + rep % 4;
    // SPD start: A A^T + I.
    const Matrix a = random_matrix(p, rng, 1.0);
    const SymmetricMatrix x = SymmetricMatrix::from_matrix(a * a.transpose() + Matrix::identity(p));
    const Matrix dB = random_matrix(p, rng, 0.05);
    const double dt = 1e-3;
    const Matrix g = apply_spectral_function(x, [](double v) { return std::sqrt(v); }).matrix();
    // h = 1, b = 3 + 0.5 x
    const Matrix expect = x.matrix() + g * dB + dB.transpose() * g + (3.0 * Matrix::identity(p) + 0.5 * x.matrix()) * dt;
    const SymmetricMatrix got = step_matrix(x, w, dB, dt);
    CHECK(testing::max_abs_diff(got.matrix(), SymmetricMatrix::from_matrix(expect).matrix()) < 1e-12);
    CHECK(got.matrix() == got.matrix().transpose());
  }
}

TEST_CASE("one-dimensional matrix and spectral runs agree") {
  const double T = 0.5, dt = 1e-3;
  const auto w = model(ModelFamily::wishart, {{"alpha", 3}});
  const NoiseBundle mn = noise(NoiseKind::matrix, 1, T, dt, 9);
  NoiseBundle sn = mn;
  sn.kind = NoiseKind::spectral;
  MatrixSchemeConfig mc;
  mc.T = T;
  mc.dt = dt;
  SpectralSchemeConfig sc;
  sc.T = T;
  sc.dt = dt;
  sc.adaptive = false;
  const std::vector<double> l0 = {1.0};
  const auto m = simulate_matrix(SymmetricMatrix::diagonal(l0), w, mn, mc);
  const auto s = simulate_spectral(l0, std::nullopt, w, sn, sc);
  REQUIRE(m.status == RunStatus::completed);
  REQUIRE(m.eigenvalues.size() == s.samples.size());
  for (std::size_t k = 0; k < s.samples.size(); ++k)
    CHECK(m.eigenvalues[k][0] == doctest::Approx(s.samples[k].lambda[0]).epsilon(1e-12));
}

TEST_CASE("complex step with a real driver equals the real step") {
  std::mt19937_64 rng(3);
  const auto j = model(ModelFamily::jacobi, {{"q", 3}, {"r", 3}, {"complex", 1}});
  const auto jr = model(ModelFamily::jacobi, {{"q", 3}, {"r", 3}});
  const std::vector<double> d = {0.2, 0.45, 0.7};
  const SymmetricMatrix xr = SymmetricMatrix::diagonal(d);
  const HermitianMatrix xc = HermitianMatrix::diagonal(d);
  const Matrix dB = random_matrix(3, rng, 0.03);
  const SymmetricMatrix yr = step_matrix(xr, jr, dB, 1e-3);
  const HermitianMatrix yc = step_matrix_complex(xc, j, dB, Matrix(3, 3), 1e-3);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      CHECK(yc(a, b).real() == doctest::Approx(yr(a, b)).epsilon(1e-13).scale(1.0));
      CHECK(std::abs(yc(a, b).imag()) < 1e-15);
    }
}

TEST_CASE("complex runs stay Hermitian with matching spectra") {
  const double T = 0.2, dt = 1e-3;
  const auto l = model(ModelFamily::laguerre_complex, {{"alpha", 3}});
  MatrixSchemeConfig mc;
  mc.T = T;
  mc.dt = dt;
  mc.stride = 50;
  const std::vector<double> d = {1.0, 2.0, 3.0};
  const auto t = simulate_matrix_complex(HermitianMatrix::diagonal(d), l, noise(NoiseKind::complex_matrix, 3, T, dt, 4), mc);
  REQUIRE(t.status == RunStatus::completed);
  CHECK(t.states.size() == 5);
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    const HermitianMatrix& x = t.states[k];
    for (std::size_t a = 0; a < 3; ++a) {
      CHECK(x(a, a).imag() == 0.0);
      for (std::size_t b = 0; b < 3; ++b) CHECK(x(a, b) == std::conj(x(b, a)));
    }
    const auto ev = hermitian_eigenvalues(x);
    for (std::size_t a = 0; a < 3; ++a) CHECK(ev[a] == doctest::Approx(t.eigenvalues[k][a]).epsilon(1e-10));
  }
  // Off-diagonal imaginary parts are driven.
  CHECK(std::abs(t.states.back()(0, 1).imag()) > 0.0);
}

TEST_CASE("matrix run bookkeeping") {
  const double T = 0.1, dt = 1e-3;
  const auto w = model(ModelFamily::wishart, {{"alpha", 3}});
  MatrixSchemeConfig mc;
  mc.T = T;
  mc.dt = dt;
  mc.stride = 30;
  const std::vector<double> d = {1.0, 2.0};
  const auto t = simulate_matrix(SymmetricMatrix::diagonal(d), w, noise(NoiseKind::matrix, 2, T, dt, 5), mc);
  CHECK(t.times.size() == 5);  // 0, 30, 60, 90, 100
  CHECK(t.times.back() == doctest::Approx(T));
  std::ostringstream csv;
  write_matrix_csv(csv, t);
  std::istringstream in(csv.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x_11,x_12,x_22");

  CHECK_THROWS(simulate_matrix(SymmetricMatrix::diagonal(d), w, noise(NoiseKind::spectral, 2, T, dt, 5), mc));
  CHECK_THROWS(simulate_matrix(SymmetricMatrix::diagonal(std::vector<double>{1.0, 1.0}), w,
                               noise(NoiseKind::matrix, 2, T, dt, 5), mc));
  CHECK_THROWS(simulate_matrix(SymmetricMatrix::diagonal(d), model(ModelFamily::dyson, {{"complex", 1}}),
                               noise(NoiseKind::matrix, 2, T, dt, 5), mc));
}

TEST_CASE("overflow stops the run with an explosion event") {
  const auto c = custom("0", "0", "x * x");
  MatrixSchemeConfig mc;
  mc.T = 1.0;
  mc.dt = 0.1;
  const std::vector<double> d = {10.0, 20.0};
  const auto t = simulate_matrix(SymmetricMatrix::diagonal(d), c, noise(NoiseKind::matrix, 2, 1.0, 0.1, 1), mc);
  CHECK(t.status == RunStatus::explosion);
  REQUIRE_FALSE(t.events.empty());
  CHECK(t.events.back().type == EventType::explosion);
  CHECK(t.end_time < 1.0);
}
