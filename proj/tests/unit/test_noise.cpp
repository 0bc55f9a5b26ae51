#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "ssde/noise.hpp"
#include "support.hpp"

using namespace ssde;

namespace {

NoiseBundle bundle(NoiseKind kind, std::size_t p, std::uint64_t steps, double dt, std::uint64_t seed,
                   std::uint64_t stream) {
  NoiseBundle b;
  b.kind = kind;
  b.dim = p;
  b.steps = steps;
  b.dt = dt;
  b.seed = seed;
  b.stream = stream;
  return b;
}

}  // namespace

TEST_CASE("philox4x32-10 known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("inverse normal cdf against erfc") {
  CHECK(inverse_normal_cdf(0.5) == 0.0);
  CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(inverse_normal_cdf(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-14));
  for (double u : {1e-300, 1e-12, 1e-6, 0.01, 0.2, 0.4999, 0.7, 0.93, 0.999999}) {
    const double x = inverse_normal_cdf(u);
    CHECK(testing::normal_cdf(x) == doctest::Approx(u).epsilon(1e-12));
    // 1 - u is only exact-ish away from the tails.
    if (u >= 1e-6 && u <= 1.0 - 1e-6) CHECK(inverse_normal_cdf(1.0 - u) == doctest::Approx(-x).epsilon(1e-8));
  }
  CHECK_THROWS_AS(inverse_normal_cdf(0.0), NoiseError);
  CHECK_THROWS_AS(inverse_normal_cdf(1.0), NoiseError);
}

TEST_CASE("derive_stream is injective over path indices") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 100000; ++i) seen.insert(derive_stream(42, i));
  CHECK(seen.size() == 100000);
  CHECK(derive_stream(1, 0) != derive_stream(2, 0));
}

TEST_CASE("pair index enumerates pairs row-major") {
  const std::size_t p = 5;
  std::size_t expect = 0;
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t j = k + 1; j < p; ++j) CHECK(pair_index(p, k, j) == expect++);
  CHECK_THROWS_AS(pair_index(p, 2, 2), NoiseError);
}

TEST_CASE("lane counts") {
  CHECK(lane_count(NoiseKind::matrix, 3) == 9);
  CHECK(lane_count(NoiseKind::spectral, 3) == 6);
  CHECK(lane_count(NoiseKind::spectral, 1) == 1);
  CHECK(lane_count(NoiseKind::complex_matrix, 3) == 18);
}

TEST_CASE("increments are deterministic and stream dependent") {
  const NoiseBundle a = bundle(NoiseKind::spectral, 3, 10, 0.01, 7, 1);
  NoiseBundle b = a;
  CHECK(draw_increments(a, 4) == draw_increments(b, 4));
  b.stream = 2;
  CHECK(draw_increments(a, 4) != draw_increments(b, 4));
  CHECK(draw_increments(a, 4) != draw_increments(a, 5));
  CHECK(draw_increments(a, 0).size() == 6);
  CHECK_THROWS_AS(draw_increments(a, 10), NoiseError);
}

TEST_CASE("level-0 increments are N(0, dt)") {
  const double dt = 0.25;
  const NoiseBundle nb = bundle(NoiseKind::matrix, 4, 5000, dt, 3, 9);
  std::vector<double> z;
  for (std::uint64_t k = 0; k < nb.steps; ++k)
    for (double v : draw_increments(nb, k)) z.push_back(v / std::sqrt(dt));
  const double n = static_cast<double>(z.size());
  double m = 0.0, v = 0.0;
  for (double x : z) m += x;
  m /= n;
  for (double x : z) v += (x - m) * (x - m);
  v /= n - 1.0;
  CHECK(std::abs(m) < 4.0 / std::sqrt(n));
  CHECK(std::abs(v - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(testing::ks_normal(z) < 1.63 / std::sqrt(n));
}

TEST_CASE("bridge halves add back to the parent exactly") {
  const NoiseBundle nb = bundle(NoiseKind::spectral, 4, 50, 0.1, 11, 5);
  for (std::uint64_t k = 0; k < nb.steps; ++k) {
    const Increments parent = draw_increments(nb, k);
    const auto [l, r] = split_increments(nb, k, 0, 0, parent, nb.dt);
    for (std::size_t i = 0; i < parent.size(); ++i) CHECK(l[i] + r[i] == parent[i]);
    const auto [ll, lr] = split_increments(nb, k, 1, 0, l, nb.dt / 2);
    for (std::size_t i = 0; i < parent.size(); ++i) CHECK(ll[i] + lr[i] == l[i]);
  }
}

TEST_CASE("deep bridge splits stay exact") {
  const NoiseBundle nb = bundle(NoiseKind::spectral, 3, 20, 1e-4, 3, 1);
  for (std::uint64_t k = 0; k < nb.steps; ++k) {
    Increments cur = draw_increments(nb, k);
    double duration = nb.dt;
    for (unsigned d = 0; d < 48; ++d) {
      const auto [l, r] = split_increments(nb, k, d, 0, cur, duration);
      for (std::size_t i = 0; i < cur.size(); ++i) REQUIRE(l[i] + r[i] == cur[i]);
      cur = (d % 2) ? r : l;
      duration *= 0.5;
    }
  }
}

TEST_CASE("bridge nodes are N(0, dt / 2^depth) and independent of the sibling") {
  const double dt = 1.0;
  const NoiseBundle nb = bundle(NoiseKind::matrix, 3, 4000, dt, 19, 2);
  const unsigned depth = 3;
  std::vector<double> z;
  double cross = 0.0;
  for (std::uint64_t k = 0; k < nb.steps; ++k) {
    const Increments a = node_increments(nb, k, depth, 2);
    const Increments b = node_increments(nb, k, depth, 3);
    for (std::size_t i = 0; i < a.size(); ++i) {
      z.push_back(a[i] / std::sqrt(dt / 8));
      cross += a[i] * b[i] / (dt / 8);
    }
  }
  const double n = static_cast<double>(z.size());
  CHECK(testing::ks_normal(z) < 1.63 / std::sqrt(n));
  CHECK(std::abs(cross / n) < 4.0 / std::sqrt(n));
}

TEST_CASE("shared path levels sum to coarser levels exactly") {
  const NoiseBundle nb = bundle(NoiseKind::spectral, 2, 20, 0.05, 4, 8);
  const SharedPath l0(nb), l1 = l0.refine(), l2 = l1.refine();
  CHECK(l2.steps() == 80);
  CHECK(l2.dt() == doctest::Approx(0.0125));
  for (std::uint64_t m = 0; m < l1.steps(); ++m) {
    const Increments a = l2.increments(2 * m), b = l2.increments(2 * m + 1), c = l1.increments(m);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(a[i] + b[i] == c[i]);
  }
  for (std::uint64_t m = 0; m < l0.steps(); ++m) CHECK(l0.increments(m) == draw_increments(nb, m));
  CHECK(l2.base_step(13) == 3);
  CHECK(l2.node_index(13) == 1);
  CHECK_THROWS_AS(SharedPath(nb, 3, 2), NoiseError);
}

TEST_CASE("spectral view pairs are symmetric") {
  const std::vector<double> lanes = {1, 2, 3, 10, 20, 30};
  const SpectralIncrementView v(3, lanes);
  CHECK(v.nu(2) == 3);
  CHECK(v.beta(0, 1) == 10);
  CHECK(v.beta(2, 0) == 20);
  CHECK(v.beta(1, 2) == 30);
  CHECK(v.beta(2, 1) == 30);
  CHECK_THROWS_AS(v.beta(1, 1), NoiseError);
}

TEST_CASE("noise dump round trip and header layout") {
  const NoiseBundle nb = bundle(NoiseKind::spectral, 2, 6, 0.5, 77, 3);
  std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
  write_noise_dump(buf, nb);
  const std::string bytes = buf.str();
  CHECK(bytes.substr(0, 8) == "SSDENOIS");
  CHECK(bytes.size() == 8 + 4 + 4 + 4 + 8 + 8 + 8 + 6 * 3 * 8);
  const NoiseDump d = read_noise_dump(buf);
  CHECK(d.version == 1);
  CHECK(d.dim == 2);
  CHECK(d.kind == NoiseKind::spectral);
  CHECK(d.steps == 6);
  CHECK(d.dt == 0.5);
  CHECK(d.seed == 77);
  REQUIRE(d.increments.size() == 18);
  for (std::uint64_t k = 0; k < 6; ++k) {
    const Increments inc = draw_increments(nb, k);
    for (std::size_t i = 0; i < 3; ++i) CHECK(d.increments[k * 3 + i] == inc[i]);
  }
  std::stringstream bad("NOTNOISE........");
  CHECK_THROWS_AS(read_noise_dump(bad), NoiseError);
}

TEST_CASE("bundle validation") {
  NoiseBundle nb = bundle(NoiseKind::spectral, 0, 1, 0.1, 0, 0);
  CHECK_THROWS_AS(nb.validate(), NoiseError);
  nb.dim = 1;
  nb.dt = 0.0;
  CHECK_THROWS_AS(nb.validate(), NoiseError);
  nb.dt = 0.1;
  CHECK_NOTHROW(nb.validate());
}
