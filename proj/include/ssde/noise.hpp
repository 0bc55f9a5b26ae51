#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ssde {

class NoiseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Inverse of the standard normal CDF, Wichura's AS241 (PPND16) rational
/// approximation; relative accuracy about 1e-16 on (0, 1).
double inverse_normal_cdf(double u);

/// Bijective 64-bit mixer (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

/// Per-path stream id; injective in path_index for a fixed seed.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t path_index);

enum class NoiseKind : std::uint32_t { matrix = 0, spectral = 1, complex_matrix = 2 };

/// Index of the pair (k, j), k < j, among the p(p-1)/2 pairs in row-major order.
std::size_t pair_index(std::size_t p, std::size_t k, std::size_t j);

/// Number of independent scalar Brownian drivers per step.
std::size_t lane_count(NoiseKind kind, std::size_t p);

/// Reproducible Brownian increments keyed by (seed, stream, step, lane).
///
/// Lane layout:
///   matrix          lane i*p + j            -> B_ij
///   spectral        lanes 0..p-1            -> nu_i
///                   lane p + pair_index(k,j) -> beta_kj (k < j)
///   complex_matrix  lanes 0..p^2-1          -> Re W, lanes p^2..2p^2-1 -> Im W
struct NoiseBundle {
  NoiseKind kind = NoiseKind::spectral;
  std::size_t dim = 1;
  std::uint64_t steps = 1;
  double dt = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::size_t lanes() const { return lane_count(kind, dim); }
  void validate() const;
};

using Increments = std::vector<double>;

/// Level-0 increments of step `step`; each lane ~ N(0, dt), rounded to a
/// power-of-two grid of spacing about 64 sqrt(dt) * 2^-52.
Increments draw_increments(const NoiseBundle& bundle, std::uint64_t step);

/// Brownian-bridge split of a dyadic node inside base step `step`. The node
/// at `depth` with `index` covers [index, index+1) * dt / 2^depth of that
/// step and carries increments `parent` over a span of length `duration`.
///
/// The left half is drawn from the bridge law and rounded to the same grid as
/// the level-0 increments; the right half is parent - left. Both lie on the
/// grid well inside its exact range, so left + right == parent holds bitwise
/// at every depth. `parent` must itself be on the grid.
std::pair<Increments, Increments> split_increments(const NoiseBundle& bundle, std::uint64_t step,
                                                   unsigned depth, std::uint64_t index,
                                                   std::span<const double> parent,
                                                   double duration);

/// Increments of a dyadic node, computed top-down from level 0.
Increments node_increments(const NoiseBundle& bundle, std::uint64_t step, unsigned depth,
                           std::uint64_t index);

constexpr unsigned kMaxNodeDepth = 62;

/// A base bundle viewed at refinement level l (step dt / 2^l). All levels
/// share the same underlying Brownian path.
class SharedPath {
 public:
  static constexpr unsigned kDefaultMaxLevel = 12;

  explicit SharedPath(NoiseBundle base, unsigned level = 0,
                      unsigned max_level = kDefaultMaxLevel);

  const NoiseBundle& base() const { return base_; }
  unsigned level() const { return level_; }
  unsigned max_level() const { return max_level_; }
  std::uint64_t steps() const { return base_.steps << level_; }
  double dt() const;

  /// Increments of fine step m at this level.
  Increments increments(std::uint64_t fine_step) const;

  /// Base step containing fine step m and the node coordinates inside it.
  std::uint64_t base_step(std::uint64_t fine_step) const { return fine_step >> level_; }
  std::uint64_t node_index(std::uint64_t fine_step) const {
    return fine_step & ((std::uint64_t{1} << level_) - 1);
  }

  SharedPath refine() const;

 private:
  NoiseBundle base_;
  unsigned level_;
  unsigned max_level_;
};

/// Spectral-kind view: nu(i) and beta(k, j) with beta(j, k) == beta(k, j).
class SpectralIncrementView {
 public:
  SpectralIncrementView(std::size_t p, std::span<const double> lanes);
  double nu(std::size_t i) const { return lanes_[i]; }
  double beta(std::size_t k, std::size_t j) const;
  std::span<const double> nus() const { return lanes_.subspan(0, p_); }

 private:
  std::size_t p_;
  std::span<const double> lanes_;
};

/// Binary dump: magic "SSDENOIS", u32 version, u32 p, u32 kind, u64 n,
/// f64 dt, u64 seed, then n * lanes little-endian f64 increments.
struct NoiseDump {
  std::uint32_t version = 1;
  std::uint32_t dim = 0;
  NoiseKind kind = NoiseKind::spectral;
  std::uint64_t steps = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> increments;
};

void write_noise_dump(std::ostream& out, const NoiseBundle& bundle);
NoiseDump read_noise_dump(std::istream& in);

}  // namespace ssde
