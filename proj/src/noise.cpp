#include "ssde/noise.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace ssde {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

double inverse_normal_cdf(double u) {
  if (!(u > 0.0 && u < 1.0)) throw NoiseError("inverse_normal_cdf: argument outside (0, 1)");
  const double q = u - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? u : 1.0 - u;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                0.24178072517745061177) * r + 1.27045825245236838258) * r +
              3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                0.0151986665636164571966) * r + 0.14810397642748007459) * r +
              0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                0.0012426609473880784386) * r + 0.026532189526576123093) * r +
              0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
              0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t path_index) {
  // x -> mix64(x + c) is a bijection for fixed c.
  return mix64(path_index + mix64(seed ^ 0x5EED5EED5EED5EEDull));
}

std::size_t pair_index(std::size_t p, std::size_t k, std::size_t j) {
  if (!(k < j && j < p)) throw NoiseError("pair_index: requires k < j < p");
  // Pairs in rows 0..k-1 come first.
  return k * p - k * (k + 1) / 2 + (j - k - 1);
}

std::size_t lane_count(NoiseKind kind, std::size_t p) {
  switch (kind) {
    case NoiseKind::matrix: return p * p;
    case NoiseKind::spectral: return p + p * (p - 1) / 2;
    case NoiseKind::complex_matrix: return 2 * p * p;
  }
  throw NoiseError("lane_count: unknown kind");
}

void NoiseBundle::validate() const {
  if (dim == 0) throw NoiseError("NoiseBundle: dim must be >= 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw NoiseError("NoiseBundle: dt must be > 0");
  if (steps == 0) throw NoiseError("NoiseBundle: steps must be >= 1");
  if (steps > std::numeric_limits<std::uint32_t>::max())
    throw NoiseError("NoiseBundle: at most 2^32-1 steps");
}

namespace {

constexpr std::uint32_t kBridgeTag = 0x80000001u;

double uniform_open(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (std::uint64_t{hi} << 32) | lo;
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

std::array<std::uint32_t, 2> split_key(std::uint64_t k) {
  return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

// Fills `out` with standard normals; two per Philox block.
void normals(std::array<std::uint32_t, 2> key, std::uint64_t stream, std::uint32_t word2,
             std::uint32_t word3, bool lane_in_word2, std::span<double> out) {
  const auto s_lo = static_cast<std::uint32_t>(stream);
  const auto s_hi = static_cast<std::uint32_t>(stream >> 32);
  for (std::size_t block = 0; 2 * block < out.size(); ++block) {
    const auto b = static_cast<std::uint32_t>(block);
    const auto r = lane_in_word2 ? philox4x32({s_lo, s_hi, b, word3}, key)
                                 : philox4x32({s_lo, s_hi, word2, b}, key);
    out[2 * block] = inverse_normal_cdf(uniform_open(r[0], r[1]));
    if (2 * block + 1 < out.size()) out[2 * block + 1] = inverse_normal_cdf(uniform_open(r[2], r[3]));
  }
}

std::uint64_t node_key(std::uint64_t seed, std::uint64_t step, unsigned depth, std::uint64_t index) {
  std::uint64_t h = mix64(seed ^ 0xB81D6E5A3C2F4107ull);
  h = mix64(h ^ (step + 0x9E3779B97F4A7C15ull));
  h = mix64(h ^ (std::uint64_t{depth} * 0xD6E8FEB86659FD93ull));
  h = mix64(h ^ (index + 0xC2B2AE3D27D4EB4Full));
  return h;
}

// Every increment is a multiple of one power of two, chosen so that all
// values below 64 sqrt(dt) in magnitude are representable on that grid. Sums
// and differences of grid values in that range are then exact.
double grid_quantum(double dt) {
  int exp = 0;
  std::frexp(64.0 * std::sqrt(dt), &exp);
  return std::ldexp(1.0, exp - 52);
}

double to_grid(double value, double q) {
  const double v = std::nearbyint(value / q) * q;
  if (std::abs(v) >= 0x1p52 * q) throw NoiseError("increment outside the exact grid range");
  return v;
}

}  // namespace

Increments draw_increments(const NoiseBundle& bundle, std::uint64_t step) {
  bundle.validate();
  if (step >= bundle.steps) throw NoiseError("draw_increments: step index out of range");
  Increments out(bundle.lanes());
  normals(split_key(bundle.seed), bundle.stream, static_cast<std::uint32_t>(step), 0, false, out);
  const double sd = std::sqrt(bundle.dt);
  const double q = grid_quantum(bundle.dt);
  for (double& v : out) v = to_grid(v * sd, q);
  return out;
}

std::pair<Increments, Increments> split_increments(const NoiseBundle& bundle, std::uint64_t step,
                                                   unsigned depth, std::uint64_t index,
                                                   std::span<const double> parent,
                                                   double duration) {
  if (depth >= kMaxNodeDepth) throw NoiseError("split_increments: depth limit reached");
  if (parent.size() != bundle.lanes()) throw NoiseError("split_increments: lane count mismatch");
  Increments z(parent.size());
  normals(split_key(node_key(bundle.seed, step, depth, index)), bundle.stream, 0, kBridgeTag, true, z);
  const double sd = 0.5 * std::sqrt(duration);
  const double q = grid_quantum(bundle.dt);
  Increments left(parent.size());
  Increments right(parent.size());
  for (std::size_t l = 0; l < parent.size(); ++l) {
    left[l] = to_grid(0.5 * parent[l] + sd * z[l], q);
    right[l] = parent[l] - left[l];
  }
  return {std::move(left), std::move(right)};
}

Increments node_increments(const NoiseBundle& bundle, std::uint64_t step, unsigned depth,
                           std::uint64_t index) {
  if (depth > kMaxNodeDepth) throw NoiseError("node_increments: depth limit exceeded");
  if (depth < 64 && (index >> depth) != 0) throw NoiseError("node_increments: index out of range");
  Increments cur = draw_increments(bundle, step);
  double duration = bundle.dt;
  std::uint64_t node = 0;
  for (unsigned d = 0; d < depth; ++d) {
    auto [l, r] = split_increments(bundle, step, d, node, cur, duration);
    const bool go_right = (index >> (depth - 1 - d)) & 1u;
    cur = go_right ? std::move(r) : std::move(l);
    node = 2 * node + (go_right ? 1 : 0);
    duration *= 0.5;
  }
  return cur;
}

SharedPath::SharedPath(NoiseBundle base, unsigned level, unsigned max_level)
    : base_(base), level_(level), max_level_(max_level) {
  base_.validate();
  if (max_level_ > 30) throw NoiseError("SharedPath: max level must be <= 30");
  if (level_ > max_level_) throw NoiseError("SharedPath: refinement beyond max level");
}

double SharedPath::dt() const { return std::ldexp(base_.dt, -static_cast<int>(level_)); }

Increments SharedPath::increments(std::uint64_t fine_step) const {
  if (fine_step >= steps()) throw NoiseError("SharedPath: step index out of range");
  return node_increments(base_, base_step(fine_step), level_, node_index(fine_step));
}

SharedPath SharedPath::refine() const {
  if (level_ + 1 > max_level_) throw NoiseError("SharedPath: refinement beyond max level");
  return SharedPath(base_, level_ + 1, max_level_);
}

SpectralIncrementView::SpectralIncrementView(std::size_t p, std::span<const double> lanes)
    : p_(p), lanes_(lanes) {
  if (lanes.size() != lane_count(NoiseKind::spectral, p))
    throw NoiseError("SpectralIncrementView: lane count mismatch");
}

double SpectralIncrementView::beta(std::size_t k, std::size_t j) const {
  if (k == j) throw NoiseError("SpectralIncrementView: beta(k, k) undefined");
  if (k > j) std::swap(k, j);
  return lanes_[p_ + pair_index(p_, k, j)];
}

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "little-endian host assumed");
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.write(buf, sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) throw NoiseError("read_noise_dump: truncated stream");
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

constexpr char kMagic[8] = {'S', 'S', 'D', 'E', 'N', 'O', 'I', 'S'};

}  // namespace

void write_noise_dump(std::ostream& out, const NoiseBundle& bundle) {
  bundle.validate();
  out.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, 1);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(bundle.dim));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(bundle.kind));
  put_le<std::uint64_t>(out, bundle.steps);
  put_le<double>(out, bundle.dt);
  put_le<std::uint64_t>(out, bundle.seed);
  for (std::uint64_t k = 0; k < bundle.steps; ++k)
    for (double v : draw_increments(bundle, k)) put_le<double>(out, v);
}

NoiseDump read_noise_dump(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw NoiseError("read_noise_dump: bad magic");
  NoiseDump d;
  d.version = get_le<std::uint32_t>(in);
  if (d.version != 1) throw NoiseError("read_noise_dump: unsupported version " + std::to_string(d.version));
  d.dim = get_le<std::uint32_t>(in);
  const auto kind = get_le<std::uint32_t>(in);
  if (kind > 2) throw NoiseError("read_noise_dump: unknown kind");
  d.kind = static_cast<NoiseKind>(kind);
  d.steps = get_le<std::uint64_t>(in);
  d.dt = get_le<double>(in);
  d.seed = get_le<std::uint64_t>(in);
  const std::uint64_t count = d.steps * lane_count(d.kind, d.dim);
  d.increments.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) d.increments.push_back(get_le<double>(in));
  return d;
}

}  // namespace ssde
