#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ssde/linalg.hpp"
#include "ssde/models.hpp"
#include "ssde/noise.hpp"
#include "ssde/trajectory.hpp"

namespace ssde {

class SpectralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TruncationMode { full_truncation, reflect_reject };

std::string to_string(TruncationMode m);
TruncationMode parse_truncation(const std::string& s);

struct SpectralSchemeConfig {
  double dt = 1e-3;
  double T = 1.0;
  /// A gap below this is a collision.
  double eps_gap = 1e-12;
  bool adaptive = true;
  unsigned max_halvings = 20;
  TruncationMode truncation = TruncationMode::full_truncation;
  std::uint64_t stride = 1;
  bool track_eigenvectors = false;

  void validate() const;
};

/// Skew-symmetric increment of the stochastic logarithm of H.
struct EigenvectorLogIncrement {
  Matrix dA;
};

/// Euler proposal: l_i + 2 g(l_i) h(l_i) dnu_i + drift_i dt. No truncation.
std::vector<double> step_eigenvalues(std::span<const double> lambda, const SpectralCoefficients& coeff,
                                     std::span<const double> dnu, double dt);

/// Clamps into `domain`; returns how many entries moved.
std::size_t truncate_to_domain(std::vector<double>& lambda, const Domain& domain);

/// dA_ij = sqrt(G(l_i, l_j)) / (l_j - l_i) dbeta_ij for i < j, dA_ji = -dA_ij.
EigenvectorLogIncrement build_dA(std::span<const double> lambda, const SpectralCoefficients& coeff,
                                 const SpectralIncrementView& dbeta, double eps_gap);

/// H (I + dA + 1/2 diag(dAdA)) projected back to the orthogonal group, where
/// (dAdA)_ii = -sum_{k != i} G(l_i, l_k) / (l_k - l_i)^2 dt.
Matrix step_eigenvectors(const Matrix& h, std::span<const double> lambda, const SpectralCoefficients& coeff,
                         const SpectralIncrementView& dbeta, double dt, double eps_gap);

double min_gap(std::span<const double> lambda);

struct SpectralSample {
  double t = 0.0;
  std::vector<double> lambda;
  double min_gap = 0.0;
  double lyapunov = 0.0;
  std::optional<Matrix> eigenvectors;
};

struct SpectralTrajectory {
  std::vector<SpectralSample> samples;
  std::vector<TrajectoryEvent> events;
  RunStatus status = RunStatus::completed;
  double end_time = 0.0;
  std::vector<double> final_lambda;
  std::optional<Matrix> final_eigenvectors;

  // Extremes over every accepted (sub)step, not only recorded samples.
  double min_gap_seen = 0.0;
  double max_lyapunov = 0.0;
  double min_lambda = 0.0;
  double max_lambda = 0.0;
  std::uint64_t accepted_steps = 0;
  std::uint64_t rejected_steps = 0;
  std::uint64_t truncations = 0;
  std::uint64_t excursions = 0;
  double max_orthonormality_defect = 0.0;
};

/// Integrates the eigenvalue (and optionally eigenvector) system along a
/// shared Brownian path. Fine steps have length path.dt(); rejected steps are
/// split along the same path's Brownian bridge. Collisions and explosions
/// stop the run and are reported in `events`.
SpectralTrajectory simulate_spectral(std::span<const double> lambda0, const std::optional<Matrix>& h0,
                                     const SpectralCoefficients& coeff, const SharedPath& path,
                                     const SpectralSchemeConfig& config);

SpectralTrajectory simulate_spectral(std::span<const double> lambda0, const std::optional<Matrix>& h0,
                                     const SpectralCoefficients& coeff, const NoiseBundle& noise,
                                     const SpectralSchemeConfig& config);

/// Header: t,lambda_1..lambda_p,mingap,lyapunovU[,h_11..h_pp]
void write_spectral_csv(std::ostream& out, const SpectralTrajectory& traj);

}  // namespace ssde
