#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "ssde/linalg.hpp"
#include "ssde/models.hpp"
#include "ssde/noise.hpp"
#include "ssde/trajectory.hpp"

namespace ssde {

class MatrixSdeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MatrixSchemeConfig {
  double dt = 1e-3;
  double T = 1.0;
  /// Average (X + X^T) / 2 after each step; otherwise keep the upper triangle.
  bool symmetrize = true;
  std::uint64_t stride = 1;
  /// ||X||_F above this stops the run with an explosion event.
  double overflow_bound = 1e12;

  void validate() const;
};

/// X + g(X) dB h(X) + h(X) dB^T g(X) + b(X) dt, with g, h, b applied to the
/// spectrum of X.
SymmetricMatrix step_matrix(const SymmetricMatrix& x, const SpectralCoefficients& coeff, const Matrix& dB,
                            double dt, bool symmetrize = true);

/// Same for Hermitian X driven by dW = dB1 + i dB2 (and dW^* in the second
/// term), computed on the real 2p x 2p embedding.
HermitianMatrix step_matrix_complex(const HermitianMatrix& x, const SpectralCoefficients& coeff,
                                    const Matrix& dB1, const Matrix& dB2, double dt);

template <typename State>
struct MatrixTrajectory {
  std::vector<double> times;
  std::vector<State> states;
  /// Ascending eigenvalues of each recorded state.
  std::vector<std::vector<double>> eigenvalues;
  std::vector<TrajectoryEvent> events;
  RunStatus status = RunStatus::completed;
  double end_time = 0.0;
  /// Extremes of the spectrum over all steps.
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  std::uint64_t excursions = 0;
};

using RealMatrixTrajectory = MatrixTrajectory<SymmetricMatrix>;
using ComplexMatrixTrajectory = MatrixTrajectory<HermitianMatrix>;

/// Euler-Maruyama on the symmetric matrix SDE. Noise must be matrix kind with
/// matching dimension; dB_ij is lane i*p + j.
RealMatrixTrajectory simulate_matrix(const SymmetricMatrix& x0, const SpectralCoefficients& coeff,
                                     const NoiseBundle& noise, const MatrixSchemeConfig& config);

/// Hermitian variant; noise must be complex_matrix kind.
ComplexMatrixTrajectory simulate_matrix_complex(const HermitianMatrix& x0, const SpectralCoefficients& coeff,
                                                const NoiseBundle& noise, const MatrixSchemeConfig& config);

/// Header: t,x_11,x_12,...,x_pp (upper triangle, row-major).
void write_matrix_csv(std::ostream& out, const RealMatrixTrajectory& traj);
/// Header: t,x_11_re,x_11_im,... (upper triangle, row-major).
void write_matrix_csv(std::ostream& out, const ComplexMatrixTrajectory& traj);

}  // namespace ssde
