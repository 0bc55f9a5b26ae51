#include "ssde/matrix_sde.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace ssde {

void MatrixSchemeConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw MatrixSdeError("matrix scheme: dt must be > 0");
  if (!(T > 0.0) || !std::isfinite(T)) throw MatrixSdeError("matrix scheme: T must be > 0");
  if (dt > T) throw MatrixSdeError("matrix scheme: dt must be <= T");
  if (stride == 0) throw MatrixSdeError("matrix scheme: stride must be >= 1");
  if (!(overflow_bound > 0.0)) throw MatrixSdeError("matrix scheme: overflow bound must be > 0");
}

namespace {

// One Euler step on a real symmetric (possibly embedded) state with its
// spectral decomposition already computed.
Matrix euler_update(const SpectralState& s, const Matrix& x, const SpectralCoefficients& coeff, const Matrix& dB,
                    double dt) {
  const Matrix g = apply_spectral_function(s, coeff.g).matrix();
  const Matrix h = apply_spectral_function(s, coeff.h).matrix();
  const Matrix b = apply_spectral_function(s, coeff.b).matrix();
  Matrix next = x;
  next += g * dB * h + h * dB.transpose() * g;
  next += b * dt;
  return next;
}

SymmetricMatrix close_symmetric(const Matrix& m, bool symmetrize) {
  if (symmetrize) return SymmetricMatrix::from_matrix(m);
  SymmetricMatrix out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) out.set(i, j, m(i, j));
  return out;
}

Matrix complex_driver(const Matrix& dB1, const Matrix& dB2) {
  const std::size_t p = dB1.rows();
  Matrix e(2 * p, 2 * p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      e(i, j) = dB1(i, j);
      e(i + p, j + p) = dB1(i, j);
      e(i, j + p) = -dB2(i, j);
      e(i + p, j) = dB2(i, j);
    }
  return e;
}

std::vector<double> halve_doubled(const std::vector<double>& doubled) {
  std::vector<double> out(doubled.size() / 2);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = 0.5 * (doubled[2 * k] + doubled[2 * k + 1]);
  return out;
}

// Real and complex simulations differ only in these hooks.
struct RealOps {
  using State = SymmetricMatrix;
  static constexpr NoiseKind kind = NoiseKind::matrix;
  static std::size_t dim(const State& x) { return x.dim(); }
  static SpectralState decompose(const State& x) { return eigendecompose(x); }
  static std::vector<double> eigenvalues(const SpectralState& s) { return s.values; }
  static double norm(const State& x) { return x.matrix().frobenius_norm(); }
  static State step(const State& x, const SpectralState& s, const SpectralCoefficients& coeff,
                    const Increments& inc, double dt, bool symmetrize) {
    const std::size_t p = x.dim();
    Matrix dB(p, p);
    std::copy(inc.begin(), inc.end(), dB.data().begin());
    return close_symmetric(euler_update(s, x.matrix(), coeff, dB, dt), symmetrize);
  }
};

struct ComplexOps {
  using State = HermitianMatrix;
  static constexpr NoiseKind kind = NoiseKind::complex_matrix;
  static std::size_t dim(const State& x) { return x.dim(); }
  static SpectralState decompose(const State& x) { return eigendecompose(x.embed()); }
  static std::vector<double> eigenvalues(const SpectralState& s) { return halve_doubled(s.values); }
  static double norm(const State& x) { return x.embed().matrix().frobenius_norm() / std::sqrt(2.0); }
  static State step(const State& x, const SpectralState& s, const SpectralCoefficients& coeff,
                    const Increments& inc, double dt, bool) {
    const std::size_t p = x.dim();
    Matrix dB1(p, p), dB2(p, p);
    std::copy(inc.begin(), inc.begin() + p * p, dB1.data().begin());
    std::copy(inc.begin() + p * p, inc.end(), dB2.data().begin());
    const Matrix e = euler_update(s, x.embed().matrix(), coeff, complex_driver(dB1, dB2), dt);
    return HermitianMatrix::from_embedding(e);
  }
};

template <typename Ops>
MatrixTrajectory<typename Ops::State> run(const typename Ops::State& x0, const SpectralCoefficients& coeff,
                                          const NoiseBundle& noise, const MatrixSchemeConfig& config) {
  config.validate();
  const std::size_t p = Ops::dim(x0);
  check_dimension(coeff, p);
  if (noise.kind != Ops::kind || noise.dim != p)
    throw MatrixSdeError("simulate_matrix: noise kind or dimension mismatch");
  const std::uint64_t steps = step_count(config.T, config.dt);
  if (noise.steps != steps || std::abs(noise.dt - config.dt) > 1e-15 * config.dt)
    throw MatrixSdeError("simulate_matrix: noise grid does not match scheme");

  MatrixTrajectory<typename Ops::State> out;
  typename Ops::State x = x0;
  SpectralState s = Ops::decompose(x);
  std::vector<double> ev = Ops::eigenvalues(s);
  for (std::size_t i = 1; i < ev.size(); ++i)
    if (!(ev[i - 1] < ev[i])) throw MatrixSdeError("simulate_matrix: X0 must have distinct eigenvalues");
  for (double l : ev)
    if (!coeff.domain.contains(l)) throw MatrixSdeError("simulate_matrix: X0 spectrum outside model domain");

  out.min_eigenvalue = ev.front();
  out.max_eigenvalue = ev.back();
  bool outside = false;
  auto record = [&](double t) {
    out.times.push_back(t);
    out.states.push_back(x);
    out.eigenvalues.push_back(ev);
  };
  record(0.0);

  for (std::uint64_t k = 0; k < steps; ++k) {
    const double t1 = static_cast<double>(k + 1) * config.dt;
    x = Ops::step(x, s, coeff, draw_increments(noise, k), config.dt, config.symmetrize);
    const double norm = Ops::norm(x);
    if (!std::isfinite(norm) || norm > config.overflow_bound) {
      out.status = RunStatus::explosion;
      out.end_time = t1;
      out.events.push_back({EventType::explosion, t1, "matrix norm beyond overflow bound"});
      return out;
    }
    s = Ops::decompose(x);
    ev = Ops::eigenvalues(s);
    out.min_eigenvalue = std::min(out.min_eigenvalue, ev.front());
    out.max_eigenvalue = std::max(out.max_eigenvalue, ev.back());
    const bool now_outside =
        !std::all_of(ev.begin(), ev.end(), [&](double l) { return coeff.domain.contains(l); });
    if (now_outside) {
      ++out.excursions;
      if (!outside) out.events.push_back({EventType::boundary, t1, "eigenvalue left the model domain"});
    }
    outside = now_outside;
    if ((k + 1) % config.stride == 0 || k + 1 == steps) record(t1);
  }
  out.end_time = static_cast<double>(steps) * config.dt;
  return out;
}

}  // namespace

SymmetricMatrix step_matrix(const SymmetricMatrix& x, const SpectralCoefficients& coeff, const Matrix& dB,
                            double dt, bool symmetrize) {
  if (dB.rows() != x.dim() || dB.cols() != x.dim()) throw MatrixSdeError("step_matrix: dB shape mismatch");
  if (coeff.complex_mode) throw MatrixSdeError("step_matrix: complex-mode model needs step_matrix_complex");
  return close_symmetric(euler_update(eigendecompose(x), x.matrix(), coeff, dB, dt), symmetrize);
}

HermitianMatrix step_matrix_complex(const HermitianMatrix& x, const SpectralCoefficients& coeff,
                                    const Matrix& dB1, const Matrix& dB2, double dt) {
  const std::size_t p = x.dim();
  if (dB1.rows() != p || dB1.cols() != p || dB2.rows() != p || dB2.cols() != p)
    throw MatrixSdeError("step_matrix_complex: increment shape mismatch");
  const SymmetricMatrix e = x.embed();
  return HermitianMatrix::from_embedding(
      euler_update(eigendecompose(e), e.matrix(), coeff, complex_driver(dB1, dB2), dt));
}

RealMatrixTrajectory simulate_matrix(const SymmetricMatrix& x0, const SpectralCoefficients& coeff,
                                     const NoiseBundle& noise, const MatrixSchemeConfig& config) {
  if (coeff.complex_mode) throw MatrixSdeError("simulate_matrix: complex-mode model needs simulate_matrix_complex");
  return run<RealOps>(x0, coeff, noise, config);
}

ComplexMatrixTrajectory simulate_matrix_complex(const HermitianMatrix& x0, const SpectralCoefficients& coeff,
                                                const NoiseBundle& noise, const MatrixSchemeConfig& config) {
  return run<ComplexOps>(x0, coeff, noise, config);
}

void write_matrix_csv(std::ostream& out, const RealMatrixTrajectory& traj) {
  if (traj.states.empty()) return;
  const std::size_t p = traj.states.front().dim();
  out << "t";
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) out << ",x_" << index_label(i, j, p);
  out << '\n' << std::setprecision(17);
  for (std::size_t r = 0; r < traj.states.size(); ++r) {
    out << traj.times[r];
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i; j < p; ++j) out << ',' << traj.states[r](i, j);
    out << '\n';
  }
}

void write_matrix_csv(std::ostream& out, const ComplexMatrixTrajectory& traj) {
  if (traj.states.empty()) return;
  const std::size_t p = traj.states.front().dim();
  out << "t";
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j)
      out << ",x_" << index_label(i, j, p) << "_re,x_" << index_label(i, j, p) << "_im";
  out << '\n' << std::setprecision(17);
  for (std::size_t r = 0; r < traj.states.size(); ++r) {
    out << traj.times[r];
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i; j < p; ++j) out << ',' << traj.states[r](i, j).real() << ',' << traj.states[r](i, j).imag();
    out << '\n';
  }
}

}  // namespace ssde
