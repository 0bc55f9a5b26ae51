#include "ssde/spectral_sde.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "ssde/lyapunov.hpp"

namespace ssde {

std::string to_string(TruncationMode m) {
  return m == TruncationMode::full_truncation ? "full-truncation" : "reflect-reject";
}

TruncationMode parse_truncation(const std::string& s) {
  if (s == "full-truncation") return TruncationMode::full_truncation;
  if (s == "reflect-reject") return TruncationMode::reflect_reject;
  throw SpectralError("unknown truncation mode '" + s + "'");
}

void SpectralSchemeConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw SpectralError("scheme: dt must be > 0");
  if (!(T > 0.0) || !std::isfinite(T)) throw SpectralError("scheme: T must be > 0");
  if (!(eps_gap > 0.0)) throw SpectralError("scheme: eps_gap must be > 0");
  if (stride == 0) throw SpectralError("scheme: stride must be >= 1");
  if (max_halvings > 50) throw SpectralError("scheme: max_halvings must be <= 50");
  if (truncation == TruncationMode::reflect_reject && !adaptive)
    throw SpectralError("scheme: reflect-reject truncation needs adaptive stepping");
}

std::vector<double> step_eigenvalues(std::span<const double> lambda, const SpectralCoefficients& coeff,
                                     std::span<const double> dnu, double dt) {
  if (dnu.size() != lambda.size()) throw SpectralError("step_eigenvalues: increment size mismatch");
  const std::vector<double> drift = eigen_drift(coeff, lambda);
  std::vector<double> out(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const double sigma = 2.0 * coeff.g(lambda[i]) * coeff.h(lambda[i]);
    out[i] = lambda[i] + sigma * dnu[i] + drift[i] * dt;
  }
  return out;
}

std::size_t truncate_to_domain(std::vector<double>& lambda, const Domain& domain) {
  std::size_t moved = 0;
  for (double& l : lambda) {
    const double c = std::clamp(l, domain.lower, domain.upper);
    if (c != l) {
      l = c;
      ++moved;
    }
  }
  return moved;
}

double min_gap(std::span<const double> lambda) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < lambda.size(); ++i) gap = std::min(gap, lambda[i] - lambda[i - 1]);
  return gap;
}

EigenvectorLogIncrement build_dA(std::span<const double> lambda, const SpectralCoefficients& coeff,
                                 const SpectralIncrementView& dbeta, double eps_gap) {
  const std::size_t p = lambda.size();
  if (min_gap(lambda) <= eps_gap) throw SpectralError("build_dA: eigenvalue gap below eps_gap");
  EigenvectorLogIncrement inc{Matrix(p, p)};
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      const double a = std::sqrt(kernel_G(coeff, lambda[i], lambda[j])) / (lambda[j] - lambda[i]) *
                       dbeta.beta(i, j);
      inc.dA(i, j) = a;
      inc.dA(j, i) = -a;
    }
  return inc;
}

Matrix step_eigenvectors(const Matrix& h, std::span<const double> lambda, const SpectralCoefficients& coeff,
                         const SpectralIncrementView& dbeta, double dt, double eps_gap) {
  const std::size_t p = lambda.size();
  Matrix m = Matrix::identity(p) + build_dA(lambda, coeff, dbeta, eps_gap).dA;
  for (std::size_t i = 0; i < p; ++i) {
    double dada = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      if (k == i) continue;
      const double gap = lambda[k] - lambda[i];
      dada -= kernel_G(coeff, lambda[i], lambda[k]) / (gap * gap) * dt;
    }
    m(i, i) += 0.5 * dada;
  }
  return reorthonormalize(h * m);
}

namespace {

constexpr double kExplosionBound = 1e12;

std::string format_double(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

class Integrator {
 public:
  Integrator(std::span<const double> lambda0, const std::optional<Matrix>& h0,
             const SpectralCoefficients& coeff, const SharedPath& path, const SpectralSchemeConfig& config)
      : coeff_(coeff),
        path_(path),
        config_(config),
        p_(lambda0.size()),
        lambda_(lambda0.begin(), lambda0.end()),
        h_(h0),
        protect_(boundary_protected(coeff, p_)),
        protected_domain_(protected_domain(coeff)) {
    if (config_.track_eigenvectors && !h_) h_ = Matrix::identity(p_);
    if (!config_.track_eigenvectors) h_.reset();
    outside_ = !in_domain(lambda_);
  }

  SpectralTrajectory run() {
    const std::uint64_t steps = path_.steps();
    const double dt = path_.dt();
    out_.min_gap_seen = min_gap(lambda_);
    out_.max_lyapunov = p_ > 1 ? lyapunov_U(lambda_) : 0.0;
    out_.min_lambda = *std::min_element(lambda_.begin(), lambda_.end());
    out_.max_lambda = *std::max_element(lambda_.begin(), lambda_.end());
    record(0.0);

    for (std::uint64_t m = 0; m < steps && !stopped_; ++m) {
      const std::uint64_t k = path_.base_step(m);
      const Increments inc = path_.increments(m);
      advance(k, path_.level(), path_.node_index(m), inc, dt, 0);
      if (stopped_) break;
      const bool last = m + 1 == steps;
      if ((m + 1) % config_.stride == 0 || last) record(static_cast<double>(m + 1) * dt);
    }
    if (!stopped_) out_.end_time = static_cast<double>(steps) * dt;
    out_.final_lambda = lambda_;
    out_.final_eigenvectors = h_;
    return std::move(out_);
  }

 private:
  bool in_domain(const std::vector<double>& l) const {
    return std::all_of(l.begin(), l.end(), [&](double x) { return coeff_.domain.contains(x); });
  }

  double node_start(std::uint64_t k, unsigned depth, std::uint64_t index) const {
    const double frac = std::ldexp(static_cast<double>(index), -static_cast<int>(depth));
    return (static_cast<double>(k) + frac) * path_.base().dt;
  }

  void record(double t) {
    SpectralSample s;
    s.t = t;
    s.lambda = lambda_;
    s.min_gap = min_gap(lambda_);
    s.lyapunov = p_ > 1 ? lyapunov_U(lambda_) : 0.0;
    s.eigenvectors = h_;
    out_.samples.push_back(std::move(s));
  }

  void stop(RunStatus status, EventType type, double t, std::string detail) {
    stopped_ = true;
    out_.status = status;
    out_.end_time = t;
    out_.events.push_back({type, t, std::move(detail)});
  }

  enum class Verdict { accept, reject, explode };

  Verdict judge(const std::vector<double>& proposal) const {
    for (double l : proposal)
      if (!std::isfinite(l) || std::abs(l) > kExplosionBound) return Verdict::explode;
    if (protect_ && config_.truncation == TruncationMode::reflect_reject)
      for (double l : proposal)
        if (!protected_domain_.contains(l)) return Verdict::reject;
    for (std::size_t i = 1; i < p_; ++i) {
      const double before = lambda_[i] - lambda_[i - 1];
      const double after = proposal[i] - proposal[i - 1];
      if (!(after > 0.0)) return Verdict::reject;
      if (config_.adaptive && (after < 0.5 * before || after > 1.5 * before)) return Verdict::reject;
    }
    return Verdict::accept;
  }

  void advance(std::uint64_t k, unsigned depth, std::uint64_t index, const Increments& inc, double h,
               unsigned halvings) {
    const double t0 = node_start(k, depth, index);
    const std::span<const double> nus(inc.data(), p_);
    std::vector<double> proposal = step_eigenvalues(lambda_, coeff_, nus, h);
    std::size_t truncated = 0;
    if (protect_ && config_.truncation == TruncationMode::full_truncation)
      truncated = truncate_to_domain(proposal, protected_domain_);

    const Verdict v = judge(proposal);
    if (v == Verdict::explode) {
      stop(RunStatus::explosion, EventType::explosion, t0 + h, "eigenvalue non-finite or beyond 1e12");
      return;
    }
    if (v == Verdict::reject) {
      if (!config_.adaptive) {
        stop(RunStatus::collision, EventType::collision, t0 + h, "ordering inverted");
        return;
      }
      if (halvings >= config_.max_halvings || depth + 1 >= kMaxNodeDepth) {
        stop(RunStatus::collision, EventType::collision, t0,
             "adaptive failure at min gap " + format_double(min_gap(lambda_)));
        return;
      }
      ++out_.rejected_steps;
      auto [left, right] = split_increments(path_.base(), k, depth, index, inc, h);
      advance(k, depth + 1, 2 * index, left, 0.5 * h, halvings + 1);
      if (stopped_) return;
      advance(k, depth + 1, 2 * index + 1, right, 0.5 * h, halvings + 1);
      return;
    }

    if (h_) {
      const SpectralIncrementView dbeta(p_, inc);
      h_ = step_eigenvectors(*h_, lambda_, coeff_, dbeta, h, config_.eps_gap);
      out_.max_orthonormality_defect = std::max(out_.max_orthonormality_defect, orthonormality_defect(*h_));
    }
    lambda_ = std::move(proposal);
    ++out_.accepted_steps;
    const double t1 = t0 + h;

    if (truncated > 0) {
      ++out_.truncations;
      if (out_.truncations <= kMaxBoundaryEvents)
        out_.events.push_back({EventType::boundary, t1, "truncated " + std::to_string(truncated) + " eigenvalue(s)"});
    }
    const bool outside = !in_domain(lambda_);
    if (outside) {
      ++out_.excursions;
      if (!outside_ && out_.excursions <= kMaxBoundaryEvents)
        out_.events.push_back({EventType::boundary, t1, "eigenvalue left the model domain"});
    }
    outside_ = outside;

    out_.min_lambda = std::min(out_.min_lambda, lambda_.front());
    out_.max_lambda = std::max(out_.max_lambda, lambda_.back());
    const double gap = min_gap(lambda_);
    out_.min_gap_seen = std::min(out_.min_gap_seen, gap);
    if (p_ > 1) {
      if (gap < config_.eps_gap) {
        stop(RunStatus::collision, EventType::collision, t1, "gap " + format_double(gap) + " below eps_gap");
        return;
      }
      out_.max_lyapunov = std::max(out_.max_lyapunov, lyapunov_U(lambda_));
    }
  }

  static constexpr std::uint64_t kMaxBoundaryEvents = 100;

  const SpectralCoefficients& coeff_;
  const SharedPath& path_;
  const SpectralSchemeConfig& config_;
  std::size_t p_;
  std::vector<double> lambda_;
  std::optional<Matrix> h_;
  bool protect_;
  Domain protected_domain_;
  bool outside_ = false;
  bool stopped_ = false;
  SpectralTrajectory out_;
};

}  // namespace

SpectralTrajectory simulate_spectral(std::span<const double> lambda0, const std::optional<Matrix>& h0,
                                     const SpectralCoefficients& coeff, const SharedPath& path,
                                     const SpectralSchemeConfig& config) {
  config.validate();
  const std::size_t p = lambda0.size();
  if (p == 0) throw SpectralError("simulate_spectral: empty initial state");
  check_dimension(coeff, p);
  if (path.base().kind != NoiseKind::spectral || path.base().dim != p)
    throw SpectralError("simulate_spectral: noise must be spectral kind with matching dimension");
  require_strictly_ascending(lambda0, "simulate_spectral");
  if (min_gap(lambda0) <= config.eps_gap) throw SpectralError("simulate_spectral: initial gap below eps_gap");
  for (double l : lambda0)
    if (!coeff.domain.contains(l)) throw SpectralError("simulate_spectral: initial eigenvalue outside model domain");
  const double horizon = static_cast<double>(path.steps()) * path.dt();
  if (std::abs(horizon - config.T) > 1e-9 * config.T)
    throw SpectralError("simulate_spectral: noise horizon does not match T");
  if (config.track_eigenvectors) {
    if (coeff.complex_mode || coeff.beta != 1.0)
      throw SpectralError("simulate_spectral: eigenvector dynamics only for the real beta = 1 system");
    if (h0) {
      if (h0->rows() != p || h0->cols() != p) throw SpectralError("simulate_spectral: H0 has wrong shape");
      if (orthonormality_defect(*h0) > 1e-10) throw SpectralError("simulate_spectral: H0 not orthonormal");
    }
  }
  return Integrator(lambda0, h0, coeff, path, config).run();
}

SpectralTrajectory simulate_spectral(std::span<const double> lambda0, const std::optional<Matrix>& h0,
                                     const SpectralCoefficients& coeff, const NoiseBundle& noise,
                                     const SpectralSchemeConfig& config) {
  return simulate_spectral(lambda0, h0, coeff, SharedPath(noise), config);
}

void write_spectral_csv(std::ostream& out, const SpectralTrajectory& traj) {
  if (traj.samples.empty()) return;
  const std::size_t p = traj.samples.front().lambda.size();
  const bool with_h = traj.samples.front().eigenvectors.has_value();
  out << "t";
  for (std::size_t i = 0; i < p; ++i) out << ",lambda_" << i + 1;
  out << ",mingap,lyapunovU";
  if (with_h)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) out << ",h_" << index_label(i, j, p);
  out << '\n';
  out << std::setprecision(17);
  for (const auto& s : traj.samples) {
    out << s.t;
    for (double l : s.lambda) out << ',' << l;
    out << ',' << s.min_gap << ',' << s.lyapunov;
    if (with_h)
      for (double v : s.eigenvectors->data()) out << ',' << v;
    out << '\n';
  }
}

}  // namespace ssde
