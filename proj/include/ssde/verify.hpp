#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssde/linalg.hpp"
#include "ssde/matrix_sde.hpp"
#include "ssde/models.hpp"
#include "ssde/spectral_sde.hpp"

namespace ssde {

class VerifyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Verdict {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  /// How value is compared with threshold, e.g. "<=", ">", "==".
  std::string rule;
};

struct EventTally {
  std::uint64_t collisions = 0;
  std::uint64_t explosions = 0;
  /// Paths that ever left the model domain (matrix level) or were clamped.
  std::uint64_t paths_with_excursions = 0;
  std::uint64_t boundary_excursions = 0;
  std::uint64_t truncations = 0;
  std::uint64_t rejected_steps = 0;
  std::vector<double> first_collision_times;
};

struct MomentRow {
  std::string name;
  std::string side;
  std::size_t n = 0;
  double mean = 0.0;
  double se = 0.0;
  double variance = 0.0;
  double variance_se = 0.0;
};

struct ConvergenceRow {
  unsigned level = 0;
  double dt = 0.0;
  /// RMS of |Lambda_level(T) - Lambda_{level-1}(T)|; absent for the coarsest level.
  std::optional<double> rms;
  std::optional<double> ratio;
};

struct ExperimentReport {
  std::string experiment;
  ModelId model;
  std::size_t p = 0;
  nlohmann::ordered_json config;
  std::size_t paths = 0;
  EventTally events;
  std::vector<MomentRow> moments;
  std::vector<ConvergenceRow> convergence;
  /// Quantiles and other diagnostics without a pass threshold.
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::vector<Verdict> verdicts;

  bool passed() const;
};

nlohmann::ordered_json to_json(const ModelId& id);
nlohmann::ordered_json to_json(const SpectralSchemeConfig& c);
nlohmann::ordered_json to_json(const MatrixSchemeConfig& c);
nlohmann::ordered_json to_json(const ExperimentReport& r);
void write_report_text(std::ostream& out, const ExperimentReport& r);

/// Shared inputs of every experiment. Path i uses stream derive_stream(seed, i)
/// (consistency uses 2i and 2i+1 for its two sides).
struct ExperimentSetup {
  ModelId model;
  std::size_t p = 2;
  std::vector<double> lambda0;
  /// Matrix-level start for consistency runs; diag(lambda0) when absent.
  std::optional<SymmetricMatrix> x0;
  std::size_t paths = 1;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// Expected E[tr X(t)] when b is affine, b(x) = a + c x:
/// m' = beta (p a + c m). Empty when b is not affine.
std::optional<double> expected_trace(const SpectralCoefficients& coeff, std::size_t p, double trace0, double t);

/// Collision statistics. When the model's hypotheses predict no collisions
/// the verdict is zero collisions; otherwise the collision fraction must
/// exceed `min_collision_fraction`. Also checks the a1 Lipschitz bound on
/// recorded states and that U stays finite on non-collided paths.
ExperimentReport collision_experiment(const ExperimentSetup& setup, const SpectralSchemeConfig& config,
                                      double min_collision_fraction = 0.2);

/// Per-eigenvalue mean and variance at T from the matrix and spectral
/// integrators, driven by independent noise. Real mode only. Paths stopped by
/// a collision or explosion are excluded from the moments and counted in the
/// summary ("stopped_paths") and the event tally.
ExperimentReport consistency_experiment(const ExperimentSetup& setup, const MatrixSchemeConfig& matrix_config,
                                        const SpectralSchemeConfig& spectral_config);

/// Extremes of the spectrum per path. Pass/fail only when the boundary
/// result covers (model, p); otherwise informational.
ExperimentReport positivity_experiment(const ExperimentSetup& setup, const SpectralSchemeConfig& config);

/// RMS terminal differences between consecutive refinement levels
/// 0..levels-1 on shared noise, plus a determinism check at level 0.
ExperimentReport convergence_experiment(const ExperimentSetup& setup, const SpectralSchemeConfig& base,
                                        unsigned levels, double min_ratio = 1.2);

}  // namespace ssde
