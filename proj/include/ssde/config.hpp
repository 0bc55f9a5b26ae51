#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssde/linalg.hpp"
#include "ssde/models.hpp"
#include "ssde/spectral_sde.hpp"

namespace ssde {

enum class Command {
  simulate_matrix,
  simulate_spectral,
  verify_collision,
  verify_consistency,
  verify_positivity,
  verify_convergence,
};

std::string to_string(Command c);

struct RunConfig {
  Command command = Command::simulate_spectral;
  ModelId model;
  std::size_t p = 0;
  SpectralSchemeConfig scheme;
  unsigned levels = 4;
  /// Empty means the default start (see default_lambda0).
  std::vector<double> lambda0;
  std::optional<SymmetricMatrix> x0;
  std::size_t paths = 1;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string out = "out";
  bool noise_dump = false;
  double min_collision_fraction = 0.2;
  double min_ratio = 1.2;

  bool operator==(const RunConfig& other) const;
};

struct ConfigIssue {
  /// 0 for semantic errors that are not tied to one line.
  std::size_t line = 0;
  /// Dotted key path, e.g. "model.beta"; empty for syntax errors.
  std::string key;
  std::string message;

  std::string describe() const;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Parses and validates; throws ConfigError listing every problem found.
RunConfig parse_config(const std::string& text);

/// Collects semantic problems of an already-built config.
std::vector<ConfigIssue> validate_config(const RunConfig& config);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Evenly spaced start inside the model domain: i / (p + 1) on a bounded
/// domain, i = 1..p otherwise.
std::vector<double> default_lambda0(const SpectralCoefficients& coeff, std::size_t p);

/// The initial spectrum actually used: lambda0, else eigenvalues of x0, else
/// default_lambda0.
std::vector<double> initial_spectrum(const RunConfig& config);

}  // namespace ssde
