#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "ssde/config.hpp"

namespace ssde {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitError = 2;

/// Seed precedence: explicit flag, then run.seed, then the environment
/// value (SPECTRAL_SDE_SEED), then 0. A malformed environment value throws.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const RunConfig& config, const char* env_value);

/// Runs the configured command, writing artifacts into config.out:
///   simulate-spectral  spectral_<i>.csv, events.jsonl
///   simulate-matrix    matrix_<i>.csv, matrix_<i>_eigenvalues.csv, events.jsonl
///   verify-*           report.json, report.txt
/// plus manifest.json and, with run.noise_dump, noise_<i>.bin for simulate
/// commands. config.seed must be set. Returns kExitPass, kExitFail (a
/// verdict failed) or kExitError.
int run(const RunConfig& config, std::ostream& log, bool quiet = false);

}  // namespace ssde
