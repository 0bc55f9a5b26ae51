#include "ssde/app.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ssde/matrix_sde.hpp"
#include "ssde/noise.hpp"
#include "ssde/parallel.hpp"
#include "ssde/spectral_sde.hpp"
#include "ssde/verify.hpp"

namespace ssde {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const RunConfig& config, const char* env_value) {
  if (flag) return *flag;
  if (config.seed) return *config.seed;
  if (env_value && *env_value) {
    const std::string s(env_value);
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used, 10);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.front() == '-')
      throw std::invalid_argument("SPECTRAL_SDE_SEED is not an unsigned integer: '" + s + "'");
    return v;
  }
  return 0;
}

namespace {

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << content;
    f.close();
    if (!f) throw std::runtime_error("write failed for " + path.string());
    names_.push_back(name);
  }

  const std::vector<std::string>& names() const { return names_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

std::string padded(std::size_t i, std::size_t count) {
  const std::size_t width = std::to_string(count > 0 ? count - 1 : 0).size();
  std::ostringstream s;
  s << std::setw(static_cast<int>(width)) << std::setfill('0') << i;
  return s.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

struct PathOutput {
  std::vector<std::pair<std::string, std::string>> files;
  std::string events;
};

// Paths are computed in parallel batches; files are written in path order by
// this thread only.
template <typename Fn>
void for_paths(const RunConfig& c, ArtifactWriter& writer, std::string& events, Fn&& simulate) {
  const std::size_t batch = std::max<std::size_t>(1, c.workers) * 8;
  for (std::size_t start = 0; start < c.paths; start += batch) {
    const std::size_t n = std::min(batch, c.paths - start);
    std::vector<PathOutput> outs(n);
    parallel_for(n, c.workers, [&](std::size_t k) { outs[k] = simulate(start + k); });
    for (auto& o : outs) {
      for (auto& [name, content] : o.files) writer.write(name, content);
      events += o.events;
    }
  }
}

std::string noise_dump_bytes(const NoiseBundle& nb) {
  std::ostringstream s(std::ios::binary);
  write_noise_dump(s, nb);
  return s.str();
}

NoiseBundle bundle_for(const RunConfig& c, NoiseKind kind, std::uint64_t seed, std::size_t path) {
  NoiseBundle nb;
  nb.kind = kind;
  nb.dim = c.p;
  nb.steps = step_count(c.scheme.T, c.scheme.dt);
  nb.dt = c.scheme.dt;
  nb.seed = seed;
  nb.stream = derive_stream(seed, path);
  return nb;
}

void run_simulate_spectral(const RunConfig& c, std::uint64_t seed, ArtifactWriter& writer) {
  const SpectralCoefficients coeff = catalog(c.model);
  const std::vector<double> lambda0 = initial_spectrum(c);
  std::string events;
  for_paths(c, writer, events, [&](std::size_t i) {
    const NoiseBundle nb = bundle_for(c, NoiseKind::spectral, seed, i);
    const SpectralTrajectory t = simulate_spectral(lambda0, std::nullopt, coeff, nb, c.scheme);
    PathOutput o;
    std::ostringstream csv;
    write_spectral_csv(csv, t);
    o.files.emplace_back("spectral_" + padded(i, c.paths) + ".csv", csv.str());
    if (c.noise_dump) o.files.emplace_back("noise_" + padded(i, c.paths) + ".bin", noise_dump_bytes(nb));
    std::ostringstream ev;
    write_events_jsonl(ev, t.events, static_cast<std::int64_t>(i));
    o.events = ev.str();
    return o;
  });
  writer.write("events.jsonl", events);
}

template <typename Traj>
std::string eigenvalue_csv(const Traj& t) {
  std::ostringstream s;
  if (t.eigenvalues.empty()) return {};
  s << "t";
  for (std::size_t i = 0; i < t.eigenvalues.front().size(); ++i) s << ",lambda_" << i + 1;
  s << '\n' << std::setprecision(17);
  for (std::size_t r = 0; r < t.times.size(); ++r) {
    s << t.times[r];
    for (double l : t.eigenvalues[r]) s << ',' << l;
    s << '\n';
  }
  return s.str();
}

void run_simulate_matrix(const RunConfig& c, std::uint64_t seed, ArtifactWriter& writer) {
  const SpectralCoefficients coeff = catalog(c.model);
  const std::vector<double> lambda0 = initial_spectrum(c);
  MatrixSchemeConfig mc;
  mc.dt = c.scheme.dt;
  mc.T = c.scheme.T;
  mc.stride = c.scheme.stride;
  std::string events;
  for_paths(c, writer, events, [&](std::size_t i) {
    PathOutput o;
    std::ostringstream csv, ev;
    const std::string stem = "matrix_" + padded(i, c.paths);
    NoiseBundle nb;
    if (coeff.complex_mode) {
      nb = bundle_for(c, NoiseKind::complex_matrix, seed, i);
      const ComplexMatrixTrajectory t = simulate_matrix_complex(HermitianMatrix::diagonal(lambda0), coeff, nb, mc);
      write_matrix_csv(csv, t);
      o.files.emplace_back(stem + "_eigenvalues.csv", eigenvalue_csv(t));
      write_events_jsonl(ev, t.events, static_cast<std::int64_t>(i));
    } else {
      nb = bundle_for(c, NoiseKind::matrix, seed, i);
      const SymmetricMatrix x0 = c.x0 ? *c.x0 : SymmetricMatrix::diagonal(lambda0);
      const RealMatrixTrajectory t = simulate_matrix(x0, coeff, nb, mc);
      write_matrix_csv(csv, t);
      o.files.emplace_back(stem + "_eigenvalues.csv", eigenvalue_csv(t));
      write_events_jsonl(ev, t.events, static_cast<std::int64_t>(i));
    }
    o.files.emplace(o.files.begin(), stem + ".csv", csv.str());
    if (c.noise_dump) o.files.emplace_back("noise_" + padded(i, c.paths) + ".bin", noise_dump_bytes(nb));
    o.events = ev.str();
    return o;
  });
  writer.write("events.jsonl", events);
}

ExperimentReport run_verify(const RunConfig& c, std::uint64_t seed) {
  ExperimentSetup setup;
  setup.model = c.model;
  setup.p = c.p;
  setup.lambda0 = initial_spectrum(c);
  setup.x0 = c.x0;
  setup.paths = c.paths;
  setup.seed = seed;
  setup.workers = c.workers;
  switch (c.command) {
    case Command::verify_collision:
      return collision_experiment(setup, c.scheme, c.min_collision_fraction);
    case Command::verify_consistency: {
      MatrixSchemeConfig mc;
      mc.dt = c.scheme.dt;
      mc.T = c.scheme.T;
      return consistency_experiment(setup, mc, c.scheme);
    }
    case Command::verify_positivity:
      return positivity_experiment(setup, c.scheme);
    case Command::verify_convergence:
      return convergence_experiment(setup, c.scheme, c.levels, c.min_ratio);
    default:
      throw std::logic_error("not a verify command");
  }
}

}  // namespace

int run(const RunConfig& config, std::ostream& log, bool quiet) {
  const auto started = std::chrono::steady_clock::now();
  const std::string timestamp = utc_timestamp();
  if (!config.seed) {
    log << "error: no seed resolved\n";
    return kExitError;
  }
  const std::uint64_t seed = *config.seed;
  int code = kExitPass;
  std::string error;
  ArtifactWriter writer(config.out);
  std::optional<bool> passed;
  try {
    fs::create_directories(config.out);
    switch (config.command) {
      case Command::simulate_spectral:
        run_simulate_spectral(config, seed, writer);
        break;
      case Command::simulate_matrix:
        run_simulate_matrix(config, seed, writer);
        break;
      default: {
        const ExperimentReport rep = run_verify(config, seed);
        writer.write("report.json", to_json(rep).dump(2) + "\n");
        std::ostringstream txt;
        write_report_text(txt, rep);
        writer.write("report.txt", txt.str());
        if (!quiet) log << txt.str();
        passed = rep.passed();
        code = rep.passed() ? kExitPass : kExitFail;
      }
    }
  } catch (const std::exception& e) {
    error = e.what();
    code = kExitError;
    log << "error: " << error << '\n';
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  ordered_json m;
  m["version"] = kVersion;
  m["command"] = to_string(config.command);
  m["seed"] = seed;
  m["config"] = serialize_config(config);
  m["timestamp"] = timestamp;
  m["wall_time_seconds"] = wall;
  m["exit_code"] = code;
  if (passed) m["passed"] = *passed;
  if (!error.empty()) m["error"] = error;
  m["artifacts"] = writer.names();
  try {
    std::error_code ec;
    fs::create_directories(config.out, ec);
    std::ofstream f(fs::path(config.out) / "manifest.json");
    f << m.dump(2) << '\n';
    if (!f) throw std::runtime_error("cannot write manifest.json");
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitError;
  }
  if (!quiet && code != kExitError)
    log << to_string(config.command) << ": " << (code == kExitPass ? "ok" : "verdict failed") << " (" << config.out
        << ")\n";
  return code;
}

}  // namespace ssde
