#include "ssde/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "ssde/lyapunov.hpp"
#include "ssde/noise.hpp"
#include "ssde/parallel.hpp"
#include "ssde/stats.hpp"

namespace ssde {

using nlohmann::ordered_json;

bool ExperimentReport::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

ordered_json to_json(const ModelId& id) {
  ordered_json j;
  j["family"] = to_string(id.family);
  j["params"] = ordered_json::object();
  for (const auto& [k, v] : id.params) j["params"][k] = v;
  if (!id.expressions.empty()) {
    j["expressions"] = ordered_json::object();
    for (const auto& [k, v] : id.expressions) j["expressions"][k] = v;
  }
  return j;
}

ordered_json to_json(const SpectralSchemeConfig& c) {
  ordered_json j;
  j["dt"] = c.dt;
  j["T"] = c.T;
  j["eps_gap"] = c.eps_gap;
  j["adaptive"] = c.adaptive;
  j["max_halvings"] = c.max_halvings;
  j["truncation"] = to_string(c.truncation);
  j["stride"] = c.stride;
  j["track_eigenvectors"] = c.track_eigenvectors;
  return j;
}

ordered_json to_json(const MatrixSchemeConfig& c) {
  ordered_json j;
  j["dt"] = c.dt;
  j["T"] = c.T;
  j["symmetrize"] = c.symmetrize;
  j["stride"] = c.stride;
  j["overflow_bound"] = c.overflow_bound;
  return j;
}

ordered_json to_json(const ExperimentReport& r) {
  ordered_json j;
  j["experiment"] = r.experiment;
  j["model"] = to_json(r.model);
  j["model"]["p"] = r.p;
  j["config"] = r.config;
  j["paths"] = r.paths;
  ordered_json ev;
  ev["collisions"] = r.events.collisions;
  ev["explosions"] = r.events.explosions;
  ev["paths_with_excursions"] = r.events.paths_with_excursions;
  ev["boundary_excursions"] = r.events.boundary_excursions;
  ev["truncations"] = r.events.truncations;
  ev["rejected_steps"] = r.events.rejected_steps;
  ev["first_collision_times"] = r.events.first_collision_times;
  j["events"] = ev;
  j["moments"] = ordered_json::array();
  for (const auto& m : r.moments)
    j["moments"].push_back({{"name", m.name},
                            {"side", m.side},
                            {"n", m.n},
                            {"mean", m.mean},
                            {"se", m.se},
                            {"variance", m.variance},
                            {"variance_se", m.variance_se}});
  j["convergence"] = ordered_json::array();
  for (const auto& c : r.convergence) {
    ordered_json row{{"level", c.level}, {"dt", c.dt}};
    row["rms"] = c.rms ? ordered_json(*c.rms) : ordered_json(nullptr);
    row["ratio"] = c.ratio ? ordered_json(*c.ratio) : ordered_json(nullptr);
    j["convergence"].push_back(row);
  }
  j["summary"] = r.summary;
  j["verdicts"] = ordered_json::array();
  for (const auto& v : r.verdicts)
    j["verdicts"].push_back(
        {{"name", v.name}, {"pass", v.pass}, {"value", v.value}, {"rule", v.rule}, {"threshold", v.threshold}});
  j["passed"] = r.passed();
  return j;
}

void write_report_text(std::ostream& out, const ExperimentReport& r) {
  out << std::setprecision(6);
  out << "experiment: " << r.experiment << '\n';
  out << "model: " << to_string(r.model.family);
  for (const auto& [k, v] : r.model.params) out << ' ' << k << '=' << v;
  for (const auto& [k, v] : r.model.expressions) out << ' ' << k << "=\"" << v << '"';
  out << " p=" << r.p << '\n';
  out << "paths: " << r.paths << '\n';
  out << "collisions: " << r.events.collisions << "  explosions: " << r.events.explosions
      << "  truncations: " << r.events.truncations << "  excursions: " << r.events.boundary_excursions << '\n';
  for (const auto& m : r.moments)
    out << "  " << m.name << " [" << m.side << "] mean " << m.mean << " +- " << m.se << "  var " << m.variance
        << " +- " << m.variance_se << '\n';
  for (const auto& c : r.convergence) {
    out << "  level " << c.level << " dt " << c.dt;
    if (c.rms) out << " rms " << *c.rms;
    if (c.ratio) out << " ratio " << *c.ratio;
    out << '\n';
  }
  if (r.verdicts.empty()) out << "verdicts: none (informational)\n";
  for (const auto& v : r.verdicts)
    out << (v.pass ? "PASS " : "FAIL ") << v.name << ": " << v.value << ' ' << v.rule << ' ' << v.threshold << '\n';
}

std::optional<double> expected_trace(const SpectralCoefficients& coeff, std::size_t p, double trace0, double t) {
  const double a = coeff.b(0.0);
  const double c = coeff.b(1.0) - a;
  for (double x : {-2.5, 0.25, 0.75, 3.0, 17.0}) {
    const double lin = a + c * x;
    if (std::abs(coeff.b(x) - lin) > 1e-12 * (1.0 + std::abs(a) + std::abs(c * x))) return std::nullopt;
  }
  const double pa = static_cast<double>(p) * a;
  if (c == 0.0) return trace0 + coeff.beta * pa * t;
  return trace0 + (trace0 + pa / c) * std::expm1(coeff.beta * c * t);
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_paths(const ExperimentSetup& setup, std::size_t minimum) {
  if (setup.paths < minimum)
    throw VerifyError("experiment needs at least " + std::to_string(minimum) + " paths");
  if (setup.lambda0.size() != setup.p && !setup.x0)
    throw VerifyError("initial spectrum has " + std::to_string(setup.lambda0.size()) + " entries, expected p = " +
                      std::to_string(setup.p));
}

NoiseBundle spectral_bundle(const ExperimentSetup& setup, const SpectralSchemeConfig& c, std::uint64_t stream) {
  NoiseBundle nb;
  nb.kind = NoiseKind::spectral;
  nb.dim = setup.p;
  nb.steps = step_count(c.T, c.dt);
  nb.dt = c.dt;
  nb.seed = setup.seed;
  nb.stream = stream;
  return nb;
}

ExperimentReport base_report(const char* name, const ExperimentSetup& setup) {
  ExperimentReport r;
  r.experiment = name;
  r.model = setup.model;
  r.p = setup.p;
  r.paths = setup.paths;
  r.config["seed"] = setup.seed;
  r.config["lambda0"] = setup.lambda0;
  return r;
}

ordered_json quantiles(std::span<const double> xs) {
  ordered_json q;
  if (xs.empty()) return q;
  q["min"] = quantile(xs, 0.0);
  q["q01"] = quantile(xs, 0.01);
  q["q05"] = quantile(xs, 0.05);
  q["median"] = quantile(xs, 0.5);
  q["max"] = quantile(xs, 1.0);
  return q;
}

// |a1| <= K p(p-1)/2 with K the Lipschitz constant of beta*b on the visited
// range; returns the largest excess over the recorded states (<= 0 passes).
// Cancellation in b(l_i) - b(l_j) is allowed for at a few ulps of |b|.
double a1_excess(const SpectralCoefficients& coeff, const SpectralTrajectory& traj, double& k_out) {
  const double lo = traj.min_lambda, hi = traj.max_lambda;
  constexpr int kPoints = 1000;
  double k = 0.0;
  if (hi > lo) {
    double bmax = 0.0;
    for (int i = 0; i < kPoints; ++i) bmax = std::max(bmax, std::abs(coeff.b(lo + (hi - lo) * i / (kPoints - 1))));
    k = lipschitz_estimate(coeff.b, lo, hi, kPoints) + 4.0 * kEps * bmax * (kPoints - 1) / (hi - lo);
  }
  k *= coeff.beta;
  k_out = k;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& s : traj.samples) {
    const std::size_t p = s.lambda.size();
    if (p < 2) return 0.0;
    const double pairs = static_cast<double>(p * (p - 1)) / 2.0;
    double rounding = 0.0;
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i + 1; j < p; ++j)
        rounding += coeff.beta * 4.0 * kEps * (std::abs(coeff.b(s.lambda[i])) + std::abs(coeff.b(s.lambda[j]))) /
                    (s.lambda[j] - s.lambda[i]);
    const double a1 = lyapunov_drift_components(s.lambda, coeff).a1;
    worst = std::max(worst, std::abs(a1) - (k * pairs * (1.0 + 1e-6) + rounding));
  }
  return worst;
}

struct CollisionPath {
  bool collided = false;
  bool exploded = false;
  double collision_time = 0.0;
  double min_gap = 0.0;
  double max_u = 0.0;
  double a1_excess = 0.0;
  double a1_k = 0.0;
  std::uint64_t truncations = 0;
  std::uint64_t excursions = 0;
  std::uint64_t rejected = 0;
};

}  // namespace

ExperimentReport collision_experiment(const ExperimentSetup& setup, const SpectralSchemeConfig& config,
                                      double min_collision_fraction) {
  require_paths(setup, 1);
  config.validate();
  const SpectralCoefficients coeff = catalog(setup.model);
  check_dimension(coeff, setup.p);

  std::vector<CollisionPath> results(setup.paths);
  parallel_for(setup.paths, setup.workers, [&](std::size_t i) {
    const NoiseBundle nb = spectral_bundle(setup, config, derive_stream(setup.seed, i));
    const SpectralTrajectory traj = simulate_spectral(setup.lambda0, std::nullopt, coeff, nb, config);
    CollisionPath& r = results[i];
    r.collided = traj.status == RunStatus::collision;
    r.exploded = traj.status == RunStatus::explosion;
    r.collision_time = traj.end_time;
    r.min_gap = traj.min_gap_seen;
    r.max_u = traj.max_lyapunov;
    r.a1_excess = a1_excess(coeff, traj, r.a1_k);
    r.truncations = traj.truncations;
    r.excursions = traj.excursions;
    r.rejected = traj.rejected_steps;
  });

  ExperimentReport rep = base_report("collision", setup);
  rep.config["scheme"] = to_json(config);
  rep.config["min_collision_fraction"] = min_collision_fraction;

  std::vector<double> gaps, max_u;
  double worst_a1 = -std::numeric_limits<double>::infinity();
  double max_k = 0.0;
  bool u_finite = true;
  for (const auto& r : results) {
    if (r.collided) {
      ++rep.events.collisions;
      rep.events.first_collision_times.push_back(r.collision_time);
    } else if (!r.exploded) {
      max_u.push_back(r.max_u);
      u_finite = u_finite && std::isfinite(r.max_u);
    }
    if (r.exploded) ++rep.events.explosions;
    if (r.excursions > 0 || r.truncations > 0) ++rep.events.paths_with_excursions;
    rep.events.boundary_excursions += r.excursions;
    rep.events.truncations += r.truncations;
    rep.events.rejected_steps += r.rejected;
    gaps.push_back(r.min_gap);
    worst_a1 = std::max(worst_a1, r.a1_excess);
    max_k = std::max(max_k, r.a1_k);
  }

  const double fraction = static_cast<double>(rep.events.collisions) / static_cast<double>(setup.paths);
  const bool predicted = noncollision_predicted(coeff, setup.p);
  rep.summary["noncollision_predicted"] = predicted;
  rep.summary["collision_fraction"] = fraction;
  rep.summary["min_gap"] = quantiles(gaps);
  rep.summary["max_lyapunov"] = quantiles(max_u);
  std::vector<std::uint64_t> hist(10, 0);
  for (double t : rep.events.first_collision_times)
    ++hist[std::min<std::size_t>(9, static_cast<std::size_t>(10.0 * t / config.T))];
  rep.summary["first_collision_histogram"] = hist;
  rep.summary["a1_lipschitz_max"] = max_k;
  rep.summary["model_flags"] = coeff.flags;

  if (predicted)
    rep.verdicts.push_back({"zero collisions", rep.events.collisions == 0,
                            static_cast<double>(rep.events.collisions), 0.0, "=="});
  else
    rep.verdicts.push_back({"collision fraction", fraction > min_collision_fraction, fraction,
                            min_collision_fraction, ">"});
  rep.verdicts.push_back({"lyapunov finite on non-collided paths", u_finite, max_u.empty() ? 0.0 : quantile(max_u, 1.0),
                          std::numeric_limits<double>::max(), "<"});
  if (coeff.regularity.b_lipschitz && setup.p > 1)
    rep.verdicts.push_back({"a1 Lipschitz bound excess", worst_a1 <= 0.0, worst_a1, 0.0, "<="});
  return rep;
}

namespace {

struct ConsistencyPath {
  bool matrix_ok = false;
  bool spectral_ok = false;
  RunStatus matrix_status = RunStatus::completed;
  RunStatus spectral_status = RunStatus::completed;
  std::vector<double> matrix_lambda;
  std::vector<double> spectral_lambda;
  double first_collision = 0.0;
};

void add_moment_rows(ExperimentReport& rep, const std::string& name, const std::vector<double>& m,
                     const std::vector<double>& s, bool& enough) {
  if (m.size() < 2 || s.size() < 2) {
    enough = false;
    return;
  }
  const SampleSummary a = summarize(m), b = summarize(s);
  rep.moments.push_back({name, "matrix", a.n, a.mean, a.se, a.variance, a.variance_se});
  rep.moments.push_back({name, "spectral", b.n, b.mean, b.se, b.variance, b.variance_se});
  const double mean_tol = 3.0 * std::hypot(a.se, b.se);
  const double var_tol = 3.0 * std::hypot(a.variance_se, b.variance_se);
  const double dm = std::abs(a.mean - b.mean), dv = std::abs(a.variance - b.variance);
  rep.verdicts.push_back({"mean " + name, dm <= mean_tol, dm, mean_tol, "<="});
  rep.verdicts.push_back({"variance " + name, dv <= var_tol, dv, var_tol, "<="});
}

}  // namespace

ExperimentReport consistency_experiment(const ExperimentSetup& setup, const MatrixSchemeConfig& matrix_config,
                                        const SpectralSchemeConfig& spectral_config) {
  require_paths(setup, 2);
  matrix_config.validate();
  spectral_config.validate();
  const SpectralCoefficients coeff = catalog(setup.model);
  if (coeff.complex_mode) throw VerifyError("consistency experiment needs a real-mode model");
  if (coeff.beta != 1.0) throw VerifyError("consistency experiment needs beta = 1 (no matrix model otherwise)");
  check_dimension(coeff, setup.p);

  SymmetricMatrix x0 = setup.x0 ? *setup.x0 : SymmetricMatrix::diagonal(setup.lambda0);
  if (x0.dim() != setup.p) throw VerifyError("x0 dimension does not match p");
  const std::vector<double> lambda0 = setup.x0 ? eigendecompose(x0).values : setup.lambda0;

  MatrixSchemeConfig mc = matrix_config;
  mc.stride = step_count(mc.T, mc.dt);
  SpectralSchemeConfig sc = spectral_config;
  sc.stride = step_count(sc.T, sc.dt);

  std::vector<ConsistencyPath> results(setup.paths);
  parallel_for(setup.paths, setup.workers, [&](std::size_t i) {
    ConsistencyPath& r = results[i];
    NoiseBundle mb;
    mb.kind = NoiseKind::matrix;
    mb.dim = setup.p;
    mb.steps = mc.stride;
    mb.dt = mc.dt;
    mb.seed = setup.seed;
    mb.stream = derive_stream(setup.seed, 2 * i);
    const RealMatrixTrajectory mt = simulate_matrix(x0, coeff, mb, mc);
    r.matrix_status = mt.status;
    r.matrix_ok = mt.status == RunStatus::completed;
    if (r.matrix_ok) r.matrix_lambda = mt.eigenvalues.back();

    const NoiseBundle sb = spectral_bundle(setup, sc, derive_stream(setup.seed, 2 * i + 1));
    const SpectralTrajectory st = simulate_spectral(lambda0, std::nullopt, coeff, sb, sc);
    r.spectral_status = st.status;
    r.spectral_ok = st.status == RunStatus::completed;
    if (st.status == RunStatus::collision) r.first_collision = st.end_time;
    if (r.spectral_ok) r.spectral_lambda = st.final_lambda;
  });

  ExperimentReport rep = base_report("consistency", setup);
  rep.config["lambda0"] = lambda0;
  rep.config["matrix_scheme"] = to_json(matrix_config);
  rep.config["spectral_scheme"] = to_json(spectral_config);

  std::uint64_t matrix_failed = 0, spectral_failed = 0;
  std::vector<std::vector<double>> m(setup.p), s(setup.p);
  std::vector<double> mtr, str;
  for (const auto& r : results) {
    matrix_failed += !r.matrix_ok;
    spectral_failed += !r.spectral_ok;
    for (RunStatus st : {r.matrix_status, r.spectral_status}) {
      if (st == RunStatus::collision) ++rep.events.collisions;
      if (st == RunStatus::explosion) ++rep.events.explosions;
    }
    if (r.spectral_status == RunStatus::collision) rep.events.first_collision_times.push_back(r.first_collision);
    if (r.matrix_ok) {
      for (std::size_t k = 0; k < setup.p; ++k) m[k].push_back(r.matrix_lambda[k]);
      mtr.push_back(compensated_sum(r.matrix_lambda));
    }
    if (r.spectral_ok) {
      for (std::size_t k = 0; k < setup.p; ++k) s[k].push_back(r.spectral_lambda[k]);
      str.push_back(compensated_sum(r.spectral_lambda));
    }
  }
  // Stopped paths (collision or explosion) are left out of the moments and
  // counted here.
  rep.summary["stopped_paths"] = {{"matrix", matrix_failed}, {"spectral", spectral_failed}};

  bool enough = true;
  for (std::size_t k = 0; k < setup.p; ++k) add_moment_rows(rep, "lambda_" + std::to_string(k + 1), m[k], s[k], enough);

  const std::optional<double> expected = expected_trace(coeff, setup.p, compensated_sum(lambda0), sc.T);
  if (expected && mtr.size() >= 2 && str.size() >= 2) {
    rep.summary["expected_trace"] = *expected;
    for (const auto& [side, xs] : {std::pair{"matrix", &mtr}, std::pair{"spectral", &str}}) {
      const SampleSummary t = summarize(*xs);
      rep.moments.push_back({"trace", side, t.n, t.mean, t.se, t.variance, t.variance_se});
      const double d = std::abs(t.mean - *expected);
      rep.verdicts.push_back({std::string("trace drift ") + side, d <= 3.0 * t.se, d, 3.0 * t.se, "<="});
    }
  }
  if (!enough) rep.verdicts.push_back({"at least 2 completed paths per side", false, 0.0, 2.0, ">="});
  return rep;
}

ExperimentReport positivity_experiment(const ExperimentSetup& setup, const SpectralSchemeConfig& config) {
  require_paths(setup, 1);
  config.validate();
  switch (setup.model.family) {
    case ModelFamily::besq_particles:
    case ModelFamily::wishart:
    case ModelFamily::generalized_wishart:
    case ModelFamily::jacobi:
    case ModelFamily::beta_wishart:
    case ModelFamily::beta_jacobi:
      break;
    default:
      throw VerifyError("positivity experiment not defined for model " + to_string(setup.model.family));
  }
  const SpectralCoefficients coeff = catalog(setup.model);
  check_dimension(coeff, setup.p);

  struct Row {
    double lo = 0.0, hi = 0.0;
    std::uint64_t truncations = 0, excursions = 0, rejected = 0;
    RunStatus status = RunStatus::completed;
  };
  std::vector<Row> rows(setup.paths);
  SpectralSchemeConfig sc = config;
  sc.stride = step_count(sc.T, sc.dt);
  parallel_for(setup.paths, setup.workers, [&](std::size_t i) {
    const NoiseBundle nb = spectral_bundle(setup, sc, derive_stream(setup.seed, i));
    const SpectralTrajectory t = simulate_spectral(setup.lambda0, std::nullopt, coeff, nb, sc);
    rows[i] = {t.min_lambda, t.max_lambda, t.truncations, t.excursions, t.rejected_steps, t.status};
  });

  ExperimentReport rep = base_report("positivity", setup);
  rep.config["scheme"] = to_json(config);
  std::vector<double> lows, highs;
  for (const auto& r : rows) {
    lows.push_back(r.lo);
    highs.push_back(r.hi);
    if (r.status == RunStatus::collision) ++rep.events.collisions;
    if (r.status == RunStatus::explosion) ++rep.events.explosions;
    if (r.excursions > 0 || r.truncations > 0) ++rep.events.paths_with_excursions;
    rep.events.boundary_excursions += r.excursions;
    rep.events.truncations += r.truncations;
    rep.events.rejected_steps += r.rejected;
  }
  const bool covered = boundary_protected(coeff, setup.p);
  const Domain dom = protected_domain(coeff);
  rep.summary["boundary_protected"] = covered;
  rep.summary["min_lambda"] = quantiles(lows);
  rep.summary["max_lambda"] = quantiles(highs);
  rep.summary["model_flags"] = coeff.flags;
  if (covered) {
    const double lo = *std::min_element(lows.begin(), lows.end());
    const double hi = *std::max_element(highs.begin(), highs.end());
    if (dom.bounded_below()) rep.verdicts.push_back({"min eigenvalue in domain", lo >= dom.lower, lo, dom.lower, ">="});
    if (dom.bounded_above()) rep.verdicts.push_back({"max eigenvalue in domain", hi <= dom.upper, hi, dom.upper, "<="});
  }
  return rep;
}

ExperimentReport convergence_experiment(const ExperimentSetup& setup, const SpectralSchemeConfig& base,
                                        unsigned levels, double min_ratio) {
  require_paths(setup, 2);
  if (levels < 2) throw VerifyError("convergence experiment needs at least 2 levels");
  if (levels - 1 > kMaxNodeDepth / 2) throw VerifyError("too many refinement levels");
  base.validate();
  const SpectralCoefficients coeff = catalog(setup.model);
  check_dimension(coeff, setup.p);

  struct Row {
    bool ok = true;
    std::vector<std::vector<double>> finals;
    double rerun_sq = 0.0;
  };
  std::vector<Row> rows(setup.paths);
  parallel_for(setup.paths, setup.workers, [&](std::size_t i) {
    const NoiseBundle nb = spectral_bundle(setup, base, derive_stream(setup.seed, i));
    Row& row = rows[i];
    for (unsigned l = 0; l < levels; ++l) {
      const SharedPath path(nb, l, std::max(levels - 1, SharedPath::kDefaultMaxLevel));
      SpectralSchemeConfig c = base;
      c.dt = path.dt();
      c.stride = path.steps();
      const SpectralTrajectory t = simulate_spectral(setup.lambda0, std::nullopt, coeff, path, c);
      row.ok = row.ok && t.status == RunStatus::completed;
      row.finals.push_back(t.final_lambda);
      if (l == 0) {
        const SpectralTrajectory again = simulate_spectral(setup.lambda0, std::nullopt, coeff, path, c);
        for (std::size_t k = 0; k < setup.p; ++k) {
          const double d = again.final_lambda[k] - t.final_lambda[k];
          row.rerun_sq += d * d;
        }
      }
    }
  });

  ExperimentReport rep = base_report("convergence", setup);
  rep.config["scheme"] = to_json(base);
  rep.config["levels"] = levels;
  rep.config["min_ratio"] = min_ratio;

  std::uint64_t excluded = 0;
  std::vector<CompensatedSum> sq(levels);
  CompensatedSum rerun;
  for (const auto& row : rows) {
    rerun.add(row.rerun_sq);
    if (!row.ok) {
      ++excluded;
      continue;
    }
    for (unsigned l = 1; l < levels; ++l) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < setup.p; ++k) {
        const double d = row.finals[l][k] - row.finals[l - 1][k];
        d2 += d * d;
      }
      sq[l].add(d2);
    }
  }
  const std::size_t used = setup.paths - excluded;
  rep.events.collisions = excluded;
  rep.summary["excluded_paths"] = excluded;
  rep.verdicts.push_back({"usable paths", used >= 2, static_cast<double>(used), 2.0, ">="});

  double min_seen = std::numeric_limits<double>::infinity();
  std::optional<double> prev;
  std::vector<double> orders;
  for (unsigned l = 0; l < levels; ++l) {
    ConvergenceRow row;
    row.level = l;
    row.dt = std::ldexp(base.dt, -static_cast<int>(l));
    if (l > 0 && used > 0) {
      row.rms = std::sqrt(sq[l].value() / static_cast<double>(used));
      if (prev) {
        row.ratio = *prev / *row.rms;
        min_seen = std::min(min_seen, *row.ratio);
        orders.push_back(std::log2(*row.ratio));
      }
      prev = row.rms;
    }
    rep.convergence.push_back(row);
  }
  rep.summary["empirical_order"] = orders;
  if (std::isfinite(min_seen)) {
    rep.verdicts.push_back({"strictly decreasing rms", min_seen > 1.0, min_seen, 1.0, ">"});
    rep.verdicts.push_back({"rms ratio per halving", min_seen >= min_ratio, min_seen, min_ratio, ">="});
  }
  const double rerun_rms = std::sqrt(rerun.value() / static_cast<double>(setup.paths));
  rep.verdicts.push_back({"identical-input difference", rerun_rms == 0.0, rerun_rms, 0.0, "=="});
  return rep;
}

}  // namespace ssde
