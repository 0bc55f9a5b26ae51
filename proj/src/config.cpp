#include "ssde/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "ssde/expression.hpp"
#include "ssde/trajectory.hpp"

namespace ssde {

namespace {

const std::vector<std::pair<Command, const char*>>& command_names() {
  static const std::vector<std::pair<Command, const char*>> names = {
      {Command::simulate_matrix, "simulate-matrix"},       {Command::simulate_spectral, "simulate-spectral"},
      {Command::verify_collision, "verify-collision"},     {Command::verify_consistency, "verify-consistency"},
      {Command::verify_positivity, "verify-positivity"},   {Command::verify_convergence, "verify-convergence"},
  };
  return names;
}

const std::set<std::string> kNumericModelKeys = {"alpha", "nu", "N", "q", "r", "c", "beta"};
const std::set<std::string> kSections = {"model", "scheme", "init", "run", "verify"};
const std::set<std::string> kKnownKeys = {
    "command",      "model.model",    "model.p",          "model.alpha",  "model.nu",         "model.N",
    "model.q",      "model.r",        "model.c",          "model.beta",   "model.complex",    "model.g",
    "model.h",      "model.b",        "scheme.dt",        "scheme.T",     "scheme.eps_gap",   "scheme.adaptive",
    "scheme.truncation", "scheme.stride", "scheme.max_halvings", "scheme.levels", "init.lambda0", "init.x0",
    "run.paths",    "run.seed",       "run.workers",      "run.out",      "run.noise_dump",
    "verify.min_collision_fraction",  "verify.min_ratio",
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> to_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<bool> to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  return std::nullopt;
}

std::optional<std::vector<double>> to_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto v = to_double(trim(item));
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  if (out.empty()) return std::nullopt;
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

struct Entry {
  std::string value;
  std::size_t line;
};

}  // namespace

std::string to_string(Command c) {
  for (const auto& [cmd, name] : command_names())
    if (cmd == c) return name;
  return "unknown";
}

std::string ConfigIssue::describe() const {
  std::string s;
  if (line > 0) s += "line " + std::to_string(line) + ": ";
  if (!key.empty()) s += key + ": ";
  return s + message;
}

namespace {

std::string join(const std::vector<ConfigIssue>& issues) {
  std::string s = "invalid configuration";
  for (const auto& i : issues) s += "\n  " + i.describe();
  return s;
}

bool same_scheme(const SpectralSchemeConfig& a, const SpectralSchemeConfig& b) {
  return a.dt == b.dt && a.T == b.T && a.eps_gap == b.eps_gap && a.adaptive == b.adaptive &&
         a.max_halvings == b.max_halvings && a.truncation == b.truncation && a.stride == b.stride &&
         a.track_eigenvectors == b.track_eigenvectors;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues) : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

bool RunConfig::operator==(const RunConfig& o) const {
  const bool x0_equal = x0.has_value() == o.x0.has_value() && (!x0 || x0->matrix() == o.x0->matrix());
  return command == o.command && model.family == o.model.family && model.params == o.model.params &&
         model.expressions == o.model.expressions && p == o.p && same_scheme(scheme, o.scheme) &&
         levels == o.levels && lambda0 == o.lambda0 && x0_equal && paths == o.paths && seed == o.seed &&
         workers == o.workers && out == o.out && noise_dump == o.noise_dump &&
         min_collision_fraction == o.min_collision_fraction && min_ratio == o.min_ratio;
}

std::vector<double> default_lambda0(const SpectralCoefficients& coeff, std::size_t p) {
  std::vector<double> out(p);
  const Domain& d = coeff.domain;
  for (std::size_t i = 0; i < p; ++i) {
    const double k = static_cast<double>(i + 1);
    if (d.bounded_below() && d.bounded_above())
      out[i] = d.lower + (d.upper - d.lower) * k / static_cast<double>(p + 1);
    else if (d.bounded_below())
      out[i] = d.lower + k;
    else
      out[i] = k;
  }
  return out;
}

std::vector<double> initial_spectrum(const RunConfig& c) {
  if (!c.lambda0.empty()) return c.lambda0;
  if (c.x0) return eigendecompose(*c.x0).values;
  return default_lambda0(catalog(c.model), c.p);
}

std::vector<ConfigIssue> validate_config(const RunConfig& c) {
  std::vector<ConfigIssue> issues;
  auto add = [&](const std::string& key, const std::string& msg) { issues.push_back({0, key, msg}); };

  if (c.p == 0) add("model.p", "must be >= 1");
  std::optional<SpectralCoefficients> coeff;
  try {
    coeff = catalog(c.model);
    if (c.p > 0) check_dimension(*coeff, c.p);
  } catch (const std::exception& e) {
    coeff.reset();
    add("model", e.what());
  }

  const SpectralSchemeConfig& s = c.scheme;
  if (!(s.dt > 0.0) || !std::isfinite(s.dt)) add("scheme.dt", "must be > 0");
  if (!(s.T > 0.0) || !std::isfinite(s.T)) add("scheme.T", "must be > 0");
  if (s.dt > 0.0 && s.T > 0.0) {
    try {
      step_count(s.T, s.dt);
    } catch (const std::exception& e) {
      add("scheme.T", e.what());
    }
  }
  if (!(s.eps_gap > 0.0)) add("scheme.eps_gap", "must be > 0");
  if (s.stride == 0) add("scheme.stride", "must be >= 1");
  if (s.max_halvings > 50) add("scheme.max_halvings", "must be <= 50");
  if (s.truncation == TruncationMode::reflect_reject && !s.adaptive)
    add("scheme.truncation", "reflect-reject needs scheme.adaptive = true");
  if (c.levels < 2) add("scheme.levels", "must be >= 2");
  if (c.levels > 13) add("scheme.levels", "must be <= 13");

  if (!c.lambda0.empty()) {
    if (c.lambda0.size() != c.p) add("init.lambda0", "needs exactly p = " + std::to_string(c.p) + " values");
    for (std::size_t i = 1; i < c.lambda0.size(); ++i)
      if (!(c.lambda0[i] - c.lambda0[i - 1] > s.eps_gap)) {
        add("init.lambda0", "must be strictly ascending with gaps above scheme.eps_gap");
        break;
      }
    if (coeff)
      for (double l : c.lambda0)
        if (!coeff->domain.contains(l)) {
          add("init.lambda0", "value " + fmt(l) + " outside the model domain");
          break;
        }
  }
  if (c.x0) {
    if (c.x0->dim() != c.p) {
      add("init.x0", "must be p x p");
    } else {
      const std::vector<double> ev = eigendecompose(*c.x0).values;
      for (std::size_t i = 1; i < ev.size(); ++i)
        if (!(ev[i] - ev[i - 1] > s.eps_gap)) {
          add("init.x0", "eigenvalues must be distinct");
          break;
        }
      if (!c.lambda0.empty() && c.lambda0.size() == ev.size()) {
        for (std::size_t i = 0; i < ev.size(); ++i)
          if (std::abs(ev[i] - c.lambda0[i]) > 1e-9 * (1.0 + std::abs(ev[i]))) {
            add("init", "lambda0 and x0 disagree; give one of them");
            break;
          }
      }
    }
  }

  if (c.paths == 0) add("run.paths", "must be >= 1");
  if (c.workers == 0) add("run.workers", "must be >= 1");
  if (c.out.empty()) add("run.out", "must not be empty");
  if (c.out.find('#') != std::string::npos) add("run.out", "must not contain '#'");
  if (!(c.min_collision_fraction >= 0.0 && c.min_collision_fraction < 1.0))
    add("verify.min_collision_fraction", "must be in [0, 1)");
  if (!(c.min_ratio > 0.0)) add("verify.min_ratio", "must be > 0");

  switch (c.command) {
    case Command::verify_consistency:
      if (coeff && (coeff->complex_mode || coeff->beta != 1.0))
        add("model", "verify-consistency needs a real model with beta = 1");
      [[fallthrough]];
    case Command::verify_convergence:
      if (c.paths < 2) add("run.paths", "must be >= 2 for standard errors");
      break;
    case Command::verify_positivity:
      switch (c.model.family) {
        case ModelFamily::besq_particles:
        case ModelFamily::wishart:
        case ModelFamily::generalized_wishart:
        case ModelFamily::jacobi:
        case ModelFamily::beta_wishart:
        case ModelFamily::beta_jacobi:
          break;
        default:
          add("model.model", "verify-positivity needs a model with a boundary");
      }
      break;
    default:
      break;
  }
  return issues;
}

RunConfig parse_config(const std::string& text) {
  std::vector<ConfigIssue> issues;
  std::map<std::string, Entry> entries;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        issues.push_back({lineno, "", "syntax error: unterminated section header"});
        continue;
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!kSections.contains(section)) {
        issues.push_back({lineno, section, "unknown section"});
        section.clear();
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back({lineno, "", "syntax error: expected 'key = value'"});
      continue;
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) {
      issues.push_back({lineno, "", "syntax error: empty key"});
      continue;
    }
    if (!section.empty() && key.find('.') != std::string::npos) {
      issues.push_back({lineno, section + "." + key, "syntax error: dotted key inside a section"});
      continue;
    }
    const std::string path = section.empty() ? key : section + "." + key;
    if (!kKnownKeys.contains(path)) {
      issues.push_back({lineno, path, "unknown key"});
      continue;
    }
    if (value.empty()) {
      issues.push_back({lineno, path, "syntax error: missing value"});
      continue;
    }
    if (auto [it, fresh] = entries.emplace(path, Entry{value, lineno}); !fresh)
      issues.push_back({lineno, path, "duplicate key (first set on line " + std::to_string(it->second.line) + ")"});
  }

  RunConfig c;
  std::set<std::string> bad;
  auto fail = [&](const std::string& key, const std::string& msg) {
    issues.push_back({entries.at(key).line, key, msg});
    bad.insert(key);
  };
  auto number = [&](const std::string& key) -> std::optional<double> {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    auto v = to_double(it->second.value);
    if (!v || !std::isfinite(*v)) fail(key, "expected a finite number, got '" + it->second.value + "'");
    return v;
  };
  auto integer = [&](const std::string& key) -> std::optional<std::uint64_t> {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    auto v = to_u64(it->second.value);
    if (!v) fail(key, "expected a non-negative integer, got '" + it->second.value + "'");
    return v;
  };
  auto boolean = [&](const std::string& key) -> std::optional<bool> {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    auto v = to_bool(it->second.value);
    if (!v) fail(key, "expected true or false, got '" + it->second.value + "'");
    return v;
  };

  if (auto it = entries.find("command"); it != entries.end()) {
    bool found = false;
    for (const auto& [cmd, name] : command_names())
      if (it->second.value == name) {
        c.command = cmd;
        found = true;
      }
    if (!found) fail("command", "unknown command '" + it->second.value + "'");
  }

  bool model_ok = false;
  if (auto it = entries.find("model.model"); it == entries.end()) {
    issues.push_back({0, "model.model", "required"});
  } else {
    try {
      c.model.family = parse_family(it->second.value);
      model_ok = true;
    } catch (const ModelError& e) {
      fail("model.model", e.what());
    }
  }
  if (auto v = integer("model.p")) c.p = static_cast<std::size_t>(*v);
  else if (!entries.contains("model.p")) issues.push_back({0, "model.p", "required"});

  const ParameterSpec spec = model_ok ? model_parameters(c.model.family) : ParameterSpec{};
  for (const auto& name : kNumericModelKeys) {
    const std::string key = "model." + name;
    if (!entries.contains(key)) {
      if (model_ok && spec.required.contains(name)) issues.push_back({0, key, "required by model " + to_string(c.model.family)});
      continue;
    }
    if (model_ok && !spec.required.contains(name) && !spec.optional.contains(name)) {
      fail(key, "not a parameter of model " + to_string(c.model.family));
      continue;
    }
    if (auto v = number(key)) {
      c.model.params[name] = *v;
      if (name == "beta" && !(*v > 0.0)) fail(key, "must be > 0");
      if (name == "N" && (!(*v >= 1.0) || *v != std::floor(*v))) fail(key, "must be a positive integer");
    }
  }
  if (entries.contains("model.complex")) {
    if (model_ok && !spec.optional.contains("complex"))
      fail("model.complex", "not a parameter of model " + to_string(c.model.family));
    else if (auto v = boolean("model.complex"))
      c.model.params["complex"] = *v ? 1.0 : 0.0;
  }
  for (const char* name : {"g", "h", "b"}) {
    const std::string key = std::string("model.") + name;
    auto it = entries.find(key);
    if (it == entries.end()) continue;
    if (model_ok && c.model.family != ModelFamily::custom) {
      fail(key, "coefficient expressions are only allowed for model custom");
      continue;
    }
    try {
      Expression::parse(it->second.value);
      c.model.expressions[name] = it->second.value;
    } catch (const std::exception& e) {
      fail(key, e.what());
    }
  }

  if (auto v = number("scheme.dt")) c.scheme.dt = *v;
  if (auto v = number("scheme.T")) c.scheme.T = *v;
  if (auto v = number("scheme.eps_gap")) c.scheme.eps_gap = *v;
  if (auto v = boolean("scheme.adaptive")) c.scheme.adaptive = *v;
  if (auto it = entries.find("scheme.truncation"); it != entries.end()) {
    try {
      c.scheme.truncation = parse_truncation(it->second.value);
    } catch (const std::exception& e) {
      fail("scheme.truncation", e.what());
    }
  }
  if (auto v = integer("scheme.stride")) c.scheme.stride = *v;
  if (auto v = integer("scheme.max_halvings")) {
    if (*v > 50) fail("scheme.max_halvings", "must be <= 50");
    else c.scheme.max_halvings = static_cast<unsigned>(*v);
  }
  if (auto v = integer("scheme.levels")) {
    if (*v > 13) fail("scheme.levels", "must be <= 13");
    else c.levels = static_cast<unsigned>(*v);
  }

  if (auto it = entries.find("init.lambda0"); it != entries.end()) {
    if (auto v = to_list(it->second.value)) c.lambda0 = *v;
    else fail("init.lambda0", "expected a comma-separated list of numbers");
  }
  if (auto it = entries.find("init.x0"); it != entries.end()) {
    std::vector<std::vector<double>> rows;
    std::stringstream rs(it->second.value);
    std::string row;
    bool ok = true;
    while (std::getline(rs, row, ';')) {
      auto v = to_list(trim(row));
      if (!v) ok = false;
      else rows.push_back(*v);
    }
    const std::size_t n = rows.size();
    for (const auto& r : rows) ok = ok && r.size() == n;
    if (!ok || n == 0) {
      fail("init.x0", "expected square rows 'a, b; c, d'");
    } else {
      SymmetricMatrix x(n);
      for (std::size_t i = 0; i < n && ok; ++i)
        for (std::size_t j = i; j < n; ++j) {
          if (rows[i][j] != rows[j][i]) ok = false;
          x.set(i, j, rows[i][j]);
        }
      if (ok) c.x0 = x;
      else fail("init.x0", "must be symmetric");
    }
  }

  if (auto v = integer("run.paths")) c.paths = static_cast<std::size_t>(*v);
  if (auto v = integer("run.seed")) c.seed = *v;
  if (auto v = integer("run.workers")) c.workers = static_cast<unsigned>(std::min<std::uint64_t>(*v, 1024));
  if (auto it = entries.find("run.out"); it != entries.end()) c.out = it->second.value;
  if (auto v = boolean("run.noise_dump")) c.noise_dump = *v;
  if (auto v = number("verify.min_collision_fraction")) c.min_collision_fraction = *v;
  if (auto v = number("verify.min_ratio")) c.min_ratio = *v;

  // Semantic checks, skipping keys that already failed to parse.
  std::set<std::string> reported = bad;
  for (const auto& i : issues) reported.insert(i.key);
  const bool model_reported = std::any_of(reported.begin(), reported.end(),
                                          [](const std::string& k) { return k.rfind("model", 0) == 0; });
  for (auto issue : validate_config(c)) {
    if (reported.contains(issue.key)) continue;
    if (issue.key == "model" && model_reported) continue;
    if (auto it = entries.find(issue.key); it != entries.end()) issue.line = it->second.line;
    issues.push_back(issue);
  }
  std::stable_sort(issues.begin(), issues.end(), [](const ConfigIssue& a, const ConfigIssue& b) {
    return (a.line == 0 ? SIZE_MAX : a.line) < (b.line == 0 ? SIZE_MAX : b.line);
  });
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return c;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  o << "command = " << to_string(c.command) << "\n\n[model]\n";
  o << "model = " << to_string(c.model.family) << '\n';
  o << "p = " << c.p << '\n';
  for (const auto& [k, v] : c.model.params) {
    if (k == "complex") o << "complex = " << (v != 0.0 ? "true" : "false") << '\n';
    else o << k << " = " << fmt(v) << '\n';
  }
  for (const auto& [k, v] : c.model.expressions) o << k << " = " << v << '\n';

  const SpectralSchemeConfig& s = c.scheme;
  o << "\n[scheme]\n";
  o << "dt = " << fmt(s.dt) << '\n';
  o << "T = " << fmt(s.T) << '\n';
  o << "eps_gap = " << fmt(s.eps_gap) << '\n';
  o << "adaptive = " << (s.adaptive ? "true" : "false") << '\n';
  o << "truncation = " << to_string(s.truncation) << '\n';
  o << "stride = " << s.stride << '\n';
  o << "max_halvings = " << s.max_halvings << '\n';
  o << "levels = " << c.levels << '\n';

  if (!c.lambda0.empty() || c.x0) o << "\n[init]\n";
  if (!c.lambda0.empty()) {
    o << "lambda0 = ";
    for (std::size_t i = 0; i < c.lambda0.size(); ++i) o << (i ? ", " : "") << fmt(c.lambda0[i]);
    o << '\n';
  }
  if (c.x0) {
    o << "x0 = ";
    for (std::size_t i = 0; i < c.x0->dim(); ++i) {
      if (i) o << "; ";
      for (std::size_t j = 0; j < c.x0->dim(); ++j) o << (j ? ", " : "") << fmt((*c.x0)(i, j));
    }
    o << '\n';
  }

  o << "\n[run]\n";
  o << "paths = " << c.paths << '\n';
  if (c.seed) o << "seed = " << *c.seed << '\n';
  o << "workers = " << c.workers << '\n';
  o << "out = " << c.out << '\n';
  o << "noise_dump = " << (c.noise_dump ? "true" : "false") << '\n';

  o << "\n[verify]\n";
  o << "min_collision_fraction = " << fmt(c.min_collision_fraction) << '\n';
  o << "min_ratio = " << fmt(c.min_ratio) << '\n';
  return o.str();
}

}  // namespace ssde
