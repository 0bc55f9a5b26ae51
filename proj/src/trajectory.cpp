#include "ssde/trajectory.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace ssde {

std::string to_string(EventType t) {
  switch (t) {
    case EventType::collision: return "collision";
    case EventType::boundary: return "boundary";
    case EventType::explosion: return "explosion";
  }
  return "unknown";
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::collision: return "collision";
    case RunStatus::explosion: return "explosion";
  }
  return "unknown";
}

void write_events_jsonl(std::ostream& out, const std::vector<TrajectoryEvent>& events,
                        std::int64_t path) {
  for (const auto& e : events) {
    nlohmann::ordered_json j;
    if (path >= 0) j["path"] = path;
    j["type"] = to_string(e.type);
    j["t"] = e.t;
    j["detail"] = e.detail;
    out << j.dump() << '\n';
  }
}

std::string index_label(std::size_t i, std::size_t j, std::size_t p) {
  const std::string a = std::to_string(i + 1);
  const std::string b = std::to_string(j + 1);
  return p <= 9 ? a + b : a + "_" + b;
}

std::uint64_t step_count(double T, double dt) {
  if (!(dt > 0.0) || !(T > 0.0) || !std::isfinite(T) || !std::isfinite(dt))
    throw std::invalid_argument("step_count: T and dt must be positive and finite");
  if (dt > T * (1.0 + 1e-12)) throw std::invalid_argument("step_count: dt must be <= T");
  const double ratio = T / dt;
  const double n = std::round(ratio);
  if (std::abs(n - ratio) > 1e-9 * ratio)
    throw std::invalid_argument("step_count: T must be an integer multiple of dt");
  return static_cast<std::uint64_t>(n);
}

}  // namespace ssde
