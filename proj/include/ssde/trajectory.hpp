#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ssde {

enum class EventType { collision, boundary, explosion };

std::string to_string(EventType t);

struct TrajectoryEvent {
  EventType type = EventType::collision;
  double t = 0.0;
  std::string detail;
};

enum class RunStatus { completed, collision, explosion };

std::string to_string(RunStatus s);

/// One JSON object per line: {"type": ..., "t": ..., "detail": ...}. When
/// path >= 0 a "path" field is added.
void write_events_jsonl(std::ostream& out, const std::vector<TrajectoryEvent>& events,
                        std::int64_t path = -1);

/// "ij" (1-based) for p <= 9, "i_j" otherwise; used in CSV headers.
std::string index_label(std::size_t i, std::size_t j, std::size_t p);

/// Number of steps for horizon T at step dt; T must be an integer multiple
/// of dt up to a relative 1e-9.
std::uint64_t step_count(double T, double dt);

}  // namespace ssde
