#pragma once
// Trial trace events and their JSON-lines encoding.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "amap/abstract_map.hpp"
#include "amap/world.hpp"

namespace amap {

enum class EventKind { World, Pose, Cue, Imagine, Energy, Exploration, Goal };

std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view s);

struct TraceEvent {
  double t = 0.0;
  EventKind kind = EventKind::Pose;
  nlohmann::ordered_json payload = nlohmann::ordered_json::object();
};

inline constexpr std::size_t kMaxEnergySamples = 1000;

TraceEvent world_event(const Scenario& scenario, const Toponym& goal, std::uint64_t seed);
TraceEvent pose_event(double t, const RobotState& robot);
TraceEvent cue_event(double t, const CueObservation& observation, double odometry);
// Layout snapshot of the map plus the summary of its last imagination.
TraceEvent imagine_event(double t, const AbstractMap& map);
// Energy series of the last imagination, down-sampled.
TraceEvent energy_event(double t, const AbstractMap& map);
TraceEvent exploration_event(double t, const AbstractMap& map, Vec2 expected_goal);
TraceEvent goal_event(double t, bool success, double distance, std::string_view reason);

// Every `stride`-th sample plus the final one, at most `max_points`.
std::vector<EnergySample> downsample(const std::vector<EnergySample>& series,
                                     std::size_t max_points = kMaxEnergySamples);

std::string to_jsonl_line(const TraceEvent& event);
// Throws MalformedTrace with the 1-based line number.
std::vector<TraceEvent> parse_trace(std::istream& in);
void write_trace(std::ostream& out, const std::vector<TraceEvent>& events);

}  // namespace amap
