#include "amap/trace.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <limits>
#include <ostream>

#include "amap/clause_json.hpp"
#include "amap/error.hpp"

namespace amap {

using ojson = nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 7> kKindNames{{
    {EventKind::World, "world"},
    {EventKind::Pose, "pose"},
    {EventKind::Cue, "cue"},
    {EventKind::Imagine, "imagine"},
    {EventKind::Energy, "energy"},
    {EventKind::Exploration, "exploration"},
    {EventKind::Goal, "goal"},
}};

ojson xy(Vec2 p) { return ojson::array({p.x, p.y}); }

std::string_view kind_name(SpringKind k) {
  switch (k) {
    case SpringKind::Distance: return "distance";
    case SpringKind::AbsoluteAngle: return "absolute-angle";
    case SpringKind::RelativeAngle: return "relative-angle";
  }
  return "distance";
}

std::string_view origin_name(SpringOrigin o) {
  switch (o) {
    case SpringOrigin::Template: return "template";
    case SpringOrigin::Hierarchy: return "hierarchy";
    case SpringOrigin::Observation: return "observation";
  }
  return "template";
}

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "pose";
}

EventKind event_kind_from_string(std::string_view s) {
  for (const auto& [k, name] : kKindNames) {
    if (name == s) return k;
  }
  throw Error(ErrorCode::MalformedTrace, "unknown event kind '" + std::string(s) + "'");
}

TraceEvent world_event(const Scenario& scenario, const Toponym& goal, std::uint64_t seed) {
  ojson cues = ojson::array();
  for (const CuePlacement& c : scenario.cues) {
    ojson labels = ojson::array();
    for (const Clause& clause : c.clauses) {
      if (const auto* loc = std::get_if<LocationalClause>(&clause); loc && is_label(*loc)) {
        labels.push_back(loc->toponym.str());
      }
    }
    cues.push_back({{"id", c.id}, {"pos", xy(c.position)}, {"heading", c.heading},
                    {"labels", labels}});
  }
  ojson payload{{"scenario", scenario.name},
                {"goal", goal.str()},
                {"seed", seed},
                {"resolution", scenario.map.resolution()},
                {"origin", xy(scenario.map.origin())},
                {"grid", scenario.map.rows()},
                {"robot_start", xy(scenario.robot_start)},
                {"cues", cues}};
  return {0.0, EventKind::World, std::move(payload)};
}

TraceEvent pose_event(double t, const RobotState& robot) {
  return {t,
          EventKind::Pose,
          {{"x", robot.position.x},
           {"y", robot.position.y},
           {"heading", robot.heading},
           {"odometry", robot.odometry}}};
}

TraceEvent cue_event(double t, const CueObservation& observation, double odometry) {
  return {t,
          EventKind::Cue,
          {{"id", observation.cue_id},
           {"pos", xy(observation.position)},
           {"odometry", odometry},
           {"clauses", clauses_to_json(observation.clauses)}}};
}

TraceEvent imagine_event(double t, const AbstractMap& map) {
  const SystemState& sys = map.system();
  ojson masses = ojson::array();
  for (const PointMass& m : sys.masses()) {
    masses.push_back({{"name", m.toponym.str()}, {"pos", xy(m.position)}, {"fixed", m.fixed}});
  }
  ojson springs = ojson::array();
  for (const SpringSpec& s : map.springs()) {
    ojson ends = ojson::array();
    for (std::size_t i = 0; i < s.endpoint_count(); ++i) ends.push_back(s.endpoints[i]);
    springs.push_back({{"kind", kind_name(s.kind)}, {"ends", ends}, {"origin", origin_name(s.origin)}});
  }
  ojson payload{{"settled", true}, {"steps", 0}, {"sim_time", 0.0}, {"kinetic", 0.0},
                {"potential", 0.0}};
  if (const auto& last = map.last_imagination()) {
    payload["settled"] = last->settled;
    payload["steps"] = last->steps;
    payload["sim_time"] = last->sim_time;
    if (!last->energy.empty()) {
      payload["kinetic"] = last->energy.back().kinetic;
      payload["potential"] = last->energy.back().potential;
    }
  }
  payload["exploration_factor"] = map.exploration().value();
  payload["masses"] = std::move(masses);
  payload["springs"] = std::move(springs);
  return {t, EventKind::Imagine, std::move(payload)};
}

std::vector<EnergySample> downsample(const std::vector<EnergySample>& series,
                                     std::size_t max_points) {
  if (series.size() <= max_points || max_points < 2) {
    if (max_points < 2 && !series.empty()) return {series.back()};
    return series;
  }
  const std::size_t stride = (series.size() - 1 + (max_points - 2)) / (max_points - 1);
  std::vector<EnergySample> out;
  for (std::size_t i = 0; i < series.size() - 1; i += stride) out.push_back(series[i]);
  out.push_back(series.back());
  return out;
}

TraceEvent energy_event(double t, const AbstractMap& map) {
  ojson samples = ojson::array();
  if (const auto& last = map.last_imagination()) {
    for (const EnergySample& s : downsample(last->energy)) {
      samples.push_back(ojson::array({s.t, s.kinetic, s.potential}));
    }
  }
  return {t, EventKind::Energy, {{"samples", std::move(samples)}}};
}

TraceEvent exploration_event(double t, const AbstractMap& map, Vec2 expected_goal) {
  return {t,
          EventKind::Exploration,
          {{"factor", map.exploration().value()},
           {"failures", map.exploration().failures()},
           {"expected", xy(expected_goal)}}};
}

TraceEvent goal_event(double t, bool success, double distance, std::string_view reason) {
  return {t,
          EventKind::Goal,
          {{"success", success}, {"distance", distance}, {"reason", std::string(reason)}}};
}

std::string to_jsonl_line(const TraceEvent& event) {
  ojson j{{"t", event.t}, {"kind", to_string(event.kind)}, {"payload", event.payload}};
  return j.dump();
}

std::vector<TraceEvent> parse_trace(std::istream& in) {
  std::vector<TraceEvent> events;
  std::string line;
  std::size_t number = 0;
  double last_t = -std::numeric_limits<double>::infinity();
  auto fail = [&](const std::string& what) {
    Error e(ErrorCode::MalformedTrace, "line " + std::to_string(number) + ": " + what);
    e.line = number;
    throw e;
  };
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ojson j;
    try {
      j = ojson::parse(line);
    } catch (const ojson::parse_error& e) {
      fail(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("t") || !j["t"].is_number() || !j.contains("kind") ||
        !j["kind"].is_string() || !j.contains("payload") || !j["payload"].is_object()) {
      fail("event needs numeric 't', string 'kind' and object 'payload'");
    }
    TraceEvent ev;
    ev.t = j["t"].get<double>();
    try {
      ev.kind = event_kind_from_string(j["kind"].get<std::string>());
    } catch (const Error& e) {
      fail(e.what());
    }
    if (ev.t < last_t) fail("time went backwards");
    last_t = ev.t;
    ev.payload = std::move(j["payload"]);
    events.push_back(std::move(ev));
  }
  return events;
}

void write_trace(std::ostream& out, const std::vector<TraceEvent>& events) {
  for (const TraceEvent& e : events) out << to_jsonl_line(e) << '\n';
}

}  // namespace amap
