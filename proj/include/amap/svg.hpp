#pragma once
// SVG rendering of imagined layouts and trial replays.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "amap/abstract_map.hpp"
#include "amap/trace.hpp"

namespace amap {

// Geometry of an imagined model, detached from the live map.
struct LayoutSnapshot {
  struct Mass {
    std::string name;
    Vec2 position;
    bool fixed = false;
  };
  struct Spring {
    SpringKind kind = SpringKind::Distance;
    std::vector<std::size_t> ends;
    SpringOrigin origin = SpringOrigin::Template;
  };
  std::vector<Mass> masses;
  std::vector<Spring> springs;
};

LayoutSnapshot snapshot_of(const AbstractMap& map);
// Reads the payload of an imagine event. Throws MalformedTrace.
LayoutSnapshot snapshot_from_json(const nlohmann::ordered_json& payload);

// Point masses as labelled circles, springs as lines (solid distance, dashed
// angle, bold observation) and an energy-vs-time inset.
std::string render_imagination(const LayoutSnapshot& layout,
                               const std::vector<EnergySample>& energy);

struct ReplayFrame {
  std::vector<std::string> grid;
  double resolution = 0.25;
  Vec2 origin;
  std::vector<Vec2> path;
  struct Cue {
    std::string id;
    Vec2 position;
    bool observed = false;
  };
  std::vector<Cue> cues;
  std::optional<LayoutSnapshot> layout;
  std::string goal;
  std::optional<bool> success;
};

// State of a trial after its `frame`-th imagine event (0-based), or at the
// end of the trace when `frame` is absent. Throws MalformedTrace.
ReplayFrame replay_frame(const std::vector<TraceEvent>& events,
                         std::optional<std::size_t> frame = std::nullopt);

std::string render_replay(const ReplayFrame& frame);

}  // namespace amap
