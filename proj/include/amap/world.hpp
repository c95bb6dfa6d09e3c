#pragma once
// Grid-world simulator: occupancy map, cue placements, robot kinematics,
// sensing and planning.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amap/abstract_map.hpp"
#include "amap/geometry.hpp"
#include "amap/grammar.hpp"
#include "amap/hierarchy.hpp"

namespace amap {

inline constexpr double kSensorRange = 4.0;     // m
inline constexpr double kRobotSpeed = 0.5;      // m/s
inline constexpr double kControlTick = 0.1;     // s
inline constexpr double kDefaultResolution = 0.25;  // m/cell

struct Cell {
  int x = 0;  // column, increasing east
  int y = 0;  // row from the bottom, increasing north
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

class WorldMap {
 public:
  // `rows` are given top (max-y) row first; '#' is a wall, '.' free.
  // Throws SchemaError on a ragged, tiny, unknown-character or open-border grid.
  WorldMap(const std::vector<std::string>& rows, double resolution = kDefaultResolution,
           Vec2 origin = {});

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  Vec2 origin() const { return origin_; }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  // Out-of-bounds cells count as walls.
  bool is_wall(Cell c) const;
  bool is_free(Cell c) const { return !is_wall(c); }

  Cell cell_at(Vec2 p) const;
  Vec2 centre_of(Cell c) const;
  std::size_t linear(Cell c) const { return static_cast<std::size_t>(c.y) * width_ + c.x; }
  Cell from_linear(std::size_t i) const {
    return {static_cast<int>(i % width_), static_cast<int>(i / width_)};
  }
  std::size_t cell_count() const { return cells_.size(); }

  // Rows in the input orientation (top first), for rendering and traces.
  std::vector<std::string> rows() const;

 private:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = kDefaultResolution;
  Vec2 origin_;
  std::vector<std::uint8_t> cells_;  // 1 = wall
};

// Every cell the segment a-b touches, in order from a (supercover).
std::vector<Cell> supercover(const WorldMap& map, Vec2 a, Vec2 b);
bool line_of_sight(const WorldMap& map, Vec2 a, Vec2 b);

struct CuePlacement {
  std::string id;
  Vec2 position;
  double heading = 0.0;
  std::vector<Clause> clauses;  // locational clauses in the cue frame
};

struct Scenario {
  std::string name;
  WorldMap map;
  std::vector<CuePlacement> cues;
  HierarchyGraph hierarchy;
  Vec2 robot_start;
  std::vector<Toponym> goals;
};

// Parses and validates a scenario document. Throws SchemaError, CueOnWall or
// GoalUnreachableByLabel.
Scenario load_world(std::string_view text);
Scenario load_world_file(const std::string& path);

// True if some cue carries a label clause for `goal`.
bool cue_labels(const CuePlacement& cue, const Toponym& goal);

struct RobotState {
  Vec2 position;
  double heading = 0.0;
  double odometry = 0.0;
  std::vector<std::uint8_t> explored;  // per cell
  std::set<std::string> observed_cues;

  static RobotState start(const WorldMap& map, Vec2 position);
  bool is_explored(const WorldMap& map, Cell c) const {
    return map.in_bounds(c) && explored[map.linear(c)] != 0;
  }
};

struct SenseResult {
  std::vector<Cell> newly_explored;
  std::vector<CueObservation> observations;  // locational clauses in world frame
};

// 360 rays at 1 degree out to the sensor range, then cue detection (range
// and line of sight). Each cue is reported at most once per robot.
SenseResult sense(const WorldMap& map, std::span<const CuePlacement> cues, RobotState& robot);

bool cue_detectable(const WorldMap& map, Vec2 from, Vec2 cue);

// Transforms a cue's cue-frame locational clauses into the world frame.
CueObservation observe(const CuePlacement& cue);

std::optional<Vec2> centre_of_explored_mass(const WorldMap& map, const RobotState& robot);

struct PlanStep {
  Vec2 waypoint;
  // Nothing reachable gets closer to the target than where the robot is.
  bool at_closest_approach = false;
  // Planned cells from the robot's cell to the goal cell, inclusive.
  std::vector<Cell> path;
};

// Cells the planner may route through: explored free cells, plus unexplored
// cells (assumed free until seen). Known walls are blocked.
std::vector<std::uint8_t> plannable_cells(const WorldMap& map, const RobotState& robot);

// 8-connected A* (no corner cutting) from the robot's cell to the target's
// cell under the free-space assumption; through unexplored space the plan is
// the straight-line continuation. If the target cell cannot be reached, heads
// for the reachable cell nearest to it. Throws NoProgress when boxed in.
PlanStep plan_step(const WorldMap& map, const RobotState& robot, Vec2 target);

// Shortest 8-connected path over cells allowed by `passable`; empty if none.
std::vector<Cell> astar(const WorldMap& map, Cell start, Cell goal,
                        const std::vector<std::uint8_t>& passable);
double path_length(const std::vector<Cell>& path);
// 8-connected path cost (in cells) from `start` to every cell; infinity where
// unreachable.
std::vector<double> path_costs(const WorldMap& map, Cell start,
                               const std::vector<std::uint8_t>& passable);

struct AdvanceResult {
  double displacement = 0.0;
  std::optional<Cell> touched_wall;
};

// Moves towards the waypoint at robot speed, stopping short of wall cells.
// A blocking wall cell is marked explored.
AdvanceResult advance_robot(const WorldMap& map, RobotState& robot, Vec2 waypoint,
                            double dt = kControlTick,
                            double max_distance = std::numeric_limits<double>::infinity());

}  // namespace amap
