#include "amap/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "amap/clause_json.hpp"
#include "amap/error.hpp"

namespace amap {

using nlohmann::json;

WorldMap::WorldMap(const std::vector<std::string>& rows, double resolution, Vec2 origin)
    : resolution_(resolution), origin_(origin) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::SchemaError, what); };
  if (!(resolution > 0.0) || !std::isfinite(resolution)) fail("resolution must be > 0");
  if (!is_finite(origin)) fail("origin must be finite");
  if (rows.size() < 3) fail("grid needs at least 3 rows");
  height_ = static_cast<int>(rows.size());
  width_ = static_cast<int>(rows.front().size());
  if (width_ < 3) fail("grid needs at least 3 columns");
  cells_.assign(static_cast<std::size_t>(width_) * height_, 0);
  for (int r = 0; r < height_; ++r) {
    const std::string& row = rows[r];
    if (static_cast<int>(row.size()) != width_) fail("grid rows must have equal length");
    const int y = height_ - 1 - r;
    for (int x = 0; x < width_; ++x) {
      const char ch = row[x];
      if (ch != '#' && ch != '.') fail(std::string("unknown grid character '") + ch + "'");
      const bool wall = ch == '#';
      const bool border = x == 0 || y == 0 || x == width_ - 1 || y == height_ - 1;
      if (border && !wall) fail("grid border must be walls");
      cells_[linear({x, y})] = wall ? 1 : 0;
    }
  }
}

bool WorldMap::is_wall(Cell c) const { return !in_bounds(c) || cells_[linear(c)] != 0; }

Cell WorldMap::cell_at(Vec2 p) const {
  return {static_cast<int>(std::floor((p.x - origin_.x) / resolution_)),
          static_cast<int>(std::floor((p.y - origin_.y) / resolution_))};
}

Vec2 WorldMap::centre_of(Cell c) const {
  return {origin_.x + (c.x + 0.5) * resolution_, origin_.y + (c.y + 0.5) * resolution_};
}

std::vector<std::string> WorldMap::rows() const {
  std::vector<std::string> out;
  for (int y = height_ - 1; y >= 0; --y) {
    std::string row;
    for (int x = 0; x < width_; ++x) row.push_back(is_wall({x, y}) ? '#' : '.');
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<Cell> supercover(const WorldMap& map, Vec2 a, Vec2 b) {
  const double res = map.resolution();
  const Vec2 ga = (a - map.origin()) / res;
  const Vec2 gb = (b - map.origin()) / res;
  Cell cell{static_cast<int>(std::floor(ga.x)), static_cast<int>(std::floor(ga.y))};
  const Cell end{static_cast<int>(std::floor(gb.x)), static_cast<int>(std::floor(gb.y))};
  const Vec2 d = gb - ga;
  const int sx = d.x > 0 ? 1 : (d.x < 0 ? -1 : 0);
  const int sy = d.y > 0 ? 1 : (d.y < 0 ? -1 : 0);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double dx = sx != 0 ? 1.0 / std::abs(d.x) : kInf;
  const double dy = sy != 0 ? 1.0 / std::abs(d.y) : kInf;
  double tx = sx > 0 ? (cell.x + 1 - ga.x) * dx : (sx < 0 ? (ga.x - cell.x) * dx : kInf);
  double ty = sy > 0 ? (cell.y + 1 - ga.y) * dy : (sy < 0 ? (ga.y - cell.y) * dy : kInf);

  std::vector<Cell> out{cell};
  const int budget = std::abs(end.x - cell.x) + std::abs(end.y - cell.y);
  constexpr double kTie = 1e-12;
  for (int i = 0; i < budget && !(cell == end); ++i) {
    if (std::abs(tx - ty) < kTie) {
      // Passing exactly through a corner touches both side cells.
      if (tx > 1.0) break;
      out.push_back({cell.x + sx, cell.y});
      out.push_back({cell.x, cell.y + sy});
      cell.x += sx;
      cell.y += sy;
      tx += dx;
      ty += dy;
      ++i;
    } else if (tx < ty) {
      if (tx > 1.0) break;
      cell.x += sx;
      tx += dx;
    } else {
      if (ty > 1.0) break;
      cell.y += sy;
      ty += dy;
    }
    out.push_back(cell);
  }
  return out;
}

bool line_of_sight(const WorldMap& map, Vec2 a, Vec2 b) {
  for (const Cell& c : supercover(map, a, b)) {
    if (map.is_wall(c)) return false;
  }
  return true;
}

bool cue_labels(const CuePlacement& cue, const Toponym& goal) {
  return std::any_of(cue.clauses.begin(), cue.clauses.end(), [&](const Clause& c) {
    const auto* loc = std::get_if<LocationalClause>(&c);
    return loc && loc->toponym == goal && is_label(*loc);
  });
}

namespace {

Error schema(const std::string& what) { return Error(ErrorCode::SchemaError, what); }

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw schema(std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const char* what) {
  if (!j.is_number()) throw schema(std::string(what) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw schema(std::string(what) + " must be finite");
  return v;
}

Vec2 point(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) throw schema(std::string(what) + " must be [x, y]");
  return {number(j[0], what), number(j[1], what)};
}

std::string text(const json& j, const char* what) {
  if (!j.is_string()) throw schema(std::string(what) + " must be a string");
  return j.get<std::string>();
}

HierarchyGraph parse_hierarchy(const json& j) {
  HierarchyGraph g;
  if (!j.is_object()) throw schema("'hierarchy' must be an object");
  for (const auto& n : field(j, "nodes")) {
    const json& level = field(n, "level");
    if (!level.is_number_integer()) throw schema("node level must be an integer");
    g.set_node(Toponym(text(field(n, "name"), "node name")), level.get<int>());
  }
  for (const auto& e : field(j, "edges")) {
    if (!e.is_array() || e.size() != 2) throw schema("edge must be [parent, child]");
    g.add_edge(Toponym(text(e[0], "edge parent")), Toponym(text(e[1], "edge child")));
  }
  g.validate();
  return g;
}

}  // namespace

Scenario load_world(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw schema(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw schema("scenario must be a JSON object");

  std::vector<std::string> rows;
  const json& grid = field(doc, "grid");
  if (!grid.is_array()) throw schema("'grid' must be an array of strings");
  for (const auto& r : grid) rows.push_back(text(r, "grid row"));
  const double resolution =
      doc.contains("resolution") ? number(doc["resolution"], "resolution") : kDefaultResolution;
  const Vec2 origin = doc.contains("origin") ? point(doc["origin"], "origin") : Vec2{};

  Scenario s{doc.contains("name") ? text(doc["name"], "name") : std::string("unnamed"),
             WorldMap(rows, resolution, origin),
             {},
             {},
             point(field(doc, "robot_start"), "robot_start"),
             {}};
  if (s.map.is_wall(s.map.cell_at(s.robot_start))) throw schema("robot_start is not on a free cell");
  if (doc.contains("hierarchy")) s.hierarchy = parse_hierarchy(doc["hierarchy"]);

  for (const auto& c : field(doc, "cues")) {
    CuePlacement cue;
    cue.id = text(field(c, "id"), "cue id");
    cue.position = point(field(c, "pos"), "cue pos");
    cue.heading = c.contains("heading") ? number(c["heading"], "cue heading") : 0.0;
    cue.clauses = clauses_from_json(field(c, "clauses"));
    if (std::any_of(s.cues.begin(), s.cues.end(),
                    [&](const CuePlacement& other) { return other.id == cue.id; })) {
      throw schema("duplicate cue id '" + cue.id + "'");
    }
    if (s.map.is_wall(s.map.cell_at(cue.position))) {
      throw Error(ErrorCode::CueOnWall, "cue '" + cue.id + "' sits on a wall");
    }
    s.cues.push_back(std::move(cue));
  }

  for (const auto& g : field(doc, "goals")) {
    Toponym goal(text(g, "goal"));
    const bool labelled = std::any_of(s.cues.begin(), s.cues.end(),
                                      [&](const CuePlacement& cue) { return cue_labels(cue, goal); });
    if (!labelled) {
      throw Error(ErrorCode::GoalUnreachableByLabel, "no cue labels goal '" + goal.str() + "'");
    }
    s.goals.push_back(std::move(goal));
  }
  return s;
}

Scenario load_world_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw schema("cannot open scenario '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_world(buf.str());
}

RobotState RobotState::start(const WorldMap& map, Vec2 position) {
  RobotState r;
  r.position = position;
  r.explored.assign(map.cell_count(), 0);
  return r;
}

bool cue_detectable(const WorldMap& map, Vec2 from, Vec2 cue) {
  return norm(cue - from) <= kSensorRange && line_of_sight(map, from, cue);
}

CueObservation observe(const CuePlacement& cue) {
  CueObservation obs{cue.id, cue.position, cue.heading, {}};
  for (const Clause& c : cue.clauses) {
    if (const auto* loc = std::get_if<LocationalClause>(&c); loc && loc->frame == Frame::Cue) {
      LocationalClause world = *loc;
      const Vec2 p = cue.position + rotate({loc->x, loc->y}, cue.heading);
      world.frame = Frame::World;
      world.x = p.x;
      world.y = p.y;
      if (world.theta) world.theta = wrap_angle(*world.theta + cue.heading);
      obs.clauses.emplace_back(std::move(world));
    } else {
      obs.clauses.push_back(c);
    }
  }
  return obs;
}

SenseResult sense(const WorldMap& map, std::span<const CuePlacement> cues, RobotState& robot) {
  SenseResult out;
  auto mark = [&](Cell c) {
    auto& e = robot.explored[map.linear(c)];
    if (e == 0) {
      e = 1;
      out.newly_explored.push_back(c);
    }
  };
  for (int deg = 0; deg < 360; ++deg) {
    const Vec2 end = robot.position + kSensorRange * unit_from_heading(deg * kPi / 180.0);
    for (const Cell& c : supercover(map, robot.position, end)) {
      if (!map.in_bounds(c)) break;
      mark(c);
      if (map.is_wall(c)) break;
    }
  }
  for (const CuePlacement& cue : cues) {
    if (robot.observed_cues.contains(cue.id)) continue;
    if (!cue_detectable(map, robot.position, cue.position)) continue;
    robot.observed_cues.insert(cue.id);
    out.observations.push_back(observe(cue));
  }
  return out;
}

std::optional<Vec2> centre_of_explored_mass(const WorldMap& map, const RobotState& robot) {
  Vec2 sum;
  std::size_t count = 0;
  for (std::size_t i = 0; i < robot.explored.size(); ++i) {
    if (robot.explored[i] == 0) continue;
    sum += map.centre_of(map.from_linear(i));
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

struct Neighbour {
  int dx, dy;
  double cost;
};
constexpr Neighbour kNeighbours[8] = {{1, 0, 1.0},   {-1, 0, 1.0},   {0, 1, 1.0},
                                      {0, -1, 1.0},  {1, 1, kSqrt2}, {1, -1, kSqrt2},
                                      {-1, 1, kSqrt2}, {-1, -1, kSqrt2}};

double octile(Cell a, Cell b) {
  const double dx = std::abs(a.x - b.x), dy = std::abs(a.y - b.y);
  return std::max(dx, dy) + (kSqrt2 - 1.0) * std::min(dx, dy);
}

// Best-first search over `passable` cells in cell units. With `goal` set the
// octile heuristic guides it (A*); otherwise it is Dijkstra over everything
// reachable. Returns g-costs and parents.
struct SearchResult {
  std::vector<double> cost;
  std::vector<std::size_t> parent;
  bool reached = false;
};

SearchResult grid_search(const WorldMap& map, Cell start, std::optional<Cell> goal,
                         const std::vector<std::uint8_t>& passable) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  SearchResult res{std::vector<double>(map.cell_count(), kInf),
                   std::vector<std::size_t>(map.cell_count(), kNone), false};
  auto ok = [&](Cell c) { return map.in_bounds(c) && passable[map.linear(c)] != 0; };
  if (!ok(start)) return res;

  using Item = std::tuple<double, std::size_t>;  // (f, linear index); index breaks ties
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  std::vector<std::uint8_t> closed(map.cell_count(), 0);
  const std::size_t s = map.linear(start);
  res.cost[s] = 0.0;
  open.emplace(goal ? octile(start, *goal) : 0.0, s);
  while (!open.empty()) {
    const auto [f, i] = open.top();
    open.pop();
    if (closed[i]) continue;
    closed[i] = 1;
    const Cell c = map.from_linear(i);
    if (goal && c == *goal) {
      res.reached = true;
      return res;
    }
    for (const auto& n : kNeighbours) {
      const Cell next{c.x + n.dx, c.y + n.dy};
      if (!ok(next)) continue;
      if (n.dx != 0 && n.dy != 0 && (!ok({c.x + n.dx, c.y}) || !ok({c.x, c.y + n.dy}))) continue;
      const std::size_t j = map.linear(next);
      const double g = res.cost[i] + n.cost;
      if (g < res.cost[j]) {
        res.cost[j] = g;
        res.parent[j] = i;
        open.emplace(g + (goal ? octile(next, *goal) : 0.0), j);
      }
    }
  }
  return res;
}

std::vector<Cell> trace_back(const WorldMap& map, const SearchResult& res, Cell goal) {
  std::vector<Cell> path;
  std::size_t i = map.linear(goal);
  while (i != std::numeric_limits<std::size_t>::max()) {
    path.push_back(map.from_linear(i));
    i = res.parent[i];
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

std::vector<Cell> astar(const WorldMap& map, Cell start, Cell goal,
                        const std::vector<std::uint8_t>& passable) {
  const SearchResult res = grid_search(map, start, goal, passable);
  if (!res.reached) return {};
  return trace_back(map, res, goal);
}

std::vector<double> path_costs(const WorldMap& map, Cell start,
                               const std::vector<std::uint8_t>& passable) {
  return grid_search(map, start, std::nullopt, passable).cost;
}

double path_length(const std::vector<Cell>& path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const bool diagonal = path[i].x != path[i - 1].x && path[i].y != path[i - 1].y;
    len += diagonal ? kSqrt2 : 1.0;
  }
  return len;
}

std::vector<std::uint8_t> plannable_cells(const WorldMap& map, const RobotState& robot) {
  std::vector<std::uint8_t> passable(map.cell_count(), 1);
  for (std::size_t i = 0; i < passable.size(); ++i) {
    if (robot.explored[i] != 0 && map.is_wall(map.from_linear(i))) passable[i] = 0;
  }
  return passable;
}

PlanStep plan_step(const WorldMap& map, const RobotState& robot, Vec2 target) {
  if (!is_finite(target)) throw Error(ErrorCode::NonFinite, "plan target must be finite");
  const std::vector<std::uint8_t> passable = plannable_cells(map, robot);
  const Cell start = map.cell_at(robot.position);
  auto ok = [&](Cell c) { return map.in_bounds(c) && passable[map.linear(c)] != 0; };

  bool boxed = true;
  for (const auto& n : kNeighbours) {
    const Cell next{start.x + n.dx, start.y + n.dy};
    if (ok(next) && (n.dx == 0 || n.dy == 0 || (ok({start.x + n.dx, start.y}) &&
                                                 ok({start.x, start.y + n.dy})))) {
      boxed = false;
      break;
    }
  }

  const Cell goal_cell = map.cell_at(target);
  PlanStep step;
  if (goal_cell == start) {
    step.waypoint = target;
    step.path = {start};
    return step;
  }
  if (boxed) throw Error(ErrorCode::NoProgress, "robot is boxed in");

  SearchResult res;
  Cell goal = goal_cell;
  if (ok(goal_cell)) res = grid_search(map, start, goal_cell, passable);
  if (!res.reached) {
    // Unreachable target: head for the reachable cell nearest to it.
    res = grid_search(map, start, std::nullopt, passable);
    double best = std::numeric_limits<double>::infinity();
    double best_cost = best;
    for (std::size_t i = 0; i < res.cost.size(); ++i) {
      if (!std::isfinite(res.cost[i])) continue;
      const double d = norm(map.centre_of(map.from_linear(i)) - target);
      if (d < best - 1e-9 || (d < best + 1e-9 && res.cost[i] < best_cost)) {
        best = d;
        best_cost = res.cost[i];
        goal = map.from_linear(i);
      }
    }
    if (goal == start) {
      step.waypoint = robot.position;
      step.at_closest_approach = true;
      step.path = {start};
      return step;
    }
  }
  step.path = trace_back(map, res, goal);
  if (goal == goal_cell) {
    const auto direct = supercover(map, robot.position, target);
    if (std::all_of(direct.begin(), direct.end(), ok)) {
      step.waypoint = target;
      return step;
    }
  }

  // Look ahead along the path for the farthest cell in plain view.
  constexpr std::size_t kLookahead = 12;
  std::size_t pick = 1;
  for (std::size_t k = 2; k < step.path.size() && k <= kLookahead; ++k) {
    const Vec2 c = map.centre_of(step.path[k]);
    const auto cells = supercover(map, robot.position, c);
    if (!std::all_of(cells.begin(), cells.end(), ok)) break;
    pick = k;
  }
  step.waypoint = step.path[pick] == goal_cell ? target : map.centre_of(step.path[pick]);
  return step;
}

AdvanceResult advance_robot(const WorldMap& map, RobotState& robot, Vec2 waypoint, double dt,
                            double max_distance) {
  AdvanceResult out;
  const Vec2 delta = waypoint - robot.position;
  const double dist = norm(delta);
  const double reach = std::min({kRobotSpeed * dt, dist, std::max(0.0, max_distance)});
  if (!(reach > 1e-12)) return out;
  const Vec2 dir = delta / dist;
  Vec2 dest = robot.position + reach * dir;

  for (const Cell& c : supercover(map, robot.position, dest)) {
    if (!map.is_wall(c)) continue;
    // Stop just short of the wall cell's boundary.
    const double res = map.resolution();
    const Vec2 lo = map.origin() + res * Vec2{double(c.x), double(c.y)};
    const Vec2 hi = lo + Vec2{res, res};
    double t_enter = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
      const double p = axis == 0 ? robot.position.x : robot.position.y;
      const double d = axis == 0 ? dir.x : dir.y;
      const double l = axis == 0 ? lo.x : lo.y;
      const double h = axis == 0 ? hi.x : hi.y;
      if (std::abs(d) < 1e-15) continue;
      const double t0 = std::min((l - p) / d, (h - p) / d);
      t_enter = std::max(t_enter, t0);
    }
    const double travel = std::clamp(t_enter - 1e-6, 0.0, reach);
    dest = robot.position + travel * dir;
    if (map.is_wall(map.cell_at(dest))) dest = robot.position;
    robot.explored[map.linear(c)] = 1;
    out.touched_wall = c;
    break;
  }
  out.displacement = norm(dest - robot.position);
  robot.position = dest;
  robot.odometry += out.displacement;
  if (out.displacement > 0.0) robot.heading = heading_of(dir);
  return out;
}

}  // namespace amap
