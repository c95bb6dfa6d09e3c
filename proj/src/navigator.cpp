#include "amap/navigator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "amap/error.hpp"

namespace amap {

void TrialConfig::validate() const {
  if (!(goal_reach_radius > 0.0) || !std::isfinite(goal_reach_radius)) {
    throw Error(ErrorCode::InvalidConfig, "goal_reach_radius must be > 0");
  }
  if (!(distance_budget > 0.0) || !std::isfinite(distance_budget)) {
    throw Error(ErrorCode::InvalidConfig, "distance_budget must be > 0");
  }
}

namespace {

constexpr int kIdleRearmTicks = 10;
constexpr int kStuckTicks = 3000;

bool labels_goal(const CueObservation& obs, const Toponym& goal) {
  return std::any_of(obs.clauses.begin(), obs.clauses.end(), [&](const Clause& c) {
    const auto* loc = std::get_if<LocationalClause>(&c);
    return loc && loc->toponym == goal && is_label(*loc);
  });
}

// Nearest unexplored cell the robot could try to reach.
std::optional<Vec2> frontier_target(const WorldMap& map, const RobotState& robot) {
  const auto passable = plannable_cells(map, robot);
  const auto cost = path_costs(map, map.cell_at(robot.position), passable);
  double best = std::numeric_limits<double>::infinity();
  std::optional<Vec2> out;
  for (std::size_t i = 0; i < cost.size(); ++i) {
    if (robot.explored[i] == 0 && cost[i] < best) {
      best = cost[i];
      out = map.centre_of(map.from_linear(i));
    }
  }
  return out;
}

class Trial {
 public:
  Trial(const Scenario& scenario, const TrialConfig& trial, const SolverConfig& solver)
      : scenario_(scenario),
        map_(scenario.map),
        trial_(trial),
        amap_(solver),
        robot_(RobotState::start(scenario.map, scenario.robot_start)) {}

  TrialOutcome run();

 private:
  double now() const { return static_cast<double>(tick_) * kControlTick; }
  void record_imagination() {
    out_.trace.push_back(imagine_event(now(), amap_));
    out_.trace.push_back(energy_event(now(), amap_));
  }
  void finish(bool success, std::string reason) {
    out_.result.success = success;
    out_.result.distance = robot_.odometry;
    out_.result.elapsed_sim_time = now();
    out_.result.final_exploration_factor = amap_.exploration().value();
    out_.result.termination = reason;
    out_.trace.push_back(goal_event(now(), success, robot_.odometry, reason));
  }
  // True when the goal label was seen.
  bool sense_and_observe();
  void update_centre(const std::vector<Cell>& cells) {
    for (const Cell& c : cells) {
      centre_sum_ += map_.centre_of(c);
      ++centre_count_;
    }
    if (centre_count_ > 0) {
      amap_.set_explored_centre(centre_sum_ / static_cast<double>(centre_count_));
    }
  }
  bool plan_stale(const std::vector<Cell>& new_cells, Vec2 target) const;

  const Scenario& scenario_;
  const WorldMap& map_;
  TrialConfig trial_;
  AbstractMap amap_;
  RobotState robot_;
  TrialOutcome out_;
  std::size_t tick_ = 0;
  Vec2 centre_sum_;
  std::size_t centre_count_ = 0;

  std::optional<PlanStep> plan_;
  Vec2 plan_target_;
};

bool Trial::sense_and_observe() {
  SenseResult s = sense(map_, scenario_.cues, robot_);
  update_centre(s.newly_explored);
  bool found = false;
  for (const CueObservation& obs : s.observations) {
    out_.result.cue_observations.push_back({obs.cue_id, robot_.odometry});
    out_.trace.push_back(cue_event(now(), obs, robot_.odometry));
    amap_.observe_cue(obs);
    record_imagination();
    if (labels_goal(obs, trial_.goal)) found = true;
  }
  if (!s.newly_explored.empty() && plan_ && plan_stale(s.newly_explored, plan_target_)) {
    plan_.reset();
  }
  return found;
}

bool Trial::plan_stale(const std::vector<Cell>& new_cells, Vec2 target) const {
  (void)target;
  std::vector<Cell> walls;
  for (const Cell& c : new_cells) {
    if (map_.is_wall(c)) walls.push_back(c);
  }
  if (walls.empty()) return false;
  std::sort(walls.begin(), walls.end());
  auto blocked = [&](const Cell& c) { return std::binary_search(walls.begin(), walls.end(), c); };
  if (std::any_of(plan_->path.begin(), plan_->path.end(), blocked)) return true;
  const auto seg = supercover(map_, robot_.position, plan_->waypoint);
  return std::any_of(seg.begin(), seg.end(), blocked);
}

TrialOutcome Trial::run() {
  out_.trace.push_back(world_event(scenario_, trial_.goal, trial_.seed));
  out_.trace.push_back(pose_event(0.0, robot_));
  const double budget = trial_.distance_budget;
  const double step = kRobotSpeed * kControlTick;
  const std::size_t tick_cap = static_cast<std::size_t>(std::ceil(budget / step)) * 4 + 10000;

  try {
    if (!scenario_.hierarchy.nodes().empty()) {
      amap_.preload_hierarchy(scenario_.hierarchy);
      record_imagination();
    }

    bool armed = true;
    Vec2 arrival_goal;
    int idle = 0;
    int stuck = 0;
    for (;; ++tick_) {
      const std::size_t cues_before = out_.result.cue_observations.size();
      if (sense_and_observe()) {
        finish(true, "goal-observed");
        return std::move(out_);
      }
      if (out_.result.cue_observations.size() != cues_before) armed = true;

      std::optional<Vec2> target;
      bool goal_known = amap_.knows(trial_.goal);
      if (goal_known) {
        target = amap_.imagined_location(trial_.goal);
        if (!armed && norm(*target - arrival_goal) > trial_.goal_reach_radius) armed = true;
      } else {
        target = frontier_target(map_, robot_);
        if (!target) throw Error(ErrorCode::NoProgress, "nothing left to explore");
      }

      if (!plan_ || norm(*target - plan_target_) > 1e-9 ||
          norm(plan_->waypoint - robot_.position) < 1e-9) {
        plan_ = plan_step(map_, robot_, *target);
        plan_target_ = *target;
      }

      if (goal_known) {
        const bool arrived = norm(robot_.position - *target) <= trial_.goal_reach_radius ||
                             plan_->at_closest_approach;
        if (arrived && !armed && ++idle >= kIdleRearmTicks) armed = true;
        if (arrived && armed) {
          amap_.on_goal_not_found();
          ++out_.result.exploration_steps_fired;
          arrival_goal = *target;
          armed = false;
          idle = 0;
          const Vec2 moved = amap_.imagined_location(trial_.goal);
          out_.trace.push_back(exploration_event(now(), amap_, moved));
          record_imagination();
          plan_ = plan_step(map_, robot_, moved);
          plan_target_ = moved;
        }
      }

      const AdvanceResult adv =
          advance_robot(map_, robot_, plan_->waypoint, kControlTick, budget - robot_.odometry);
      if (adv.touched_wall) plan_.reset();
      if (adv.displacement > 0.0) {
        stuck = 0;
        out_.trace.push_back(pose_event(static_cast<double>(tick_ + 1) * kControlTick, robot_));
      } else if (++stuck >= kStuckTicks) {
        throw Error(ErrorCode::NoProgress, "robot made no progress");
      }
      if (robot_.odometry >= budget - 1e-9) {
        ++tick_;
        finish(false, "distance-budget");
        return std::move(out_);
      }
      if (tick_ >= tick_cap) {
        ++tick_;
        finish(false, "tick-limit");
        return std::move(out_);
      }
    }
  } catch (const Error& e) {
    ++tick_;
    if (e.code() == ErrorCode::NoProgress) {
      finish(false, "no-progress");
    } else if (e.code() == ErrorCode::NonFiniteState) {
      finish(false, "non-finite-state");
    } else {
      throw;
    }
  }
  return std::move(out_);
}

}  // namespace

TrialOutcome run_trial(const Scenario& scenario, const TrialConfig& trial, SolverConfig solver) {
  trial.validate();
  solver.rng_seed = trial.seed;
  solver.validate();
  Trial t(scenario, trial, solver);
  return t.run();
}

double optimal_distance(const Scenario& scenario, const Toponym& goal) {
  const WorldMap& map = scenario.map;
  std::vector<std::uint8_t> free(map.cell_count(), 0);
  for (std::size_t i = 0; i < free.size(); ++i) free[i] = map.is_wall(map.from_linear(i)) ? 0 : 1;
  const auto cost = path_costs(map, map.cell_at(scenario.robot_start), free);

  double best = std::numeric_limits<double>::infinity();
  const int reach = static_cast<int>(std::ceil(kSensorRange / map.resolution())) + 1;
  for (const CuePlacement& cue : scenario.cues) {
    if (!cue_labels(cue, goal)) continue;
    if (cue_detectable(map, scenario.robot_start, cue.position)) return 0.0;
    const Cell centre = map.cell_at(cue.position);
    for (int dy = -reach; dy <= reach; ++dy) {
      for (int dx = -reach; dx <= reach; ++dx) {
        const Cell c{centre.x + dx, centre.y + dy};
        if (map.is_wall(c) || !std::isfinite(cost[map.linear(c)])) continue;
        if (!cue_detectable(map, map.centre_of(c), cue.position)) continue;
        best = std::min(best, cost[map.linear(c)] * map.resolution());
      }
    }
  }
  return best;
}

}  // namespace amap
