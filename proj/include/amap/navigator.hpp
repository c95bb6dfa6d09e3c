#pragma once
// Trial control loop: move towards the imagined goal, fold in cue
// observations, widen the model when the goal is not where it was expected.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "amap/abstract_map.hpp"
#include "amap/solver.hpp"
#include "amap/trace.hpp"
#include "amap/world.hpp"

namespace amap {

struct TrialConfig {
  Toponym goal{"goal"};
  double goal_reach_radius = 1.0;  // m
  double distance_budget = 500.0;  // m
  std::uint64_t seed = 0;

  void validate() const;
};

struct CueRecord {
  std::string cue_id;
  double odometry = 0.0;
};

struct TrialResult {
  bool success = false;
  double distance = 0.0;
  std::vector<CueRecord> cue_observations;
  int exploration_steps_fired = 0;
  double elapsed_sim_time = 0.0;
  double final_exploration_factor = 1.0;
  std::string termination;  // "goal-observed", "distance-budget", "no-progress", ...
};

struct TrialOutcome {
  TrialResult result;
  std::vector<TraceEvent> trace;
};

TrialOutcome run_trial(const Scenario& scenario, const TrialConfig& trial,
                       SolverConfig solver = {});

// Full-knowledge optimum: shortest path from the start to any point from
// which a label of `goal` is detectable.
double optimal_distance(const Scenario& scenario, const Toponym& goal);

}  // namespace amap
