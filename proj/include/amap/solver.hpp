#pragma once
// Numerical integration of the spring-mass system: settling detection,
// imagination and placement of new point masses.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "amap/model.hpp"

namespace amap {

// Local error control inside one integration step.
struct StepControl {
  double tolerance = 1e-6;  // m and m/s
  int max_halvings = 12;
};

struct SolverConfig {
  double step = 0.02;               // s
  double accel_threshold = 0.1;     // L_a, m/s^2
  double velocity_threshold = 0.1;  // L_v, m/s
  double max_sim_time = 300.0;      // s
  // Once settled, integration continues until both thresholds scaled by
  // refine_ratio hold, for at most refine_time more seconds.
  double refine_ratio = 0.01;
  double refine_time = 300.0;  // s
  int placement_descent_steps = 200;
  double placement_learning_rate = 0.05;  // m per N
  double placement_jitter = 0.1;          // m
  std::uint64_t rng_seed = 0;
  Dynamics dynamics{};
  StepControl control{};

  // Throws InvalidConfig.
  void validate() const;
};

// Advances free masses by h with classical RK4, split into smaller RK4
// steps wherever step doubling reports a local error above the tolerance.
// Throws NonFiniteState when the result diverges.
SystemState rk4_step(double t, const SystemState& state, std::span<const SpringSpec> springs,
                     std::optional<Vec2> centre, double h, const Dynamics& dynamics = {},
                     const StepControl& control = {});

// Every free mass below both the acceleration and velocity thresholds.
bool settled(const SystemState& state, std::span<const Vec2> accelerations,
             const SolverConfig& cfg = {});

struct EnergySample {
  double t = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
};

struct ImagineResult {
  SystemState state;
  bool settled = false;
  std::size_t steps = 0;
  double sim_time = 0.0;
  std::vector<EnergySample> energy;
};

// Integrates until settled or max_sim_time elapses, then refines (see
// SolverConfig). Timeout is reported via `settled == false`, not thrown.
ImagineResult imagine(const SystemState& initial, std::span<const SpringSpec> springs,
                      std::optional<Vec2> centre, const SolverConfig& cfg = {});

// A spring whose endpoints are still named rather than indexed, used while
// new toponyms are being registered.
struct SpringDraft {
  SpringKind kind = SpringKind::Distance;
  std::vector<Toponym> endpoints;
  double stiffness = 1.0;
  double natural = 0.0;
  SpringOrigin origin = SpringOrigin::Template;
};

// Position for `index` minimising the potential of its attached springs,
// considering only springs whose other endpoints are placed. The descent
// starts at the centroid of placed neighbours, nudged by the jitter distance
// away from `centre` when given and in a seeded random direction otherwise.
Vec2 initial_placement(std::size_t index, std::span<const SpringSpec> springs,
                       const SystemState& state, const std::vector<bool>& placed,
                       const SolverConfig& cfg = {}, std::optional<Vec2> centre = std::nullopt);

// Places `candidates` (treated as unplaced) one at a time. Masses with any
// non-hierarchy spring go first, in descending order of attached stiffness
// (ties by name); masses held only by hierarchy springs follow, each time
// picking the one most stiffly linked to already placed masses.
std::vector<Toponym> place_masses(std::span<const std::size_t> candidates,
                                  std::span<const SpringSpec> springs, SystemState& state,
                                  const SolverConfig& cfg = {},
                                  std::optional<Vec2> centre = std::nullopt);

// Appends springs and registers new toponyms, then places them together with
// the existing masses listed in `reposition`. Other masses are never moved.
// Returns the placement order.
std::vector<Toponym> add_clauses(std::span<const SpringDraft> drafts, SystemState& state,
                                 std::vector<SpringSpec>& springs, const SolverConfig& cfg = {},
                                 std::span<const std::size_t> reposition = {},
                                 std::optional<Vec2> centre = std::nullopt);

}  // namespace amap
