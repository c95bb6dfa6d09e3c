#pragma once
// Point-mass / spring representation of an imagined spatial model and the
// force and energy terms of its motion model.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "amap/geometry.hpp"
#include "amap/grammar.hpp"

namespace amap {

inline constexpr double kPointMass = 1.0;            // kg
inline constexpr double kFrictionCoefficient = 0.1;  // N s / m
inline constexpr double kExpansionCoefficient = 0.01;  // N / m
inline constexpr double kObservationStiffness = 2.5;
inline constexpr double kHierarchyStiffness = 0.01;
inline constexpr double kSeparationEpsilon = 1e-6;  // m
// Angle springs fade out smoothly when an arm is shorter than this.
inline constexpr double kAngleCoreRadius = 0.25;  // m

struct PointMass {
  Toponym toponym;
  double mass = kPointMass;
  bool fixed = false;
  Vec2 position;
  Vec2 velocity;

  friend bool operator==(const PointMass&, const PointMass&) = default;
};

// Ordered point masses plus the toponym -> index map.
class SystemState {
 public:
  // Registers a new mass. Throws InvalidSpring if the toponym already exists.
  std::size_t add(PointMass mass);

  std::optional<std::size_t> index_of(const Toponym& name) const;
  bool contains(const Toponym& name) const { return index_.contains(name); }

  std::size_t size() const { return masses_.size(); }
  bool empty() const { return masses_.empty(); }

  PointMass& operator[](std::size_t i) { return masses_[i]; }
  const PointMass& operator[](std::size_t i) const { return masses_[i]; }

  std::span<PointMass> masses() { return masses_; }
  std::span<const PointMass> masses() const { return masses_; }

  friend bool operator==(const SystemState& a, const SystemState& b) {
    return a.masses_ == b.masses_;
  }

 private:
  std::vector<PointMass> masses_;
  std::map<Toponym, std::size_t> index_;
};

enum class SpringOrigin { Template, Hierarchy, Observation };

// Distance springs use endpoints[0..1] = (A, B). Absolute-angle springs
// measure the heading of A - B. Relative-angle springs measure the signed
// counter-clockwise angle at vertex B from (C - B) to (A - B). Within
// kAngleCoreRadius of the vertex an angle potential is scaled by
// 3x^2 - 2x^3, x = |arm|^2 / radius^2, per arm.
struct SpringSpec {
  SpringKind kind = SpringKind::Distance;
  std::array<std::size_t, 3> endpoints{};
  double stiffness = 1.0;
  double natural = 0.0;  // r_n (m) or theta_n (rad)
  SpringOrigin origin = SpringOrigin::Template;

  std::size_t endpoint_count() const { return kind == SpringKind::RelativeAngle ? 3 : 2; }
};

// Throws InvalidSpring when the spring breaks its invariants for `state`.
void validate_spring(const SpringSpec& spring, const SystemState& state);

struct SpringForces {
  std::array<Vec2, 3> force{};
  std::size_t count = 2;
};

// Measured quantity of the spring: length, heading, or relative angle.
double spring_measure(const SpringSpec& spring, std::span<const PointMass> masses);
double spring_potential(const SpringSpec& spring, std::span<const PointMass> masses);
// Exact negative gradient of spring_potential, per endpoint in order.
SpringForces spring_force(const SpringSpec& spring, std::span<const PointMass> masses);

inline SpringForces spring_force(const SpringSpec& spring, const SystemState& state) {
  return spring_force(spring, state.masses());
}

struct Dynamics {
  double friction = kFrictionCoefficient;
  double expansion = kExpansionCoefficient;
  // Beyond this distance from the centre the expansion force stops growing.
  // Expansion grows linearly out to this radius, then tapers to zero at twice it.
  double expansion_radius = 5.0;  // m
};

Vec2 friction_force(const PointMass& mass, const Dynamics& dynamics = {});

// Pushes a free mass away from the centre of explored mass: c * offset within
// expansion_radius, tapering linearly to zero at twice that radius.
Vec2 expansion_force(const PointMass& mass, std::optional<Vec2> centre,
                     const Dynamics& dynamics = {});

// Accelerations for every mass (zero for fixed ones). The model is
// time-invariant; `t` mirrors the f(t, x) signature.
std::vector<Vec2> motion_model(double t, std::span<const PointMass> masses,
                               std::span<const SpringSpec> springs,
                               std::optional<Vec2> centre, const Dynamics& dynamics = {});

struct Energy {
  double kinetic = 0.0;
  double potential = 0.0;
  double total() const { return kinetic + potential; }
};

Energy total_energy(std::span<const PointMass> masses, std::span<const SpringSpec> springs);

}  // namespace amap
