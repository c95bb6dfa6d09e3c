#include "amap/model.hpp"

#include <cmath>
#include <string>

#include "amap/error.hpp"

namespace amap {

std::size_t SystemState::add(PointMass mass) {
  if (index_.contains(mass.toponym)) {
    throw Error(ErrorCode::InvalidSpring, "'" + mass.toponym.str() + "' registered twice");
  }
  const std::size_t i = masses_.size();
  index_.emplace(mass.toponym, i);
  if (mass.fixed) mass.velocity = {};
  masses_.push_back(std::move(mass));
  return i;
}

std::optional<std::size_t> SystemState::index_of(const Toponym& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void validate_spring(const SpringSpec& spring, const SystemState& state) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidSpring, what); };
  if (!(spring.stiffness > 0.0) || !std::isfinite(spring.stiffness)) fail("stiffness must be > 0");
  if (spring.origin == SpringOrigin::Observation) {
    if (spring.stiffness != kObservationStiffness) fail("observation springs have K = 2.5");
  } else if (spring.stiffness > 1.0) {
    fail("non-observation springs have K <= 1");
  }
  if (!std::isfinite(spring.natural)) fail("natural value must be finite");
  if (spring.kind == SpringKind::Distance) {
    if (spring.natural < 0.0) fail("natural length must be >= 0");
  } else if (!(spring.natural > -kPi && spring.natural <= kPi)) {
    fail("natural angle must lie in (-pi, pi]");
  }
  const std::size_t n = spring.endpoint_count();
  for (std::size_t i = 0; i < n; ++i) {
    if (spring.endpoints[i] >= state.size()) fail("endpoint index out of range");
    for (std::size_t j = 0; j < i; ++j) {
      if (spring.endpoints[i] == spring.endpoints[j]) fail("endpoints must be distinct");
    }
  }
}

namespace {

Vec2 pos(std::span<const PointMass> masses, std::size_t i) { return masses[i].position; }

// Smoothstep in r^2 / rho^2: zero at the vertex, one from the core radius out.
struct Core {
  double s = 1.0;
  double ds_dr2 = 0.0;
};

Core core(double r2) {
  constexpr double rho2 = kAngleCoreRadius * kAngleCoreRadius;
  const double x = r2 / rho2;
  if (x >= 1.0) return {};
  return {x * x * (3.0 - 2.0 * x), 6.0 * x * (1.0 - x) / rho2};
}

}  // namespace

double spring_measure(const SpringSpec& spring, std::span<const PointMass> masses) {
  const Vec2 a = pos(masses, spring.endpoints[0]);
  const Vec2 b = pos(masses, spring.endpoints[1]);
  switch (spring.kind) {
    case SpringKind::Distance:
      return norm(a - b);
    case SpringKind::AbsoluteAngle:
      return heading_of(a - b);
    case SpringKind::RelativeAngle: {
      const Vec2 u = pos(masses, spring.endpoints[2]) - b;
      const Vec2 v = a - b;
      return std::atan2(cross(u, v), dot(u, v));
    }
  }
  return 0.0;
}

double spring_potential(const SpringSpec& spring, std::span<const PointMass> masses) {
  const double measured = spring_measure(spring, masses);
  const double error = spring.kind == SpringKind::Distance
                           ? measured - spring.natural
                           : wrap_angle(measured - spring.natural);
  double scale = 1.0;
  if (spring.kind != SpringKind::Distance) {
    const Vec2 b = pos(masses, spring.endpoints[1]);
    scale = core(norm2(pos(masses, spring.endpoints[0]) - b)).s;
    if (spring.kind == SpringKind::RelativeAngle) {
      scale *= core(norm2(pos(masses, spring.endpoints[2]) - b)).s;
    }
  }
  return 0.5 * spring.stiffness * error * error * scale;
}

SpringForces spring_force(const SpringSpec& spring, std::span<const PointMass> masses) {
  SpringForces out;
  out.count = spring.endpoint_count();
  const double k = spring.stiffness;
  const Vec2 a = pos(masses, spring.endpoints[0]);
  const Vec2 b = pos(masses, spring.endpoints[1]);

  switch (spring.kind) {
    case SpringKind::Distance: {
      const Vec2 d = b - a;
      const double len = norm(d);
      Vec2 fa;
      if (len >= kSeparationEpsilon) {
        fa = k * (1.0 - spring.natural / len) * d;
      } else if (spring.natural == 0.0) {
        fa = k * d;
      }
      out.force[0] = fa;
      out.force[1] = -fa;
      break;
    }
    case SpringKind::AbsoluteAngle: {
      const Vec2 d = a - b;
      const double len2 = norm2(d);
      if (len2 < kSeparationEpsilon * kSeparationEpsilon) break;
      const double error = wrap_angle(heading_of(d) - spring.natural);
      const Core c = core(len2);
      const Vec2 fa = (-k * error * c.s / len2) * perp(d) - (k * error * error * c.ds_dr2) * d;
      out.force[0] = fa;
      out.force[1] = -fa;
      break;
    }
    case SpringKind::RelativeAngle: {
      const Vec2 u = pos(masses, spring.endpoints[2]) - b;
      const Vec2 v = a - b;
      const double u2 = norm2(u);
      const double v2 = norm2(v);
      const double eps2 = kSeparationEpsilon * kSeparationEpsilon;
      if (u2 < eps2 || v2 < eps2) break;
      const double error = wrap_angle(std::atan2(cross(u, v), dot(u, v)) - spring.natural);
      const Core cu = core(u2);
      const Core cv = core(v2);
      const double s = cu.s * cv.s;
      const Vec2 fa = (-k * error * s / v2) * perp(v) - (k * error * error * cu.s * cv.ds_dr2) * v;
      const Vec2 fc = (k * error * s / u2) * perp(u) - (k * error * error * cv.s * cu.ds_dr2) * u;
      out.force[0] = fa;
      out.force[2] = fc;
      out.force[1] = -(fa + fc);
      break;
    }
  }
  return out;
}

Vec2 friction_force(const PointMass& mass, const Dynamics& dynamics) {
  if (mass.fixed) return {};
  return -dynamics.friction * mass.velocity;
}

Vec2 expansion_force(const PointMass& mass, std::optional<Vec2> centre, const Dynamics& dynamics) {
  if (!centre || mass.fixed) return {};
  const Vec2 offset = mass.position - *centre;
  const double dist = norm(offset);
  if (dist == 0.0) return {};
  const double r = dynamics.expansion_radius;
  if (dist <= r) return dynamics.expansion * offset;
  if (dist >= 2.0 * r) return {};
  return (dynamics.expansion * (2.0 * r - dist) / dist) * offset;
}

std::vector<Vec2> motion_model(double /*t*/, std::span<const PointMass> masses,
                               std::span<const SpringSpec> springs, std::optional<Vec2> centre,
                               const Dynamics& dynamics) {
  std::vector<Vec2> force(masses.size());
  for (const SpringSpec& s : springs) {
    const SpringForces f = spring_force(s, masses);
    for (std::size_t e = 0; e < f.count; ++e) force[s.endpoints[e]] += f.force[e];
  }
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const PointMass& m = masses[i];
    if (m.fixed) {
      force[i] = {};
      continue;
    }
    force[i] += friction_force(m, dynamics) + expansion_force(m, centre, dynamics);
    force[i] = force[i] / m.mass;
  }
  return force;
}

Energy total_energy(std::span<const PointMass> masses, std::span<const SpringSpec> springs) {
  Energy e;
  for (const PointMass& m : masses) {
    if (!m.fixed) e.kinetic += 0.5 * m.mass * norm2(m.velocity);
  }
  for (const SpringSpec& s : springs) e.potential += spring_potential(s, masses);
  return e;
}

}  // namespace amap
