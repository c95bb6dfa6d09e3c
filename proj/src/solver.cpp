#include "amap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "amap/error.hpp"

namespace amap {

void SolverConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (!(step > 0.0)) fail("step must be > 0");
  if (!(accel_threshold > 0.0)) fail("acceleration threshold must be > 0");
  if (!(velocity_threshold > 0.0)) fail("velocity threshold must be > 0");
  if (!(max_sim_time >= step)) fail("max_sim_time must be >= step");
  if (!(refine_ratio > 0.0 && refine_ratio <= 1.0)) fail("refine_ratio must be in (0, 1]");
  if (!(refine_time >= 0.0)) fail("refine_time must be >= 0");
  if (placement_descent_steps < 0) fail("placement_descent_steps must be >= 0");
  if (!(placement_learning_rate > 0.0)) fail("placement_learning_rate must be > 0");
  if (!(control.tolerance > 0.0)) fail("step tolerance must be > 0");
  if (control.max_halvings < 0) fail("max_halvings must be >= 0");
}

namespace {

// Scratch buffers for RK4 stages, reused across steps of one run.
class Rk4 {
 public:
  Rk4(std::span<const SpringSpec> springs, std::optional<Vec2> centre, const Dynamics& dynamics)
      : springs_(springs), centre_(centre), dynamics_(dynamics) {}

  // Advances `masses` in place by h.
  void step(double t, std::vector<PointMass>& masses, double h) {
    const std::size_t n = masses.size();
    if (stage_.size() != n) stage_ = masses;
    x0_.resize(n);
    v0_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      x0_[i] = masses[i].position;
      v0_[i] = masses[i].velocity;
    }
    // k_i: (dx, dv) per mass.
    const auto a1 = motion_model(t, masses, springs_, centre_, dynamics_);
    const auto& v1 = v0_;

    load_stage(masses, v1, a1, 0.5 * h);
    const auto v2 = velocities();
    const auto a2 = motion_model(t + 0.5 * h, stage_, springs_, centre_, dynamics_);

    load_stage(masses, v2, a2, 0.5 * h);
    const auto v3 = velocities();
    const auto a3 = motion_model(t + 0.5 * h, stage_, springs_, centre_, dynamics_);

    load_stage(masses, v3, a3, h);
    const auto v4 = velocities();
    const auto a4 = motion_model(t + h, stage_, springs_, centre_, dynamics_);

    for (std::size_t i = 0; i < n; ++i) {
      PointMass& m = masses[i];
      if (m.fixed) continue;
      m.position = x0_[i] + (h / 6.0) * (v1[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
      m.velocity = v0_[i] + (h / 6.0) * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
      if (!is_finite(m.position) || !is_finite(m.velocity)) {
        throw Error(ErrorCode::NonFiniteState, "integration diverged at '" + m.toponym.str() + "'");
      }
    }
  }

 private:
  void load_stage(const std::vector<PointMass>& base, const std::vector<Vec2>& dx,
                  const std::vector<Vec2>& dv, double scale) {
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (base[i].fixed) continue;
      stage_[i].position = x0_[i] + scale * dx[i];
      stage_[i].velocity = v0_[i] + scale * dv[i];
    }
  }

  std::vector<Vec2> velocities() const {
    std::vector<Vec2> v(stage_.size());
    for (std::size_t i = 0; i < stage_.size(); ++i) {
      v[i] = stage_[i].fixed ? Vec2{} : stage_[i].velocity;
    }
    return v;
  }

  std::span<const SpringSpec> springs_;
  std::optional<Vec2> centre_;
  Dynamics dynamics_;
  std::vector<PointMass> stage_;
  std::vector<Vec2> x0_, v0_;
};

// Step doubling: one h step against two h/2 steps, halving again where they
// disagree by more than the tolerance.
void advance(Rk4& rk, double t, std::vector<PointMass>& masses, double h,
             const StepControl& control, int depth = 0) {
  std::vector<PointMass> full = masses;
  rk.step(t, full, h);
  std::vector<PointMass> half = masses;
  rk.step(t, half, 0.5 * h);
  rk.step(t + 0.5 * h, half, 0.5 * h);
  double err = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    err = std::max({err, norm(full[i].position - half[i].position),
                    norm(full[i].velocity - half[i].velocity)});
  }
  if (err <= control.tolerance || depth >= control.max_halvings) {
    masses = std::move(half);
    return;
  }
  advance(rk, t, masses, 0.5 * h, control, depth + 1);
  advance(rk, t + 0.5 * h, masses, 0.5 * h, control, depth + 1);
}

std::vector<PointMass> copy_masses(const SystemState& state) {
  return {state.masses().begin(), state.masses().end()};
}

void store_masses(SystemState& state, const std::vector<PointMass>& masses) {
  for (std::size_t i = 0; i < masses.size(); ++i) {
    state[i].position = masses[i].position;
    state[i].velocity = masses[i].velocity;
  }
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

SystemState rk4_step(double t, const SystemState& state, std::span<const SpringSpec> springs,
                     std::optional<Vec2> centre, double h, const Dynamics& dynamics,
                     const StepControl& control) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidConfig, "step must be > 0");
  std::vector<PointMass> masses = copy_masses(state);
  Rk4 rk(springs, centre, dynamics);
  advance(rk, t, masses, h, control);
  SystemState next = state;
  store_masses(next, masses);
  return next;
}

bool settled(const SystemState& state, std::span<const Vec2> accelerations,
             const SolverConfig& cfg) {
  for (std::size_t i = 0; i < state.size(); ++i) {
    const PointMass& m = state[i];
    if (m.fixed) continue;
    if (!(norm(accelerations[i]) < cfg.accel_threshold)) return false;
    if (!(norm(m.velocity) < cfg.velocity_threshold)) return false;
  }
  return true;
}

ImagineResult imagine(const SystemState& initial, std::span<const SpringSpec> springs,
                      std::optional<Vec2> centre, const SolverConfig& cfg) {
  cfg.validate();
  ImagineResult result{initial, false, 0, 0.0, {}};
  std::vector<PointMass> masses = copy_masses(initial);
  Rk4 rk(springs, centre, cfg.dynamics);
  SolverConfig fine = cfg;
  fine.accel_threshold *= cfg.refine_ratio;
  fine.velocity_threshold *= cfg.refine_ratio;
  double t = 0.0;
  double limit = cfg.max_sim_time;
  for (;;) {
    const auto acc = motion_model(t, masses, springs, centre, cfg.dynamics);
    const Energy e = total_energy(masses, springs);
    result.energy.push_back({t, e.kinetic, e.potential});
    store_masses(result.state, masses);
    if (!result.settled && settled(result.state, acc, cfg)) {
      result.settled = true;
      limit = std::min(cfg.max_sim_time, t + cfg.refine_time);
    }
    if (result.settled && settled(result.state, acc, fine)) break;
    if (t + 0.5 * cfg.step > limit) break;
    advance(rk, t, masses, cfg.step, cfg.control);
    ++result.steps;
    t = static_cast<double>(result.steps) * cfg.step;
  }
  result.sim_time = t;
  return result;
}

Vec2 initial_placement(std::size_t index, std::span<const SpringSpec> springs,
                       const SystemState& state, const std::vector<bool>& placed,
                       const SolverConfig& cfg, std::optional<Vec2> centre) {
  std::vector<const SpringSpec*> attached;
  std::vector<std::size_t> neighbours;
  for (const SpringSpec& s : springs) {
    const std::size_t n = s.endpoint_count();
    bool touches = false, ready = true;
    for (std::size_t e = 0; e < n; ++e) {
      if (s.endpoints[e] == index) {
        touches = true;
      } else if (!placed[s.endpoints[e]]) {
        ready = false;
      }
    }
    if (!touches || !ready) continue;
    attached.push_back(&s);
    for (std::size_t e = 0; e < n; ++e) {
      const std::size_t j = s.endpoints[e];
      if (j != index && std::find(neighbours.begin(), neighbours.end(), j) == neighbours.end()) {
        neighbours.push_back(j);
      }
    }
  }

  Vec2 start;
  if (!neighbours.empty()) {
    for (std::size_t j : neighbours) start += state[j].position;
    start = start / static_cast<double>(neighbours.size());
  } else {
    std::size_t count = 0;
    for (std::size_t j = 0; j < state.size(); ++j) {
      if (j != index && placed[j]) {
        start += state[j].position;
        ++count;
      }
    }
    if (count > 0) start = start / static_cast<double>(count);
  }
  std::mt19937_64 rng(cfg.rng_seed ^ fnv1a(state[index].toponym.str()));
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  Vec2 nudge = unit_from_heading(angle(rng));
  if (centre && norm(start - *centre) > kSeparationEpsilon) {
    nudge = (start - *centre) / norm(start - *centre);
  }
  start += cfg.placement_jitter * nudge;
  if (attached.empty()) return start;

  std::vector<PointMass> masses = copy_masses(state);
  auto energy_at = [&](Vec2 p) {
    masses[index].position = p;
    double u = 0.0;
    for (const SpringSpec* s : attached) u += spring_potential(*s, masses);
    return u;
  };
  auto force_at = [&](Vec2 p) {
    masses[index].position = p;
    Vec2 f;
    for (const SpringSpec* s : attached) {
      const SpringForces sf = spring_force(*s, masses);
      for (std::size_t e = 0; e < sf.count; ++e) {
        if (s->endpoints[e] == index) f += sf.force[e];
      }
    }
    return f;
  };

  // Trust region on each descent step; angle springs are stiff near their
  // vertex.
  constexpr double kMaxStep = 1.0;
  Vec2 x = start;
  Vec2 best = start;
  double best_energy = energy_at(start);
  for (int it = 0; it < cfg.placement_descent_steps; ++it) {
    Vec2 step = cfg.placement_learning_rate * force_at(x);
    const double len = norm(step);
    if (len > kMaxStep) step = (kMaxStep / len) * step;
    x += step;
    const double u = energy_at(x);
    if (u < best_energy) {
      best_energy = u;
      best = x;
    }
  }
  return best;
}

std::vector<Toponym> add_clauses(std::span<const SpringDraft> drafts, SystemState& state,
                                 std::vector<SpringSpec>& springs, const SolverConfig& cfg,
                                 std::span<const std::size_t> reposition,
                                 std::optional<Vec2> centre) {
  std::vector<Toponym> order;
  if (drafts.empty()) return order;

  for (const SpringDraft& d : drafts) {
    const std::size_t expected = d.kind == SpringKind::RelativeAngle ? 3 : 2;
    if (d.endpoints.size() != expected) {
      throw Error(ErrorCode::InvalidSpring, "spring has " + std::to_string(d.endpoints.size()) +
                                                " endpoints, expected " +
                                                std::to_string(expected));
    }
  }

  const std::size_t existing = state.size();
  for (const SpringDraft& d : drafts) {
    for (const Toponym& t : d.endpoints) {
      if (!state.contains(t)) state.add(PointMass{t, kPointMass, false, {}, {}});
    }
  }
  for (const SpringDraft& d : drafts) {
    SpringSpec s{d.kind, {}, d.stiffness, d.natural, d.origin};
    for (std::size_t e = 0; e < d.endpoints.size(); ++e) s.endpoints[e] = *state.index_of(d.endpoints[e]);
    validate_spring(s, state);
    springs.push_back(s);
  }

  std::vector<std::size_t> candidates(reposition.begin(), reposition.end());
  for (std::size_t i = existing; i < state.size(); ++i) candidates.push_back(i);
  return place_masses(candidates, springs, state, cfg, centre);
}

std::vector<Toponym> place_masses(std::span<const std::size_t> candidates,
                                  std::span<const SpringSpec> springs, SystemState& state,
                                  const SolverConfig& cfg, std::optional<Vec2> centre) {
  std::vector<bool> placed(state.size(), true);
  for (std::size_t i : candidates) placed[i] = false;

  std::vector<double> total_k(state.size(), 0.0);
  std::vector<bool> has_layout(state.size(), false);
  for (const SpringSpec& s : springs) {
    for (std::size_t e = 0; e < s.endpoint_count(); ++e) {
      total_k[s.endpoints[e]] += s.stiffness;
      if (s.origin != SpringOrigin::Hierarchy) has_layout[s.endpoints[e]] = true;
    }
  }
  auto by_stiffness = [&](std::size_t a, std::size_t b) {
    if (total_k[a] != total_k[b]) return total_k[a] > total_k[b];
    return state[a].toponym < state[b].toponym;
  };

  std::vector<std::size_t> layout, loose;
  for (std::size_t i : candidates) {
    if (state[i].fixed || placed[i]) continue;
    (has_layout[i] ? layout : loose).push_back(i);
  }
  std::sort(layout.begin(), layout.end(), by_stiffness);
  layout.erase(std::unique(layout.begin(), layout.end()), layout.end());
  std::sort(loose.begin(), loose.end(), by_stiffness);
  loose.erase(std::unique(loose.begin(), loose.end()), loose.end());

  std::vector<Toponym> order;
  auto place = [&](std::size_t i) {
    state[i].position = initial_placement(i, springs, state, placed, cfg, centre);
    state[i].velocity = {};
    placed[i] = true;
    order.push_back(state[i].toponym);
  };
  for (std::size_t i : layout) place(i);

  // Masses tied only by hierarchy springs follow whichever neighbours are
  // already placed, so they go in order of their stiffness to placed masses.
  while (!loose.empty()) {
    std::size_t pick = 0;
    double best = -1.0;
    for (std::size_t k = 0; k < loose.size(); ++k) {
      double link = 0.0;
      for (const SpringSpec& s : springs) {
        bool touches = false, ready = true;
        for (std::size_t e = 0; e < s.endpoint_count(); ++e) {
          if (s.endpoints[e] == loose[k]) touches = true;
          else if (!placed[s.endpoints[e]]) ready = false;
        }
        if (touches && ready) link += s.stiffness;
      }
      if (link > best) {
        best = link;
        pick = k;
      }
    }
    place(loose[pick]);
    loose.erase(loose.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return order;
}

}  // namespace amap
