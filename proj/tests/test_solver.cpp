#include <doctest.h>

#include <random>

#include "amap/error.hpp"
#include "amap/solver.hpp"
#include "oracles.hpp"

using namespace amap;

namespace {

PointMass mass(const char* name, Vec2 p, bool fixed = false) {
  return PointMass{Toponym(name), kPointMass, fixed, p, {}};
}

SpringSpec distance(std::size_t a, std::size_t b, double k, double r) {
  SpringSpec s;
  s.kind = SpringKind::Distance;
  s.endpoints = {a, b, 0};
  s.stiffness = k;
  s.natural = r;
  return s;
}

double oscillator_error(int steps) {
  SystemState st;
  st.add(mass("anchor", {0, 0}, true));
  st.add(mass("bob", {1, 0}));
  const std::vector<SpringSpec> springs{distance(1, 0, 1.0, 0.0)};
  Dynamics undamped;
  undamped.friction = 0.0;
  const double h = 2.0 * kPi / steps;
  for (int i = 0; i < steps; ++i) st = rk4_step(i * h, st, springs, std::nullopt, h, undamped);
  const double t = 2.0 * kPi;
  return std::hypot(st[1].position.x - oracle::oscillator(1.0, t),
                    st[1].velocity.x - oracle::oscillator_velocity(1.0, t));
}

}  // namespace

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.step = 0.0;
  CHECK(oracle::error_of([&] { cfg.validate(); }) == ErrorCode::InvalidConfig);
  cfg = {};
  cfg.max_sim_time = 0.01;
  CHECK(oracle::error_of([&] { cfg.validate(); }) == ErrorCode::InvalidConfig);
  cfg = {};
  cfg.velocity_threshold = -1;
  CHECK(oracle::error_of([&] { cfg.validate(); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("rk4 oscillator accuracy and order") {
  const double coarse = oscillator_error(200);
  const double fine = oscillator_error(400);
  CHECK(coarse < 1e-6);
  const double ratio = coarse / fine;
  CHECK(ratio >= 8.0);
  CHECK(ratio <= 32.0);
}

TEST_CASE("rk4 leaves a force-free system unchanged") {
  SystemState st;
  st.add(mass("a", {1, 2}));
  st.add(mass("b", {3, 4}, true));
  const SystemState next = rk4_step(0.0, st, {}, std::nullopt, 0.02);
  CHECK(next == st);
}

TEST_CASE("rk4 keeps fixed masses fixed") {
  SystemState st;
  st.add(mass("a", {0, 0}, true));
  st.add(mass("b", {5, 0}));
  const std::vector<SpringSpec> springs{distance(1, 0, 1.0, 1.0)};
  const SystemState next = rk4_step(0.0, st, springs, Vec2{1, 1}, 0.02);
  CHECK(next[0].position == Vec2{0, 0});
  CHECK(next[0].velocity == Vec2{});
  CHECK(next[1].position.x < 5.0);
}

TEST_CASE("rk4 reports divergence") {
  SystemState st;
  st.add(mass("a", {0, 0}, true));
  st.add(mass("b", {1e300, 0}));
  const std::vector<SpringSpec> springs{distance(1, 0, 1.0, 0.0)};
  CHECK(oracle::error_of([&] { rk4_step(0.0, st, springs, std::nullopt, 1e10); }) ==
        ErrorCode::NonFiniteState);
}

TEST_CASE("settled predicate") {
  SystemState st;
  st.add(mass("a", {0, 0}));
  std::vector<Vec2> acc{{0, 0}};
  CHECK(settled(st, acc));
  st[0].velocity = {0.2, 0};
  CHECK_FALSE(settled(st, acc));
  st[0].velocity = {0.05, 0};
  acc[0] = {0.15, 0};
  CHECK_FALSE(settled(st, acc));
  acc[0] = {0.0, 0.099};
  CHECK(settled(st, acc));
  st.add(mass("fixed", {1, 1}, true));
  acc.push_back({5, 5});
  CHECK(settled(st, acc));
}

TEST_CASE("imagine: single distance constraint") {
  SystemState st;
  st.add(mass("anchor", {0, 0}, true));
  st.add(mass("goal", {1, 0}));
  const std::vector<SpringSpec> springs{distance(1, 0, 1.0, 4.0)};
  const auto r = imagine(st, springs, std::nullopt);
  CHECK(r.settled);
  CHECK(norm(r.state[1].position) == doctest::Approx(4.0).epsilon(0.01));
  CHECK(r.energy.size() == r.steps + 1);
  CHECK(r.sim_time == doctest::Approx(r.steps * 0.02));
}

TEST_CASE("imagine: already settled returns immediately") {
  SystemState st;
  st.add(mass("a", {0, 0}));
  st.add(mass("b", {1, 0}));
  const std::vector<SpringSpec> springs{distance(0, 1, 1.0, 1.0)};
  const auto r = imagine(st, springs, std::nullopt);
  CHECK(r.settled);
  CHECK(r.steps == 0);
  CHECK(r.state == st);
}

TEST_CASE("imagine: two free masses reach natural separation") {
  SystemState st;
  st.add(mass("a", {0, 0}));
  st.add(mass("b", {0.1, 0}));
  const std::vector<SpringSpec> springs{distance(0, 1, 1.0, 1.0)};
  const auto r = imagine(st, springs, std::nullopt);
  CHECK(r.settled);
  CHECK(norm(r.state[1].position - r.state[0].position) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("imagine: timeout is a flag") {
  SystemState st;
  st.add(mass("anchor", {0, 0}, true));
  st.add(mass("goal", {100, 0}));
  const std::vector<SpringSpec> springs{distance(1, 0, 1.0, 0.0)};
  SolverConfig cfg;
  cfg.max_sim_time = 1.0;
  const auto r = imagine(st, springs, std::nullopt, cfg);
  CHECK_FALSE(r.settled);
  CHECK(r.sim_time == doctest::Approx(1.0));
  CHECK(r.steps == 50);
}

TEST_CASE("imagine: settled states are near equilibria") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(-5, 5);
  for (int trial = 0; trial < 10; ++trial) {
    SystemState st;
    st.add(mass("o", {0, 0}, true));
    for (int i = 0; i < 4; ++i) st.add(mass(("m" + std::to_string(i)).c_str(), {pos(rng), pos(rng)}));
    std::vector<SpringSpec> springs;
    for (std::size_t i = 1; i < 5; ++i) springs.push_back(distance(i, i - 1, 0.5, 2.0));
    const auto r = imagine(st, springs, Vec2{0.5, 0.5});
    REQUIRE(r.settled);
    const auto acc = motion_model(0.0, r.state.masses(), springs, Vec2{0.5, 0.5});
    for (std::size_t i = 1; i < 5; ++i) CHECK(norm(acc[i]) < 0.1);
  }
}

TEST_CASE("imagine: translation equivariance without expansion") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> pos(-4, 4);
  SystemState st;
  st.add(mass("o", {0, 0}, true));
  st.add(mass("p", {3, 1}, true));
  for (int i = 0; i < 4; ++i) st.add(mass(("m" + std::to_string(i)).c_str(), {pos(rng), pos(rng)}));
  std::vector<SpringSpec> springs{distance(2, 0, 1.0, 2.0), distance(3, 1, 0.5, 1.5),
                                  distance(4, 2, 0.1, 3.0), distance(5, 3, 1.0, 1.0)};
  SpringSpec angle;
  angle.kind = SpringKind::RelativeAngle;
  angle.endpoints = {4, 2, 0};
  angle.natural = kPi / 2;
  springs.push_back(angle);
  const Vec2 shift{2.5, -1.25};
  SystemState moved = st;
  for (auto& m : moved.masses()) m.position += shift;
  const auto a = imagine(st, springs, std::nullopt);
  const auto b = imagine(moved, springs, std::nullopt);
  REQUIRE(a.settled);
  CHECK(a.steps == b.steps);
  for (std::size_t i = 0; i < st.size(); ++i) {
    CHECK(norm(b.state[i].position - a.state[i].position - shift) < 1e-9);
  }
}

TEST_CASE("imagine: determinism") {
  SystemState st;
  st.add(mass("o", {0, 0}, true));
  st.add(mass("a", {1, 2}));
  st.add(mass("b", {-1, 0.5}));
  const std::vector<SpringSpec> springs{distance(1, 0, 1.0, 3.0), distance(2, 1, 0.5, 2.0)};
  const auto a = imagine(st, springs, Vec2{0.2, 0.1});
  const auto b = imagine(st, springs, Vec2{0.2, 0.1});
  CHECK(a.state == b.state);
  CHECK(a.steps == b.steps);
}

TEST_CASE("initial placement: ring around an anchor") {
  SystemState st;
  st.add(mass("o", {0, 0}, true));
  st.add(mass("g", {0, 0}));
  const std::vector<SpringSpec> springs{distance(1, 0, 1.0, 4.0)};
  const Vec2 p = initial_placement(1, springs, st, {true, false});
  CHECK(norm(p) == doctest::Approx(4.0).epsilon(0.025));
}

TEST_CASE("initial placement: no springs gives centroid plus jitter") {
  SystemState st;
  st.add(mass("a", {0, 0}, true));
  st.add(mass("b", {2, 0}, true));
  st.add(mass("c", {0, 0}));
  const Vec2 p = initial_placement(2, {}, st, {true, true, false});
  CHECK(norm(p - Vec2{1, 0}) == doctest::Approx(0.1));

  SystemState empty;
  empty.add(mass("only", {5, 5}));
  const Vec2 q = initial_placement(0, {}, empty, {false});
  CHECK(norm(q) == doctest::Approx(0.1));
}

TEST_CASE("initial placement: matches grid-search minimiser") {
  SystemState st;
  st.add(mass("a", {0, 0}, true));
  st.add(mass("b", {2, 0}, true));
  st.add(mass("x", {0, 0}));
  const std::vector<SpringSpec> springs{distance(2, 0, 1.0, 1.0), distance(2, 1, 1.0, 1.0)};
  auto energy = [&](Vec2 p) {
    std::vector<Vec2> pts{{0, 0}, {2, 0}, p};
    return oracle::potential(springs[0], pts) + oracle::potential(springs[1], pts);
  };
  const Vec2 best = oracle::grid_search(energy, -3, 5);
  const Vec2 p = initial_placement(2, springs, st, {true, true, false});
  CHECK(std::abs(energy(p) - energy(best)) < 1e-3);
}

TEST_CASE("initial placement is seeded") {
  SystemState st;
  st.add(mass("a", {0, 0}, true));
  st.add(mass("x", {0, 0}));
  SolverConfig one, two;
  one.rng_seed = 1;
  two.rng_seed = 2;
  const Vec2 p1 = initial_placement(1, {}, st, {true, false}, one);
  CHECK(initial_placement(1, {}, st, {true, false}, one) == p1);
  CHECK_FALSE(initial_placement(1, {}, st, {true, false}, two) == p1);
  const Vec2 away = initial_placement(1, {}, st, {true, false}, one, Vec2{-1, 0});
  CHECK(away.x == doctest::Approx(0.1));
  CHECK(away.y == doctest::Approx(0.0));
}

TEST_CASE("add_clauses placement order") {
  SystemState st;
  st.add(mass("o", {0, 0}, true));
  std::vector<SpringSpec> springs;
  const std::vector<SpringDraft> drafts{
      {SpringKind::Distance, {Toponym("b"), Toponym("o")}, 0.5, 1.0, SpringOrigin::Template},
      {SpringKind::Distance, {Toponym("a"), Toponym("o")}, 1.0, 1.0, SpringOrigin::Template},
      {SpringKind::Distance, {Toponym("a"), Toponym("o")}, 0.5, 2.0, SpringOrigin::Template},
      {SpringKind::Distance, {Toponym("b"), Toponym("o")}, 0.1, 1.0, SpringOrigin::Template},
  };
  const auto order = add_clauses(drafts, st, springs);
  CHECK(order == std::vector<Toponym>{Toponym("a"), Toponym("b")});
  CHECK(springs.size() == 4);
  CHECK(st.size() == 3);
  for (const auto& m : st.masses()) CHECK(m.velocity == Vec2{});
}

TEST_CASE("add_clauses ties break by name") {
  SystemState st;
  st.add(mass("o", {0, 0}, true));
  std::vector<SpringSpec> springs;
  const std::vector<SpringDraft> drafts{
      {SpringKind::Distance, {Toponym("m2"), Toponym("o")}, 1.0, 1.0, SpringOrigin::Template},
      {SpringKind::Distance, {Toponym("m1"), Toponym("o")}, 1.0, 1.0, SpringOrigin::Template},
  };
  CHECK(add_clauses(drafts, st, springs) == std::vector<Toponym>{Toponym("m1"), Toponym("m2")});
}

TEST_CASE("add_clauses: empty input and existing masses") {
  SystemState st;
  st.add(mass("o", {0, 0}, true));
  st.add(mass("a", {7, 7}));
  st[1].velocity = {0.3, 0.4};
  std::vector<SpringSpec> springs;
  const SystemState before = st;
  CHECK(add_clauses({}, st, springs).empty());
  CHECK(st == before);
  CHECK(springs.empty());

  const std::vector<SpringDraft> drafts{
      {SpringKind::Distance, {Toponym("a"), Toponym("o")}, 1.0, 1.0, SpringOrigin::Template},
      {SpringKind::Distance, {Toponym("n"), Toponym("a")}, 1.0, 1.0, SpringOrigin::Template},
  };
  add_clauses(drafts, st, springs);
  CHECK(st[0] == before[0]);
  CHECK(st[1] == before[1]);
  CHECK(st.size() == 3);
}

TEST_CASE("add_clauses re-places listed masses only") {
  SystemState st;
  st.add(mass("o", {0, 0}, true));
  st.add(mass("a", {40, 40}));
  st.add(mass("b", {50, 50}));
  std::vector<SpringSpec> springs{distance(1, 0, 1.0, 4.0)};
  const std::vector<std::size_t> reposition{1};
  const std::vector<SpringDraft> drafts{
      {SpringKind::Distance, {Toponym("c"), Toponym("o")}, 1.0, 1.0, SpringOrigin::Template}};
  add_clauses(drafts, st, springs, {}, reposition);
  CHECK(norm(st[1].position) == doctest::Approx(4.0).epsilon(0.05));
  CHECK(st[2].position == Vec2{50, 50});
}
