#include <doctest.h>

#include <random>

#include "amap/abstract_map.hpp"
#include "amap/error.hpp"
#include "amap/world.hpp"
#include "oracles.hpp"

using namespace amap;

namespace {

Toponym T(const char* s) { return Toponym(s); }

std::size_t count_origin(const AbstractMap& map, SpringOrigin origin) {
  std::size_t n = 0;
  for (const auto& s : map.springs()) n += s.origin == origin;
  return n;
}

CueObservation label_at(const char* cue, const char* name, Vec2 p) {
  return {cue, p, 0.0, {make_locational(Toponym(name), Frame::Cue, 0, 0, 0.0)}};
}

}  // namespace

TEST_CASE("preloading the zoo hierarchy") {
  const Scenario zoo = load_world_file(AMAP_DATA_DIR "/zoo_analog.json");
  AbstractMap map;
  map.preload_hierarchy(zoo.hierarchy);
  CHECK(count_origin(map, SpringOrigin::Hierarchy) == zoo.hierarchy.edges().size());
  CHECK(map.springs().size() == zoo.hierarchy.edges().size());
  for (const auto& s : map.springs()) {
    CHECK(s.stiffness == kHierarchyStiffness);
    CHECK(s.kind == SpringKind::Distance);
  }
  CHECK(map.hierarchy().edges().size() == zoo.hierarchy.edges().size());
  for (const auto& m : map.system().masses()) CHECK(is_finite(m.position));
}

TEST_CASE("layout clause becomes lexicon springs") {
  AbstractMap map;
  map.add_symbolic_spatial_info({make_relational("right of", T("f"), {T("r")}, T("c"))});
  REQUIRE(map.springs().size() == 2);
  bool found = false;
  for (const auto& s : map.springs()) {
    if (s.kind == SpringKind::RelativeAngle) {
      found = true;
      CHECK(s.natural == doctest::Approx(kPi / 2));
      CHECK(map.system()[s.endpoints[0]].toponym == T("f"));
      CHECK(map.system()[s.endpoints[1]].toponym == T("r"));
      CHECK(map.system()[s.endpoints[2]].toponym == T("c"));
    } else {
      CHECK(s.natural == doctest::Approx(0.5 * 4.0));
    }
  }
  CHECK(found);
  const auto rel = map.springs()[0].kind == SpringKind::RelativeAngle ? map.springs()[0]
                                                                       : map.springs()[1];
  CHECK(std::abs(spring_measure(rel, map.system().masses()) - kPi / 2) < 0.035);
}

TEST_CASE("preloaded clause without context keeps only distance templates") {
  AbstractMap map;
  map.add_symbolic_spatial_info({make_relational("right of", T("f"), {T("r")})});
  REQUIRE(map.springs().size() == 1);
  CHECK(map.springs()[0].kind == SpringKind::Distance);
}

TEST_CASE("empty clause list leaves the map untouched") {
  AbstractMap map;
  map.add_symbolic_spatial_info({make_relational("near", T("a"), {T("b")})});
  const auto before = map.system();
  const auto count = map.imagination_count();
  CHECK_FALSE(map.add_symbolic_spatial_info({}));
  CHECK(map.system() == before);
  CHECK(map.imagination_count() == count);
}

TEST_CASE("label observation pins the toponym") {
  AbstractMap map;
  map.observe_cue(label_at("door", "Riko's Office", {5.21, 1.76}));
  const auto anchor = map.system().index_of(T("@door"));
  REQUIRE(anchor.has_value());
  CHECK(map.system()[*anchor].fixed);
  CHECK(map.system()[*anchor].position == Vec2{5.21, 1.76});
  REQUIRE(map.springs().size() == 1);
  const auto& s = map.springs()[0];
  CHECK(s.origin == SpringOrigin::Observation);
  CHECK(s.stiffness == 2.5);
  CHECK(s.natural == 0.0);
  const Vec2 p = map.imagined_location(T("Riko's Office"));
  CHECK(norm(p - Vec2{5.21, 1.76}) < 0.05);
  CHECK(map.observed_places().at(T("Riko's Office")) == Vec2{5.21, 1.76});
}

TEST_CASE("pinned goal amid template springs") {
  AbstractMap map;
  map.add_symbolic_spatial_info({make_relational("near", T("goal"), {T("a")}),
                                 make_relational("near", T("goal"), {T("b")})});
  map.observe_cue(label_at("door", "goal", {5.21, 1.76}));
  CHECK(norm(map.imagined_location(T("goal")) - Vec2{5.21, 1.76}) < 0.05);
}

TEST_CASE("arrow observation adds only a direction spring") {
  AbstractMap map;
  CueObservation arrow{"sign", {1, 1}, 0.0,
                       {make_locational(T("Lion"), Frame::Cue, 0, 0, std::nullopt, kPi / 2)}};
  map.observe_cue(arrow);
  REQUIRE(map.springs().size() == 1);
  CHECK(map.springs()[0].kind == SpringKind::AbsoluteAngle);
  CHECK(map.springs()[0].natural == doctest::Approx(kPi / 2));
  CHECK(map.springs()[0].stiffness == 2.5);
}

TEST_CASE("cue-frame clauses rotate with the cue heading") {
  AbstractMap map;
  CueObservation arrow{"sign", {1, 1}, kPi / 2,
                       {make_locational(T("Lion"), Frame::Cue, 0, 0, 3.0, kPi / 2)}};
  map.observe_cue(arrow);
  REQUIRE(map.springs().size() == 2);
  CHECK(map.springs()[1].natural == doctest::Approx(kPi));
  const Vec2 p = map.imagined_location(T("Lion"));
  CHECK(p.x == doctest::Approx(-2.0).epsilon(0.02));
  CHECK(p.y == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("relational cue clauses default to the cue anchor as context") {
  AbstractMap map;
  CueObservation sign{"sign", {0, 0}, 0.0, {make_relational("right of", T("f"), {T("r")})}};
  map.observe_cue(sign);
  bool rel = false;
  for (const auto& s : map.springs()) {
    if (s.kind != SpringKind::RelativeAngle) continue;
    rel = true;
    CHECK(map.system()[s.endpoints[2]].toponym == T("@sign"));
  }
  CHECK(rel);
}

TEST_CASE("repeated cue ids reuse their anchor") {
  AbstractMap map;
  map.observe_cue(label_at("door", "a", {1, 1}));
  map.observe_cue(label_at("door", "b", {1, 1}));
  std::size_t fixed = 0;
  for (const auto& m : map.system().masses()) fixed += m.fixed;
  CHECK(fixed == 1);
}

TEST_CASE("observe_cue rejects non-finite poses") {
  AbstractMap map;
  CHECK(oracle::error_of([&] { map.observe_cue(label_at("x", "a", {INFINITY, 0})); }) ==
        ErrorCode::NonFinitePose);
  CueObservation bad{"y", {0, 0}, std::nan(""), {}};
  CHECK(oracle::error_of([&] { map.observe_cue(bad); }) == ErrorCode::NonFinitePose);
}

TEST_CASE("exploration factor grows and resets") {
  AbstractMap map;
  map.add_symbolic_spatial_info({make_relational("near", T("a"), {T("b")})});
  const std::vector<double> expected{1.25, 1.5625, 1.953125};
  for (double e : expected) {
    map.on_goal_not_found();
    CHECK(map.exploration().value() == e);
  }
  CHECK(map.exploration().failures() == 3);
  map.observe_cue(label_at("door", "a", {0, 0}));
  CHECK(map.exploration().value() == 1.0);
}

TEST_CASE("exploration scales template and hierarchy springs only") {
  AbstractMap map;
  map.add_symbolic_spatial_info({make_relational("near", T("a"), {T("b")}),
                                 make_relational("in", T("a"), {T("Area")})});
  map.observe_cue({"sign", {0, 0}, 0.0, {make_locational(T("b"), Frame::Cue, 0, 0, 3.0)}});
  map.on_goal_not_found();
  map.on_goal_not_found();
  const double e = map.exploration().value();
  for (std::size_t k = 0; k < map.springs().size(); ++k) {
    const auto& s = map.springs()[k];
    if (s.kind != SpringKind::Distance) continue;
    if (s.origin == SpringOrigin::Observation) {
      CHECK(s.natural == 3.0);
    } else {
      const auto& m = map.spring_meta()[k];
      CHECK(s.natural == doctest::Approx(m.multiplier * map.scaling().current(m.levels) * e));
    }
  }
}

TEST_CASE("scaling factor weighted mean") {
  AbstractMap map;
  map.update_scaling_factor(LevelPair::of(1, 1), 1.0, 2.0);
  map.update_scaling_factor(LevelPair::of(1, 1), 0.5, 4.0);
  CHECK(map.scaling().ratio(LevelPair::of(1, 1)) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
  CHECK(map.scaling().current(LevelPair::of(1, 1)) == doctest::Approx(4.0 * 8.0 / 3.0));

  ScalingFactors single;
  single.update(LevelPair::of(2, 1), 0.1, 1.0);
  CHECK(single.ratio(LevelPair::of(1, 2)) == 1.0);
  CHECK(single.current(LevelPair::of(1, 2)) == 5.0);

  ScalingFactors fresh;
  CHECK(fresh.current(LevelPair::of(1, 1)) == 4.0);
  CHECK(fresh.current(LevelPair::of(1, 2)) == 5.0);
  CHECK(fresh.current(LevelPair::of(3, 1)) == 20.0);
  CHECK(fresh.current(LevelPair::of(2, 2)) == 15.0);
  CHECK(fresh.current(LevelPair::of(2, 3)) == 15.0);
  CHECK(fresh.current(LevelPair::of(3, 3)) == 50.0);

  CHECK(oracle::error_of([&] { fresh.update(LevelPair::of(1, 1), 0.0, 1.0); }) ==
        ErrorCode::NonPositiveWeight);
  CHECK(oracle::error_of([&] { fresh.update(LevelPair::of(1, 1), 1.0, -1.0); }) ==
        ErrorCode::NonPositiveRatio);
}

TEST_CASE("weighted mean stays within observed ratios") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> w(0.01, 2.5);
  std::uniform_real_distribution<double> r(0.1, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    ScalingFactors sf;
    std::vector<std::pair<double, double>> obs;
    double lo = 1e9, hi = 0;
    for (int i = 0; i < 1 + trial % 7; ++i) {
      obs.emplace_back(w(rng), r(rng));
      lo = std::min(lo, obs.back().second);
      hi = std::max(hi, obs.back().second);
      sf.update(LevelPair::of(1, 2), obs.back().first, obs.back().second);
    }
    const double mean = sf.ratio(LevelPair::of(1, 2));
    CHECK(mean >= lo * (1 - 1e-15));
    CHECK(mean <= hi * (1 + 1e-15));
    CHECK(std::abs(mean - oracle::weighted_mean(obs)) <= 1e-12 * mean);
  }
}

TEST_CASE("scaling updates from observed label pairs") {
  AbstractMap map;
  map.add_symbolic_spatial_info({make_relational("near", T("a"), {T("b")})});
  map.observe_cue(label_at("s1", "a", {0, 0}));
  map.observe_cue(label_at("s2", "b", {4, 0}));
  const auto& obs = map.scaling().observations(LevelPair::of(1, 1));
  REQUIRE(obs.size() == 1);
  CHECK(obs[0].weight == 1.0);
  CHECK(obs[0].ratio == doctest::Approx(4.0 / 2.0));
}

TEST_CASE("imagined location queries") {
  AbstractMap map;
  CHECK(oracle::error_of([&] { (void)map.imagined_location(T("nowhere")); }) ==
        ErrorCode::UnknownToponym);
  map.observe_cue({"o", {0, 0}, 0.0, {make_locational(T("goal"), Frame::World, 0, 0, 4.0)}});
  CHECK(norm(map.imagined_location(T("goal"))) == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("explored centre") {
  AbstractMap map;
  CHECK_FALSE(map.explored_centre());
  map.set_explored_centre(Vec2{5, 5});
  map.set_explored_centre(Vec2{1, 0});
  CHECK(*map.explored_centre() == Vec2{1, 0});
  PointMass m{T("a"), kPointMass, false, {3, 0}, {}};
  const Vec2 f = expansion_force(m, map.explored_centre(), map.config().dynamics);
  CHECK(f.x == doctest::Approx(0.02));
  CHECK(f.y == 0.0);
  map.set_explored_centre(std::nullopt);
  CHECK_FALSE(map.explored_centre());
  CHECK(oracle::error_of([&] { map.set_explored_centre(Vec2{NAN, 0}); }) ==
        ErrorCode::NonFiniteCentre);
}

TEST_CASE("re-imagination is idempotent") {
  AbstractMap map;
  map.add_symbolic_spatial_info({make_relational("near", T("a"), {T("b")}),
                                 make_relational("near", T("c"), {T("b")})});
  map.observe_cue(label_at("s", "b", {2, 2}));
  const auto before = map.system();
  map.reimagine();
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(norm(map.system()[i].position - before[i].position) < 1e-6);
  }
}

TEST_CASE("hierarchy clauses update the graph") {
  AbstractMap map;
  map.add_symbolic_spatial_info({make_relational("contains", T("Zoo"), {T("Aviary")}),
                                 make_relational("in", T("Emu"), {T("Aviary")}),
                                 make_relational("in", T("Emu"), {T("Aviary")})});
  CHECK(map.hierarchy().has_edge(T("Zoo"), T("Aviary")));
  CHECK(map.hierarchy().has_edge(T("Aviary"), T("Emu")));
  CHECK(count_origin(map, SpringOrigin::Hierarchy) == map.hierarchy().edges().size());
}
