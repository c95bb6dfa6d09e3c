#include <doctest.h>

#include <random>

#include "amap/error.hpp"
#include "amap/grammar.hpp"
#include "amap/hierarchy.hpp"
#include "oracles.hpp"

using namespace amap;

namespace {

Toponym T(const char* s) { return Toponym(s); }

}  // namespace

TEST_CASE("toponym rejects empty and control characters") {
  CHECK(oracle::error_of([] { Toponym(""); }) == ErrorCode::InvalidToponym);
  CHECK(oracle::error_of([] { Toponym("a\nb"); }) == ErrorCode::InvalidToponym);
  CHECK(Toponym("Isla's office").str() == "Isla's office");
}

TEST_CASE("make_relational builds between clause") {
  const auto c = make_relational("between", T("Isla's office"), {T("entryway"), T("printer")});
  CHECK(c.preposition == "between");
  CHECK(c.figure == T("Isla's office"));
  REQUIRE(c.referents.size() == 2);
  CHECK(c.referents[0] == T("entryway"));
  CHECK(c.referents[1] == T("printer"));
  CHECK_FALSE(c.context.has_value());
  CHECK_FALSE(is_hierarchy_clause(c));
}

TEST_CASE("make_relational containment is a hierarchy clause") {
  const auto c = make_relational("in", T("A Block"), {T("University")});
  CHECK(is_hierarchy_clause(c));
}

TEST_CASE("make_relational errors") {
  CHECK(oracle::error_of([] { make_relational("hovering-over", T("a"), {T("b")}); }) ==
        ErrorCode::UnknownPreposition);
  CHECK(oracle::error_of([] { make_relational("near", T("a"), {}); }) ==
        ErrorCode::EmptyReferents);
  CHECK(oracle::error_of([] { make_relational("near", T("a"), {T("a")}); }) ==
        ErrorCode::FigureIsReferent);
  CHECK(oracle::error_of([] { make_relational("between", T("a"), {T("b"), T("c"), T("d")}); }) ==
        ErrorCode::ArityMismatch);
}

TEST_CASE("make_locational") {
  const auto label = make_locational(T("Riko's Office"), Frame::World, 5.21, 1.76, 0.0);
  CHECK(label.r == 0.0);
  CHECK_FALSE(label.theta.has_value());
  CHECK(is_label(label));

  const auto arrow = make_locational(T("Lion"), Frame::Cue, 0, 0, std::nullopt, kPi / 2);
  CHECK_FALSE(arrow.r.has_value());
  CHECK(*arrow.theta == doctest::Approx(kPi / 2));
  CHECK_FALSE(is_label(arrow));

  CHECK(oracle::error_of([] { make_locational(T("Lion"), Frame::World, 0, 0, -1.0); }) ==
        ErrorCode::NegativeRange);
  CHECK(oracle::error_of([] {
          make_locational(T("Lion"), Frame::World, 0, 0, std::nullopt, std::nan(""));
        }) == ErrorCode::NonFiniteCoordinate);
  CHECK(oracle::error_of([] {
          make_locational(T("Lion"), Frame::World, INFINITY, 0);
        }) == ErrorCode::NonFiniteCoordinate);
}

TEST_CASE("parse_clause_set") {
  const auto one = parse_clause_set(
      R"([{"kind":"rel","pred":"between","figure":"Isla's office","referents":["entryway","printer"]}])");
  REQUIRE(one.size() == 1);
  CHECK(std::holds_alternative<RelationalClause>(one[0]));

  CHECK(parse_clause_set("[]").empty());

  try {
    parse_clause_set(R"([{"kind":"loc","toponym":"Lion","r":-2}])");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeRange);
    REQUIRE(e.clause_index.has_value());
    CHECK(*e.clause_index == 0);
  }

  try {
    parse_clause_set("[\n{\"kind\":\"rel\",\n  oops}]");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SyntaxError);
    REQUIRE(e.line.has_value());
    CHECK(*e.line == 3);
  }

  CHECK(oracle::error_of([] { parse_clause_set(R"({"kind":"rel"})"); }) ==
        ErrorCode::SyntaxError);
  CHECK(oracle::error_of([] {
          parse_clause_set(R"([{"kind":"rel","pred":"near","figure":"a","referents":["b"]},
                               {"kind":"rel","pred":"zzz","figure":"a","referents":["b"]}])");
        }) == ErrorCode::UnknownPreposition);
}

TEST_CASE("clause serialisation round-trips bit-exactly") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::uniform_real_distribution<double> ang(-kPi + 1e-12, kPi);
  std::vector<Clause> clauses;
  for (int i = 0; i < 200; ++i) {
    auto r = std::optional<double>{};
    auto th = std::optional<double>{};
    if (i % 2) r = std::abs(u(rng));
    if (i % 3) th = ang(rng);
    clauses.emplace_back(make_locational(Toponym("p" + std::to_string(i)),
                                         i % 5 ? Frame::World : Frame::Cue, u(rng), u(rng), r, th));
  }
  clauses.emplace_back(make_relational("right of", T("a"), {T("b")}, T("c")));
  clauses.emplace_back(make_relational("near", T("a"), {T("b"), T("c")}));
  clauses.emplace_back(make_relational("contains", T("Zoo"), {T("Aviary")}));
  const std::string text = serialize_clause_set(clauses);
  const auto back = parse_clause_set(text);
  CHECK(back == clauses);
  CHECK(serialize_clause_set(back) == text);
}

TEST_CASE("lexicon lookup") {
  const auto right = lexicon_lookup("right of", 1);
  REQUIRE(std::holds_alternative<std::vector<SpringTemplate>>(right));
  const auto& t = std::get<std::vector<SpringTemplate>>(right);
  REQUIRE(t.size() == 2);
  int rel = 0, dist = 0;
  for (const auto& s : t) {
    if (s.kind == SpringKind::RelativeAngle) {
      ++rel;
      CHECK(*s.natural_angle == doctest::Approx(kPi / 2));
      CHECK(s.endpoints == std::vector<EndpointRole>{{Role::Figure, 0}, {Role::Referent, 0},
                                                     {Role::Context, 0}});
    }
    if (s.kind == SpringKind::Distance) ++dist;
  }
  CHECK(rel == 1);
  CHECK(dist == 1);

  const auto in = lexicon_lookup("in", 1);
  REQUIRE(std::holds_alternative<HierarchyMarker>(in));
  CHECK(std::get<HierarchyMarker>(in).figure_is_child);
  CHECK_FALSE(std::get<HierarchyMarker>(lexicon_lookup("contains", 1)).figure_is_child);

  CHECK(oracle::error_of([] { lexicon_lookup("between", 3); }) == ErrorCode::ArityMismatch);
  CHECK(oracle::error_of([] { lexicon_lookup("hovering-over", 1); }) ==
        ErrorCode::UnknownPreposition);

  const auto near2 = std::get<std::vector<SpringTemplate>>(lexicon_lookup("near", 2));
  REQUIRE(near2.size() == 2);
  CHECK(near2[0].endpoints[1].referent == 0);
  CHECK(near2[1].endpoints[1].referent == 1);
}

TEST_CASE("lexicon closure over the default table") {
  const double pi = kPi;
  for (const auto& [word, entry] : default_lexicon().layout_entries()) {
    CAPTURE(word);
    const std::size_t n = entry.arity.value_or(1);
    for (const auto& t : std::get<std::vector<SpringTemplate>>(lexicon_lookup(word, n))) {
      if (t.natural_angle) {
        const double a = std::abs(*t.natural_angle);
        CHECK((a == doctest::Approx(pi) || a == doctest::Approx(pi / 2)));
      }
      if (t.length_multiplier) {
        CHECK((*t.length_multiplier == 1.0 || *t.length_multiplier == 0.5));
      }
      CHECK((t.stiffness == 1.0 || t.stiffness == 0.5 || t.stiffness == 0.1 ||
             t.stiffness == 0.01));
    }
  }
  for (const char* w : {"in", "inside", "within", "contains"}) CHECK(default_lexicon().is_hierarchy(w));
}

TEST_CASE("hierarchy_to_clauses") {
  HierarchyGraph g;
  g.set_node(T("Zoo"), 3);
  g.set_node(T("Zoo Foyer"), 1);
  g.add_edge(T("Zoo"), T("Zoo Foyer"));
  const auto clauses = hierarchy_to_clauses(g);
  REQUIRE(clauses.size() == 1);
  CHECK(clauses[0] == make_relational("in", T("Zoo Foyer"), {T("Zoo")}));

  CHECK(hierarchy_to_clauses(HierarchyGraph{}).empty());

  HierarchyGraph cyclic;
  cyclic.set_node(T("a"), 1);
  cyclic.set_node(T("b"), 1);
  cyclic.add_edge(T("a"), T("b"));
  cyclic.add_edge(T("b"), T("a"));
  CHECK(oracle::error_of([&] { hierarchy_to_clauses(cyclic); }) == ErrorCode::CyclicGraph);
}

TEST_CASE("hierarchy_to_clauses is depth-first and covers every edge") {
  HierarchyGraph g;
  g.set_node(T("Zoo"), 3);
  for (const char* area : {"Aviary", "Outback"}) {
    g.set_node(T(area), 2);
    g.add_edge(T("Zoo"), T(area));
  }
  for (const char* room : {"Emu", "Kangaroo"}) {
    g.set_node(T(room), 1);
    g.add_edge(T("Outback"), T(room));
  }
  g.set_node(T("Kingfisher"), 1);
  g.add_edge(T("Aviary"), T("Kingfisher"));
  const auto clauses = hierarchy_to_clauses(g);
  REQUIRE(clauses.size() == g.edges().size());
  std::vector<std::string> figures;
  for (const auto& c : clauses) {
    CHECK(c.preposition == "in");
    figures.push_back(c.figure.str());
  }
  CHECK(figures == std::vector<std::string>{"Aviary", "Kingfisher", "Outback", "Emu", "Kangaroo"});
  CHECK(hierarchy_to_clauses(g) == clauses);
}

TEST_CASE("hierarchy levels") {
  HierarchyGraph g;
  g.set_node(T("Zoo"), 3);
  g.set_node(T("Lion"), 1);
  CHECK(g.add_containment(T("Zoo"), T("Lion")));
  CHECK_FALSE(g.add_containment(T("Zoo"), T("Lion")));
  CHECK(oracle::error_of([&] { g.add_containment(T("Lion"), T("Zoo")); }) ==
        ErrorCode::HierarchyLevelConflict);
  CHECK(g.add_containment(T("Zoo"), T("Big Cats")));
  CHECK(g.level(T("Big Cats")).value() < 3);
  CHECK(g.level_or_default(T("nowhere")) == 1);
}
