#pragma once
// Robotics-oriented grammar: relational and locational clauses, and the
// preposition lexicon that turns layout prepositions into spring templates.

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace amap {

class HierarchyGraph;

// Name of a place. Non-empty, no control characters, compared exactly.
class Toponym {
 public:
  explicit Toponym(std::string name);

  const std::string& str() const noexcept { return name_; }

  friend bool operator==(const Toponym&, const Toponym&) = default;
  friend auto operator<=>(const Toponym&, const Toponym&) = default;

 private:
  std::string name_;
};

struct RelationalClause {
  std::string preposition;
  Toponym figure;
  std::vector<Toponym> referents;
  std::optional<Toponym> context;

  friend bool operator==(const RelationalClause&, const RelationalClause&) = default;
};

enum class Frame { World, Cue };

struct LocationalClause {
  Toponym toponym;
  Frame frame = Frame::World;
  double x = 0.0;
  double y = 0.0;
  std::optional<double> r;      // metres, >= 0
  std::optional<double> theta;  // radians, (-pi, pi]

  friend bool operator==(const LocationalClause&, const LocationalClause&) = default;
};

using Clause = std::variant<RelationalClause, LocationalClause>;

enum class SpringKind { Distance, AbsoluteAngle, RelativeAngle };

enum class Role { Figure, Referent, Context };

// A role placeholder. For Role::Referent, `referent` selects which referent;
// templates marked per-referent get it rebound once per referent.
struct EndpointRole {
  Role role = Role::Figure;
  std::size_t referent = 0;

  friend bool operator==(const EndpointRole&, const EndpointRole&) = default;
};

// Endpoint order follows SpringSpec: A, B (vertex for angles), then C for
// relative-angle springs.
struct SpringTemplate {
  SpringKind kind = SpringKind::Distance;
  std::vector<EndpointRole> endpoints;
  double stiffness = 1.0;
  std::optional<double> length_multiplier;
  std::optional<double> natural_angle;

  bool uses_context() const;

  friend bool operator==(const SpringTemplate&, const SpringTemplate&) = default;
};

// Containment preposition result. figure_is_child distinguishes "in" from
// "contains".
struct HierarchyMarker {
  bool figure_is_child = true;
  friend bool operator==(const HierarchyMarker&, const HierarchyMarker&) = default;
};

using LexiconResult = std::variant<std::vector<SpringTemplate>, HierarchyMarker>;

class PrepositionLexicon {
 public:
  struct Entry {
    std::vector<SpringTemplate> templates;
    // Replicate templates once per referent (rebinding Role::Referent).
    bool per_referent = true;
    std::optional<std::size_t> arity;

    Entry(std::vector<SpringTemplate> t, bool per = true,
          std::optional<std::size_t> n = std::nullopt)
        : templates(std::move(t)), per_referent(per), arity(n) {}
  };

  void add_layout(std::string preposition, Entry entry);
  void add_hierarchy(std::string preposition, bool figure_is_child);

  bool knows(std::string_view preposition) const;
  bool is_hierarchy(std::string_view preposition) const;

  // Templates specialised to the given referent count, or the hierarchy
  // marker for containment prepositions.
  LexiconResult lookup(std::string_view preposition, std::size_t referent_count) const;

  const std::map<std::string, Entry, std::less<>>& layout_entries() const { return layout_; }
  const std::map<std::string, bool, std::less<>>& hierarchy_entries() const { return hierarchy_; }

 private:
  std::map<std::string, Entry, std::less<>> layout_;
  std::map<std::string, bool, std::less<>> hierarchy_;
};

const PrepositionLexicon& default_lexicon();

LexiconResult lexicon_lookup(std::string_view preposition, std::size_t referent_count);

RelationalClause make_relational(std::string preposition, Toponym figure,
                                 std::vector<Toponym> referents,
                                 std::optional<Toponym> context = std::nullopt,
                                 const PrepositionLexicon& lexicon = default_lexicon());

LocationalClause make_locational(Toponym toponym, Frame frame, double x, double y,
                                 std::optional<double> r = std::nullopt,
                                 std::optional<double> theta = std::nullopt);

bool is_hierarchy_clause(const RelationalClause& clause,
                         const PrepositionLexicon& lexicon = default_lexicon());

// True when the clause is a label: the toponym sits exactly at the point.
bool is_label(const LocationalClause& clause);

// JSON clause-set serialisation (one array per document).
std::vector<Clause> parse_clause_set(std::string_view text,
                                     const PrepositionLexicon& lexicon = default_lexicon());
std::string serialize_clause_set(const std::vector<Clause>& clauses);

// One "in" clause per edge, depth-first from the roots.
std::vector<RelationalClause> hierarchy_to_clauses(const HierarchyGraph& graph);

}  // namespace amap
