#include "amap/grammar.hpp"

#include <algorithm>
#include <cmath>

#include "amap/error.hpp"
#include "amap/geometry.hpp"

namespace amap {

Toponym::Toponym(std::string name) : name_(std::move(name)) {
  if (name_.empty()) throw Error(ErrorCode::InvalidToponym, "toponym is empty");
  for (unsigned char ch : name_) {
    if (ch < 0x20 || ch == 0x7f) {
      throw Error(ErrorCode::InvalidToponym, "toponym contains a control character");
    }
  }
}

bool SpringTemplate::uses_context() const {
  return std::any_of(endpoints.begin(), endpoints.end(),
                     [](const EndpointRole& e) { return e.role == Role::Context; });
}

void PrepositionLexicon::add_layout(std::string preposition, Entry entry) {
  hierarchy_.erase(preposition);
  layout_.insert_or_assign(std::move(preposition), std::move(entry));
}

void PrepositionLexicon::add_hierarchy(std::string preposition, bool figure_is_child) {
  layout_.erase(preposition);
  hierarchy_.insert_or_assign(std::move(preposition), figure_is_child);
}

bool PrepositionLexicon::knows(std::string_view preposition) const {
  return layout_.find(preposition) != layout_.end() ||
         hierarchy_.find(preposition) != hierarchy_.end();
}

bool PrepositionLexicon::is_hierarchy(std::string_view preposition) const {
  return hierarchy_.find(preposition) != hierarchy_.end();
}

LexiconResult PrepositionLexicon::lookup(std::string_view preposition,
                                         std::size_t referent_count) const {
  if (auto h = hierarchy_.find(preposition); h != hierarchy_.end()) {
    return HierarchyMarker{h->second};
  }
  auto it = layout_.find(preposition);
  if (it == layout_.end()) {
    throw Error(ErrorCode::UnknownPreposition, "'" + std::string(preposition) + "'");
  }
  const Entry& entry = it->second;
  if (referent_count == 0) throw Error(ErrorCode::EmptyReferents, "no referents");
  if (entry.arity && *entry.arity != referent_count) {
    throw Error(ErrorCode::ArityMismatch, "'" + std::string(preposition) + "' takes " +
                                              std::to_string(*entry.arity) + " referents, got " +
                                              std::to_string(referent_count));
  }
  if (!entry.per_referent) return entry.templates;

  std::vector<SpringTemplate> out;
  out.reserve(entry.templates.size() * referent_count);
  for (std::size_t r = 0; r < referent_count; ++r) {
    for (SpringTemplate t : entry.templates) {
      for (EndpointRole& e : t.endpoints) {
        if (e.role == Role::Referent) e.referent = r;
      }
      out.push_back(std::move(t));
    }
  }
  return out;
}

namespace {

constexpr EndpointRole kFigure{Role::Figure, 0};
constexpr EndpointRole kContext{Role::Context, 0};
constexpr EndpointRole referent(std::size_t i = 0) { return {Role::Referent, i}; }

SpringTemplate distance(EndpointRole a, EndpointRole b, double k, double multiplier) {
  return {SpringKind::Distance, {a, b}, k, multiplier, std::nullopt};
}

SpringTemplate absolute(EndpointRole a, EndpointRole b, double k, double angle) {
  return {SpringKind::AbsoluteAngle, {a, b}, k, std::nullopt, angle};
}

SpringTemplate relative(EndpointRole a, EndpointRole vertex, EndpointRole c, double k,
                        double angle) {
  return {SpringKind::RelativeAngle, {a, vertex, c}, k, std::nullopt, angle};
}

PrepositionLexicon build_default_lexicon() {
  using Entry = PrepositionLexicon::Entry;
  PrepositionLexicon lex;

  // Relative angles are measured at the referent from the context to the
  // figure, counter-clockwise positive. Seen from the context looking at the
  // referent, "right of" puts the figure at +90 degrees.
  lex.add_layout("right of", Entry{{relative(kFigure, referent(), kContext, 1.0, kPi / 2),
                                    distance(kFigure, referent(), 0.1, 0.5)}});
  lex.add_layout("left of", Entry{{relative(kFigure, referent(), kContext, 1.0, -kPi / 2),
                                   distance(kFigure, referent(), 0.1, 0.5)}});
  for (const char* word : {"past", "beyond"}) {
    lex.add_layout(word, Entry{{relative(kFigure, referent(), kContext, 0.5, kPi),
                                distance(kFigure, referent(), 0.1, 1.0)}});
  }
  lex.add_layout("between",
                 Entry{{distance(kFigure, referent(0), 0.5, 0.5),
                        distance(kFigure, referent(1), 0.5, 0.5),
                        relative(referent(0), kFigure, referent(1), 0.5, kPi)},
                       false,
                       2});
  for (const char* word : {"near", "beside", "by"}) {
    lex.add_layout(word, Entry{{distance(kFigure, referent(), 1.0, 0.5)}});
  }
  // Figure on the way from the context to the referent.
  lex.add_layout("towards", Entry{{relative(kContext, kFigure, referent(), 0.5, kPi),
                                   distance(kFigure, referent(), 0.01, 1.0)}});
  lex.add_layout("north of", Entry{{absolute(kFigure, referent(), 1.0, kPi / 2)}});
  lex.add_layout("south of", Entry{{absolute(kFigure, referent(), 1.0, -kPi / 2)}});
  lex.add_layout("west of", Entry{{absolute(kFigure, referent(), 1.0, kPi)}});
  // Referent lies west of the figure.
  lex.add_layout("east of", Entry{{absolute(referent(), kFigure, 1.0, kPi)}});

  for (const char* word : {"in", "inside", "within"}) lex.add_hierarchy(word, true);
  lex.add_hierarchy("contains", false);
  return lex;
}

}  // namespace

const PrepositionLexicon& default_lexicon() {
  static const PrepositionLexicon lexicon = build_default_lexicon();
  return lexicon;
}

LexiconResult lexicon_lookup(std::string_view preposition, std::size_t referent_count) {
  return default_lexicon().lookup(preposition, referent_count);
}

RelationalClause make_relational(std::string preposition, Toponym figure,
                                 std::vector<Toponym> referents, std::optional<Toponym> context,
                                 const PrepositionLexicon& lexicon) {
  if (!lexicon.knows(preposition)) {
    throw Error(ErrorCode::UnknownPreposition, "'" + preposition + "'");
  }
  if (referents.empty()) throw Error(ErrorCode::EmptyReferents, "no referents");
  if (std::find(referents.begin(), referents.end(), figure) != referents.end()) {
    throw Error(ErrorCode::FigureIsReferent, "'" + figure.str() + "' is its own referent");
  }
  // Arity errors surface here rather than at translation time.
  (void)lexicon.lookup(preposition, referents.size());
  return RelationalClause{std::move(preposition), std::move(figure), std::move(referents),
                          std::move(context)};
}

LocationalClause make_locational(Toponym toponym, Frame frame, double x, double y,
                                 std::optional<double> r, std::optional<double> theta) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw Error(ErrorCode::NonFiniteCoordinate, "coordinates must be finite");
  }
  if (r) {
    if (!std::isfinite(*r)) throw Error(ErrorCode::NonFiniteCoordinate, "range is not finite");
    if (*r < 0.0) throw Error(ErrorCode::NegativeRange, "range must be >= 0");
  }
  if (theta) {
    if (!std::isfinite(*theta)) {
      throw Error(ErrorCode::NonFiniteCoordinate, "direction is not finite");
    }
    theta = wrap_angle(*theta);
  }
  return LocationalClause{std::move(toponym), frame, x, y, r, theta};
}

bool is_hierarchy_clause(const RelationalClause& clause, const PrepositionLexicon& lexicon) {
  return lexicon.is_hierarchy(clause.preposition);
}

bool is_label(const LocationalClause& clause) { return clause.r && *clause.r == 0.0; }

}  // namespace amap
