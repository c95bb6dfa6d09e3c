#include "amap/clause_json.hpp"

#include <string>

#include "amap/error.hpp"

namespace amap {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

Error malformed(const std::string& what) { return Error(ErrorCode::SyntaxError, what); }

std::string required_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw malformed(std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::optional<double> optional_number(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw malformed(std::string("field '") + key + "' must be a number or null");
  return it->get<double>();
}

ordered_json optional_to_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

ordered_json clause_to_json(const Clause& clause) {
  ordered_json j;
  if (const auto* rel = std::get_if<RelationalClause>(&clause)) {
    j["kind"] = "rel";
    j["pred"] = rel->preposition;
    j["figure"] = rel->figure.str();
    ordered_json refs = ordered_json::array();
    for (const auto& r : rel->referents) refs.push_back(r.str());
    j["referents"] = std::move(refs);
    j["context"] = rel->context ? ordered_json(rel->context->str()) : ordered_json(nullptr);
  } else {
    const auto& loc = std::get<LocationalClause>(clause);
    j["kind"] = "loc";
    j["toponym"] = loc.toponym.str();
    j["frame"] = loc.frame == Frame::World ? "world" : "cue";
    j["x"] = loc.x;
    j["y"] = loc.y;
    j["r"] = optional_to_json(loc.r);
    j["theta"] = optional_to_json(loc.theta);
  }
  return j;
}

Clause clause_from_json(const json& j, const PrepositionLexicon& lexicon) {
  if (!j.is_object()) throw malformed("clause must be an object");
  const std::string kind = required_string(j, "kind");
  if (kind == "rel") {
    auto refs = j.find("referents");
    if (refs == j.end() || !refs->is_array()) throw malformed("'referents' must be an array");
    std::vector<Toponym> referents;
    for (const auto& r : *refs) {
      if (!r.is_string()) throw malformed("referents must be strings");
      referents.emplace_back(r.get<std::string>());
    }
    std::optional<Toponym> context;
    if (auto c = j.find("context"); c != j.end() && !c->is_null()) {
      if (!c->is_string()) throw malformed("'context' must be a string or null");
      context.emplace(c->get<std::string>());
    }
    return make_relational(required_string(j, "pred"), Toponym(required_string(j, "figure")),
                           std::move(referents), std::move(context), lexicon);
  }
  if (kind == "loc") {
    Frame frame = Frame::World;
    if (auto f = j.find("frame"); f != j.end() && !f->is_null()) {
      if (*f == "world") {
        frame = Frame::World;
      } else if (*f == "cue") {
        frame = Frame::Cue;
      } else {
        throw malformed("'frame' must be \"world\" or \"cue\"");
      }
    }
    return make_locational(Toponym(required_string(j, "toponym")), frame,
                           optional_number(j, "x").value_or(0.0),
                           optional_number(j, "y").value_or(0.0), optional_number(j, "r"),
                           optional_number(j, "theta"));
  }
  throw malformed("unknown clause kind '" + kind + "'");
}

std::vector<Clause> clauses_from_json(const json& array, const PrepositionLexicon& lexicon) {
  if (!array.is_array()) throw malformed("clause set must be a JSON array");
  std::vector<Clause> out;
  out.reserve(array.size());
  for (std::size_t i = 0; i < array.size(); ++i) {
    try {
      out.push_back(clause_from_json(array[i], lexicon));
    } catch (Error& e) {
      e.clause_index = i;
      throw;
    }
  }
  return out;
}

ordered_json clauses_to_json(const std::vector<Clause>& clauses) {
  ordered_json out = ordered_json::array();
  for (const auto& c : clauses) out.push_back(clause_to_json(c));
  return out;
}

std::vector<Clause> parse_clause_set(std::string_view text, const PrepositionLexicon& lexicon) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    Error err(ErrorCode::SyntaxError, "line " + std::to_string(line) + ", column " +
                                          std::to_string(column) + ": " + e.what());
    err.line = line;
    err.column = column;
    throw err;
  }
  return clauses_from_json(doc, lexicon);
}

std::string serialize_clause_set(const std::vector<Clause>& clauses) {
  return clauses_to_json(clauses).dump();
}

}  // namespace amap
