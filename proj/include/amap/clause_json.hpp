#pragma once

#include <vector>

#include <json.hpp>

#include "amap/grammar.hpp"

namespace amap {

nlohmann::ordered_json clause_to_json(const Clause& clause);
Clause clause_from_json(const nlohmann::json& j,
                        const PrepositionLexicon& lexicon = default_lexicon());

// Validates every element; errors carry the clause index.
std::vector<Clause> clauses_from_json(const nlohmann::json& array,
                                      const PrepositionLexicon& lexicon = default_lexicon());
nlohmann::ordered_json clauses_to_json(const std::vector<Clause>& clauses);

}  // namespace amap
