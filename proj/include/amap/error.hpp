#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace amap {

enum class ErrorCode {
  // grammar
  InvalidToponym,
  UnknownPreposition,
  EmptyReferents,
  FigureIsReferent,
  NegativeRange,
  NonFiniteCoordinate,
  SyntaxError,
  ArityMismatch,
  CyclicGraph,
  HierarchyLevelConflict,
  // model / solver
  NonFinite,
  NonFiniteState,
  InvalidSpring,
  InvalidConfig,
  // abstract map
  NonPositiveWeight,
  NonPositiveRatio,
  UnknownToponym,
  NonFinitePose,
  NonFiniteCentre,
  // world
  SchemaError,
  CueOnWall,
  GoalUnreachableByLabel,
  NoProgress,
  // cli
  MalformedTrace,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

  // Index of the offending clause inside a parsed clause list, when known.
  std::optional<std::size_t> clause_index;
  // 1-based text position for syntax errors.
  std::optional<std::size_t> line;
  std::optional<std::size_t> column;

 private:
  ErrorCode code_;
};

}  // namespace amap
