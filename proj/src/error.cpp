#include "amap/error.hpp"

namespace amap {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidToponym: return "InvalidToponym";
    case ErrorCode::UnknownPreposition: return "UnknownPreposition";
    case ErrorCode::EmptyReferents: return "EmptyReferents";
    case ErrorCode::FigureIsReferent: return "FigureIsReferent";
    case ErrorCode::NegativeRange: return "NegativeRange";
    case ErrorCode::NonFiniteCoordinate: return "NonFiniteCoordinate";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::CyclicGraph: return "CyclicGraph";
    case ErrorCode::HierarchyLevelConflict: return "HierarchyLevelConflict";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::InvalidSpring: return "InvalidSpring";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::NonPositiveRatio: return "NonPositiveRatio";
    case ErrorCode::UnknownToponym: return "UnknownToponym";
    case ErrorCode::NonFinitePose: return "NonFinitePose";
    case ErrorCode::NonFiniteCentre: return "NonFiniteCentre";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::CueOnWall: return "CueOnWall";
    case ErrorCode::GoalUnreachableByLabel: return "GoalUnreachableByLabel";
    case ErrorCode::NoProgress: return "NoProgress";
    case ErrorCode::MalformedTrace: return "MalformedTrace";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace amap
