#pragma once
// Command-line front end: run, imagine and replay.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "amap/navigator.hpp"

namespace amap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitTrialFailed = 2;

// `args` excludes the program name.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct GoalSummary {
  std::string goal;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct TrialRecord {
  std::string goal;
  std::uint64_t seed = 0;
  TrialResult result;
};

// Per-goal distance statistics, goals in first-seen order.
std::vector<GoalSummary> summarise(const std::vector<TrialRecord>& records);

// Trace file name with the goal reduced to [A-Za-z0-9_-].
std::string trace_file_name(const std::string& goal, std::uint64_t seed);

}  // namespace amap::cli
