#pragma once
// The abstract map: clauses in, malleable spatial model out. Ties the
// grammar to the spring-mass dynamics and reconciles the imagined model with
// observations of navigation cues.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "amap/grammar.hpp"
#include "amap/hierarchy.hpp"
#include "amap/model.hpp"
#include "amap/solver.hpp"

namespace amap {

// Unordered pair of hierarchy levels, stored as (min, max).
struct LevelPair {
  int low = 1;
  int high = 1;

  static LevelPair of(int a, int b) { return a <= b ? LevelPair{a, b} : LevelPair{b, a}; }
  friend auto operator<=>(const LevelPair&, const LevelPair&) = default;
};

struct ScaleObservation {
  double weight = 0.0;  // stiffness K_i
  double ratio = 0.0;   // r_o / r_n
};

// Stiffness-weighted arithmetic mean of observed/natural length ratios.
double weighted_mean_ratio(std::span<const ScaleObservation> observations);

class ScalingFactors {
 public:
  // Default starting values in metres, keyed by level pair.
  static const std::map<LevelPair, double>& defaults();

  double default_length(LevelPair pair) const;
  // 1 until something has been observed for the pair.
  double ratio(LevelPair pair) const;
  // default_length * ratio
  double current(LevelPair pair) const;

  // Throws NonPositiveWeight / NonPositiveRatio.
  void update(LevelPair pair, double weight, double ratio);

  const std::vector<ScaleObservation>& observations(LevelPair pair) const;

 private:
  struct Entry {
    std::vector<ScaleObservation> observations;
    double mean = 1.0;
  };
  std::map<LevelPair, Entry> entries_;
};

class ExplorationFactor {
 public:
  explicit ExplorationFactor(double step = 1.25) : step_(step) {}

  double value() const { return value_; }
  double step() const { return step_; }
  int failures() const { return failures_; }

  void expand() { value_ *= step_; ++failures_; }
  void reset() { value_ = 1.0; failures_ = 0; }

 private:
  double step_;
  double value_ = 1.0;
  int failures_ = 0;
};

// A detected cue: its world pose and its clauses. Locational clauses may be
// in the cue frame or already transformed to the world frame.
struct CueObservation {
  std::string cue_id;
  Vec2 position;
  double heading = 0.0;
  std::vector<Clause> clauses;
};

// Per-spring bookkeeping needed to recompute natural lengths.
struct SpringMeta {
  double multiplier = 1.0;  // natural length = multiplier * alpha * E
  LevelPair levels;
  bool counted_in_scaling = false;
};

class AbstractMap {
 public:
  explicit AbstractMap(SolverConfig cfg = {},
                       const PrepositionLexicon& lexicon = default_lexicon());

  // Registers node levels then loads the graph's containment clauses.
  void preload_hierarchy(const HierarchyGraph& graph);

  // Returns false (and leaves the state untouched) when `clauses` is empty.
  bool add_symbolic_spatial_info(const std::vector<Clause>& clauses);
  void observe_cue(const CueObservation& observation);
  void on_goal_not_found();

  // Throws UnknownToponym.
  Vec2 imagined_location(const Toponym& goal) const;
  bool knows(const Toponym& name) const { return system_.contains(name); }

  // Stored for the next imagination; nullopt disables expansion.
  void set_explored_centre(std::optional<Vec2> centre);
  std::optional<Vec2> explored_centre() const { return centre_; }

  // Relaxes the current model (normally called internally).
  const ImagineResult& reimagine();

  void update_scaling_factor(LevelPair pair, double weight, double ratio);

  const std::vector<Clause>& clauses() const { return clauses_; }
  const HierarchyGraph& hierarchy() const { return hierarchy_; }
  const ScalingFactors& scaling() const { return scaling_; }
  const ExplorationFactor& exploration() const { return exploration_; }
  const SystemState& system() const { return system_; }
  const std::vector<SpringSpec>& springs() const { return springs_; }
  const std::vector<SpringMeta>& spring_meta() const { return meta_; }
  const std::map<Toponym, Vec2>& observed_places() const { return observed_; }
  const SolverConfig& config() const { return cfg_; }
  // Result of the most recent imagination, if any ran.
  const std::optional<ImagineResult>& last_imagination() const { return last_; }
  std::size_t imagination_count() const { return imaginations_; }

  // Natural length a template/hierarchy distance spring should have now.
  double effective_length(double multiplier, LevelPair pair) const;

 private:
  struct Pending;

  void translate_relational(const RelationalClause& clause,
                            const std::optional<Toponym>& default_context, Pending& pending) const;
  void translate_locational(const LocationalClause& clause, const std::string& cue_id,
                            Vec2 cue_position, double cue_heading, Pending& pending) const;
  Toponym anchor_name(Pending& pending, const std::string& cue_id, Vec2 point) const;
  void commit(Pending& pending);
  LevelPair levels_of(const Toponym& a, const Toponym& b) const;
  void refresh_scaling();
  void refresh_lengths();
  // Free masses held only by hierarchy springs; they are re-placed on every
  // model update.
  std::vector<std::size_t> loose_masses() const;

  SolverConfig cfg_;
  const PrepositionLexicon* lexicon_;
  std::vector<Clause> clauses_;
  HierarchyGraph hierarchy_;
  ScalingFactors scaling_;
  ExplorationFactor exploration_;
  SystemState system_;
  std::vector<SpringSpec> springs_;
  std::vector<SpringMeta> meta_;
  std::map<std::string, std::vector<std::pair<Vec2, Toponym>>> anchors_;
  std::map<Toponym, Vec2> observed_;
  std::optional<Vec2> centre_;
  std::optional<ImagineResult> last_;
  std::size_t imaginations_ = 0;
};

}  // namespace amap
