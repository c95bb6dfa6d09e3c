#include "amap/abstract_map.hpp"

#include <algorithm>
#include <cmath>

#include "amap/error.hpp"

namespace amap {

double weighted_mean_ratio(std::span<const ScaleObservation> observations) {
  double num = 0.0, den = 0.0;
  for (const auto& o : observations) {
    num += o.weight * o.ratio;
    den += o.weight;
  }
  return den > 0.0 ? num / den : 1.0;
}

const std::map<LevelPair, double>& ScalingFactors::defaults() {
  static const std::map<LevelPair, double> table{
      {{1, 1}, 4.0}, {{1, 2}, 5.0}, {{1, 3}, 20.0}, {{2, 2}, 15.0}, {{2, 3}, 15.0}, {{3, 3}, 50.0},
  };
  return table;
}

double ScalingFactors::default_length(LevelPair pair) const {
  // Levels above the table reuse the top row.
  const LevelPair clamped = LevelPair::of(std::clamp(pair.low, 1, 3), std::clamp(pair.high, 1, 3));
  return defaults().at(clamped);
}

double ScalingFactors::ratio(LevelPair pair) const {
  auto it = entries_.find(pair);
  return it == entries_.end() ? 1.0 : it->second.mean;
}

double ScalingFactors::current(LevelPair pair) const { return default_length(pair) * ratio(pair); }

void ScalingFactors::update(LevelPair pair, double weight, double ratio) {
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw Error(ErrorCode::NonPositiveWeight, "scaling weight must be > 0");
  }
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw Error(ErrorCode::NonPositiveRatio, "scaling ratio must be > 0");
  }
  Entry& e = entries_[pair];
  e.observations.push_back({weight, ratio});
  e.mean = weighted_mean_ratio(e.observations);
}

const std::vector<ScaleObservation>& ScalingFactors::observations(LevelPair pair) const {
  static const std::vector<ScaleObservation> none;
  auto it = entries_.find(pair);
  return it == entries_.end() ? none : it->second.observations;
}

AbstractMap::AbstractMap(SolverConfig cfg, const PrepositionLexicon& lexicon)
    : cfg_(cfg), lexicon_(&lexicon) {
  cfg_.validate();
}

void AbstractMap::preload_hierarchy(const HierarchyGraph& graph) {
  graph.validate();
  for (const auto& node : graph.nodes()) {
    if (!hierarchy_.contains(node.name)) hierarchy_.set_node(node.name, node.level);
  }
  std::vector<Clause> clauses;
  for (auto& c : hierarchy_to_clauses(graph)) clauses.emplace_back(std::move(c));
  add_symbolic_spatial_info(clauses);
}

double AbstractMap::effective_length(double multiplier, LevelPair pair) const {
  return multiplier * scaling_.current(pair) * exploration_.value();
}

LevelPair AbstractMap::levels_of(const Toponym& a, const Toponym& b) const {
  return LevelPair::of(hierarchy_.level_or_default(a), hierarchy_.level_or_default(b));
}

namespace {

std::string anchor_base(const std::string& cue_id) { return "@" + cue_id; }

}  // namespace

struct AbstractMap::Pending {
  HierarchyGraph hierarchy;
  std::vector<SpringDraft> drafts;
  std::vector<SpringMeta> meta;
  struct Anchor {
    std::string cue_id;
    Vec2 point;
    Toponym name;
  };
  std::vector<Anchor> anchors;
  std::map<Toponym, Vec2> labels;
};

Toponym AbstractMap::anchor_name(Pending& pending, const std::string& cue_id, Vec2 point) const {
  if (auto it = anchors_.find(cue_id); it != anchors_.end()) {
    for (const auto& [p, name] : it->second) {
      if (p == point) return name;
    }
  }
  std::size_t count = 0;
  if (auto it = anchors_.find(cue_id); it != anchors_.end()) count = it->second.size();
  for (const auto& a : pending.anchors) {
    if (a.cue_id != cue_id) continue;
    if (a.point == point) return a.name;
    ++count;
  }
  Toponym name(count == 0 ? anchor_base(cue_id) : anchor_base(cue_id) + "#" + std::to_string(count));
  pending.anchors.push_back({cue_id, point, name});
  return name;
}

void AbstractMap::translate_relational(const RelationalClause& clause,
                                       const std::optional<Toponym>& default_context,
                                       Pending& pending) const {
  const LexiconResult found = lexicon_->lookup(clause.preposition, clause.referents.size());
  if (const auto* marker = std::get_if<HierarchyMarker>(&found)) {
    for (const Toponym& r : clause.referents) {
      const Toponym& parent = marker->figure_is_child ? r : clause.figure;
      const Toponym& child = marker->figure_is_child ? clause.figure : r;
      if (!pending.hierarchy.add_containment(parent, child)) continue;
      pending.drafts.push_back({SpringKind::Distance, {child, parent}, kHierarchyStiffness, 0.0,
                                SpringOrigin::Hierarchy});
      pending.meta.push_back({1.0, {}, false});
    }
    return;
  }

  const std::optional<Toponym> context = clause.context ? clause.context : default_context;
  for (const SpringTemplate& t : std::get<std::vector<SpringTemplate>>(found)) {
    if (t.uses_context() && !context) continue;
    std::vector<Toponym> ends;
    for (const EndpointRole& e : t.endpoints) {
      switch (e.role) {
        case Role::Figure: ends.push_back(clause.figure); break;
        case Role::Referent: ends.push_back(clause.referents.at(e.referent)); break;
        case Role::Context: ends.push_back(*context); break;
      }
    }
    // A context that coincides with another endpoint carries no information.
    bool distinct = true;
    for (std::size_t i = 0; i < ends.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) distinct = distinct && !(ends[i] == ends[j]);
    }
    if (!distinct) continue;
    if (t.kind == SpringKind::Distance) {
      pending.drafts.push_back({t.kind, ends, t.stiffness, 0.0, SpringOrigin::Template});
      pending.meta.push_back({*t.length_multiplier, {}, false});
    } else {
      pending.drafts.push_back({t.kind, ends, t.stiffness, *t.natural_angle, SpringOrigin::Template});
      pending.meta.push_back({1.0, {}, false});
    }
  }
}

void AbstractMap::commit(Pending& pending) {
  hierarchy_ = std::move(pending.hierarchy);
  for (const auto& a : pending.anchors) {
    system_.add(PointMass{a.name, kPointMass, true, a.point, {}});
    anchors_[a.cue_id].emplace_back(a.point, a.name);
  }
  for (const auto& [name, point] : pending.labels) observed_.try_emplace(name, point);
  // Natural lengths of fresh distance springs must be right before placement.
  for (std::size_t k = 0; k < pending.drafts.size(); ++k) {
    SpringDraft& d = pending.drafts[k];
    if (d.kind != SpringKind::Distance || d.origin == SpringOrigin::Observation) continue;
    pending.meta[k].levels = levels_of(d.endpoints[0], d.endpoints[1]);
    d.natural = effective_length(pending.meta[k].multiplier, pending.meta[k].levels);
  }
  const std::vector<std::size_t> loose = loose_masses();
  add_clauses(pending.drafts, system_, springs_, cfg_, loose, centre_);
  meta_.insert(meta_.end(), pending.meta.begin(), pending.meta.end());
}

bool AbstractMap::add_symbolic_spatial_info(const std::vector<Clause>& clauses) {
  if (clauses.empty()) return false;
  Pending pending;
  pending.hierarchy = hierarchy_;
  bool observed = false;
  for (const Clause& c : clauses) {
    if (const auto* rel = std::get_if<RelationalClause>(&c)) {
      translate_relational(*rel, std::nullopt, pending);
    } else {
      const auto& loc = std::get<LocationalClause>(c);
      translate_locational(loc, "clause", {}, 0.0, pending);
      observed = true;
    }
  }
  if (observed) exploration_.reset();
  clauses_.insert(clauses_.end(), clauses.begin(), clauses.end());
  commit(pending);
  refresh_scaling();
  refresh_lengths();
  reimagine();
  return true;
}

void AbstractMap::translate_locational(const LocationalClause& loc, const std::string& cue_id,
                                       Vec2 cue_position, double cue_heading, Pending& pending) const {
  Vec2 point{loc.x, loc.y};
  std::optional<double> direction = loc.theta;
  if (loc.frame == Frame::Cue) {
    point = cue_position + rotate(point, cue_heading);
    if (direction) direction = wrap_angle(*direction + cue_heading);
  }
  const Toponym anchor = anchor_name(pending, cue_id, point);
  if (loc.toponym == anchor) return;
  if (loc.r) {
    pending.drafts.push_back({SpringKind::Distance, {loc.toponym, anchor}, kObservationStiffness,
                              *loc.r, SpringOrigin::Observation});
    pending.meta.push_back({1.0, {}, false});
    if (*loc.r == 0.0) pending.labels.try_emplace(loc.toponym, point);
  }
  if (direction) {
    pending.drafts.push_back({SpringKind::AbsoluteAngle, {loc.toponym, anchor},
                              kObservationStiffness, *direction, SpringOrigin::Observation});
    pending.meta.push_back({1.0, {}, false});
  }
}

void AbstractMap::observe_cue(const CueObservation& observation) {
  if (!is_finite(observation.position) || !std::isfinite(observation.heading)) {
    throw Error(ErrorCode::NonFinitePose, "cue '" + observation.cue_id + "' has a non-finite pose");
  }
  Pending pending;
  pending.hierarchy = hierarchy_;
  const Toponym cue_anchor = anchor_name(pending, observation.cue_id, observation.position);
  for (const Clause& c : observation.clauses) {
    if (const auto* rel = std::get_if<RelationalClause>(&c)) {
      translate_relational(*rel, cue_anchor, pending);
    } else {
      translate_locational(std::get<LocationalClause>(c), observation.cue_id,
                           observation.position, observation.heading, pending);
    }
  }
  exploration_.reset();
  clauses_.insert(clauses_.end(), observation.clauses.begin(), observation.clauses.end());
  commit(pending);
  refresh_scaling();
  refresh_lengths();
  reimagine();
}

void AbstractMap::on_goal_not_found() {
  exploration_.expand();
  refresh_lengths();
  const std::vector<std::size_t> loose = loose_masses();
  place_masses(loose, springs_, system_, cfg_, centre_);
  reimagine();
}

void AbstractMap::update_scaling_factor(LevelPair pair, double weight, double ratio) {
  scaling_.update(pair, weight, ratio);
  refresh_lengths();
}

void AbstractMap::refresh_scaling() {
  for (std::size_t k = 0; k < springs_.size(); ++k) {
    const SpringSpec& s = springs_[k];
    SpringMeta& m = meta_[k];
    if (m.counted_in_scaling || s.kind != SpringKind::Distance ||
        s.origin == SpringOrigin::Observation) {
      continue;
    }
    const Toponym& a = system_[s.endpoints[0]].toponym;
    const Toponym& b = system_[s.endpoints[1]].toponym;
    auto pa = observed_.find(a);
    auto pb = observed_.find(b);
    if (pa == observed_.end() || pb == observed_.end()) continue;
    const double observed_length = norm(pa->second - pb->second);
    m.counted_in_scaling = true;
    const LevelPair pair = levels_of(a, b);
    const double assumed = m.multiplier * scaling_.default_length(pair);
    if (observed_length > 0.0 && assumed > 0.0) {
      scaling_.update(pair, s.stiffness, observed_length / assumed);
    }
  }
}

std::vector<std::size_t> AbstractMap::loose_masses() const {
  std::vector<int> state(system_.size(), 0);  // 0 no springs, 1 hierarchy only, 2 other
  for (const SpringSpec& s : springs_) {
    for (std::size_t e = 0; e < s.endpoint_count(); ++e) {
      int& v = state[s.endpoints[e]];
      v = std::max(v, s.origin == SpringOrigin::Hierarchy ? 1 : 2);
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] == 1 && !system_[i].fixed) out.push_back(i);
  }
  return out;
}

void AbstractMap::refresh_lengths() {
  for (std::size_t k = 0; k < springs_.size(); ++k) {
    SpringSpec& s = springs_[k];
    if (s.kind != SpringKind::Distance || s.origin == SpringOrigin::Observation) continue;
    SpringMeta& m = meta_[k];
    m.levels = levels_of(system_[s.endpoints[0]].toponym, system_[s.endpoints[1]].toponym);
    s.natural = effective_length(m.multiplier, m.levels);
  }
}

const ImagineResult& AbstractMap::reimagine() {
  last_ = imagine(system_, springs_, centre_, cfg_);
  system_ = last_->state;
  ++imaginations_;
  return *last_;
}

Vec2 AbstractMap::imagined_location(const Toponym& goal) const {
  auto i = system_.index_of(goal);
  if (!i) throw Error(ErrorCode::UnknownToponym, "'" + goal.str() + "' is not in the model");
  return system_[*i].position;
}

void AbstractMap::set_explored_centre(std::optional<Vec2> centre) {
  if (centre && !is_finite(*centre)) {
    throw Error(ErrorCode::NonFiniteCentre, "explored centre must be finite");
  }
  centre_ = centre;
}

}  // namespace amap
