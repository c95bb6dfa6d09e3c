#include "amap/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "amap/clause_json.hpp"
#include "amap/error.hpp"
#include "amap/svg.hpp"

namespace amap::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto log = std::make_shared<spdlog::logger>("amap", sink);
  log->set_pattern("[%l] %v");
  log->set_level(spdlog::level::warn);
  if (const char* env = std::getenv("AMAP_LOG")) {
    const std::string level = env;
    if (level == "error") log->set_level(spdlog::level::err);
    else if (level == "warn") log->set_level(spdlog::level::warn);
    else if (level == "info") log->set_level(spdlog::level::info);
    else if (level == "debug") log->set_level(spdlog::level::debug);
  }
  return log;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::SchemaError, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::SchemaError, "cannot write '" + path.string() + "'");
}

std::string describe(const Error& e) {
  std::string msg = std::string(to_string(e.code())) + ": " + e.what();
  if (e.line) {
    msg += " (line " + std::to_string(*e.line);
    if (e.column) msg += ", column " + std::to_string(*e.column);
    msg += ")";
  }
  if (e.clause_index) msg += " (clause " + std::to_string(*e.clause_index) + ")";
  return msg;
}

struct RunOptions {
  std::string scenario;
  std::string goal;
  bool all_goals = false;
  std::uint64_t seed = 1;
  std::uint64_t seeds = 0;
  std::string trace_dir = ".";
  std::size_t svg_every = 0;
  double max_distance = 500.0;
};

struct TrialJob {
  Toponym goal;
  std::uint64_t seed;
};

void write_snapshots(const fs::path& dir, const std::string& stem,
                     const std::vector<TraceEvent>& trace, std::size_t every) {
  std::size_t imagines = 0;
  for (const TraceEvent& e : trace) {
    if (e.kind == EventKind::Imagine) ++imagines;
  }
  for (std::size_t k = 0; k < imagines; k += every) {
    const std::string svg = render_replay(replay_frame(trace, k));
    write_file(dir / (stem + "_frame" + std::to_string(k) + ".svg"), svg);
  }
}

int cmd_run(const RunOptions& opt, std::ostream& out, spdlog::logger& log) {
  Scenario scenario = load_world_file(opt.scenario);
  std::vector<TrialJob> jobs;
  std::vector<Toponym> goals;
  if (opt.all_goals) {
    goals = scenario.goals;
  } else {
    goals.emplace_back(opt.goal);
    const bool listed = std::find(scenario.goals.begin(), scenario.goals.end(), goals.front()) !=
                        scenario.goals.end();
    if (!listed && !scenario.hierarchy.contains(goals.front())) {
      throw Error(ErrorCode::InvalidConfig, "goal '" + opt.goal + "' is not part of the scenario");
    }
  }
  std::vector<std::uint64_t> seeds;
  if (opt.seeds > 0) {
    for (std::uint64_t s = 1; s <= opt.seeds; ++s) seeds.push_back(s);
  } else {
    seeds.push_back(opt.seed);
  }
  for (const Toponym& g : goals) {
    for (std::uint64_t s : seeds) jobs.push_back({g, s});
  }

  const fs::path dir(opt.trace_dir);
  fs::create_directories(dir);

  std::vector<TrialRecord> records(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        TrialConfig trial;
        trial.goal = jobs[i].goal;
        trial.seed = jobs[i].seed;
        trial.distance_budget = opt.max_distance;
        TrialOutcome outcome = run_trial(scenario, trial);
        const std::string stem = trace_file_name(jobs[i].goal.str(), jobs[i].seed);
        std::ostringstream text;
        write_trace(text, outcome.trace);
        write_file(dir / (stem + ".jsonl"), text.str());
        if (opt.svg_every > 0) write_snapshots(dir, stem, outcome.trace, opt.svg_every);
        log.info("{} seed {}: {} after {:.2f} m ({})", jobs[i].goal.str(), jobs[i].seed,
                 outcome.result.success ? "success" : "failure", outcome.result.distance,
                 outcome.result.termination);
        records[i] = {jobs[i].goal.str(), jobs[i].seed, std::move(outcome.result)};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(jobs.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ojson summary{{"scenario", scenario.name}, {"max_distance", opt.max_distance}};
  ojson trials = ojson::array();
  for (const TrialRecord& r : records) {
    ojson cues = ojson::array();
    for (const CueRecord& c : r.result.cue_observations) {
      cues.push_back({{"id", c.cue_id}, {"odometry", c.odometry}});
    }
    trials.push_back({{"goal", r.goal},
                      {"seed", r.seed},
                      {"success", r.result.success},
                      {"distance", r.result.distance},
                      {"termination", r.result.termination},
                      {"exploration_steps", r.result.exploration_steps_fired},
                      {"elapsed_sim_time", r.result.elapsed_sim_time},
                      {"cue_observations", cues}});
  }
  ojson rows = ojson::array();
  for (const GoalSummary& g : summarise(records)) {
    rows.push_back({{"goal", g.goal},
                    {"trials", g.trials},
                    {"successes", g.successes},
                    {"mean_distance", g.mean},
                    {"min_distance", g.min},
                    {"max_distance", g.max}});
    out << g.goal << ": " << g.successes << "/" << g.trials << " successes, mean " << g.mean
        << " m (min " << g.min << ", max " << g.max << ")\n";
  }
  summary["goals"] = std::move(rows);
  summary["trials"] = std::move(trials);
  write_file(dir / "summary.json", summary.dump(2) + "\n");

  if (!opt.all_goals && opt.seeds == 0 && !records.front().result.success) {
    return kExitTrialFailed;
  }
  return kExitOk;
}

int cmd_imagine(const std::string& clauses_path, const std::string& out_path,
                const std::string& energy_path, std::ostream& out) {
  const std::string text = read_file(clauses_path);
  std::vector<Clause> clauses;
  if (text.find_first_not_of(" \t\r\n") != std::string::npos) clauses = parse_clause_set(text);

  AbstractMap map;
  map.add_symbolic_spatial_info(clauses);
  std::vector<EnergySample> energy;
  if (const auto& last = map.last_imagination()) energy = downsample(last->energy);
  write_file(out_path, render_imagination(snapshot_of(map), energy));

  if (!energy_path.empty()) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "t,kinetic,potential,total\n";
    if (const auto& last = map.last_imagination()) {
      for (const EnergySample& s : last->energy) {
        csv << s.t << ',' << s.kinetic << ',' << s.potential << ',' << s.kinetic + s.potential
            << '\n';
      }
    }
    write_file(energy_path, csv.str());
  }
  const auto& last = map.last_imagination();
  out << map.system().size() << " point masses, " << map.springs().size() << " springs, "
      << (!last || last->settled ? "settled" : "not settled");
  if (last) out << " after " << last->sim_time << " s";
  out << '\n';
  return kExitOk;
}

int cmd_replay(const std::string& trace_path, const std::string& out_path,
               std::optional<std::size_t> frame) {
  std::ifstream in(trace_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MalformedTrace, "cannot open '" + trace_path + "'");
  const auto events = parse_trace(in);
  write_file(out_path, render_replay(replay_frame(events, frame)));
  return kExitOk;
}

}  // namespace

std::string trace_file_name(const std::string& goal, std::uint64_t seed) {
  std::string clean;
  for (char c : goal) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
    clean += keep ? c : '_';
  }
  return "trace_" + clean + "_" + std::to_string(seed);
}

std::vector<GoalSummary> summarise(const std::vector<TrialRecord>& records) {
  std::vector<GoalSummary> out;
  for (const TrialRecord& r : records) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const GoalSummary& g) { return g.goal == r.goal; });
    if (it == out.end()) {
      out.push_back({r.goal, 0, 0, 0.0, r.result.distance, r.result.distance});
      it = std::prev(out.end());
    }
    ++it->trials;
    if (r.result.success) ++it->successes;
    it->mean += r.result.distance;
    it->min = std::min(it->min, r.result.distance);
    it->max = std::max(it->max, r.result.distance);
  }
  for (GoalSummary& g : out) g.mean /= static_cast<double>(g.trials);
  return out;
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto log = make_logger(err);
  CLI::App app{"Abstract-map navigation from symbolic spatial information", "amap"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run navigation trials in a scenario");
  run_cmd->add_option("--scenario", run.scenario, "Scenario JSON")->required();
  auto* goal_opt = run_cmd->add_option("--goal", run.goal, "Goal toponym");
  auto* all_opt = run_cmd->add_flag("--all-goals", run.all_goals, "Every goal in the scenario");
  goal_opt->excludes(all_opt);
  auto* seed_opt = run_cmd->add_option("--seed", run.seed, "Seed for a single trial");
  run_cmd->add_option("--seeds", run.seeds, "Run seeds 1..N")->excludes(seed_opt);
  run_cmd->add_option("--trace", run.trace_dir, "Output directory");
  run_cmd->add_option("--svg-every", run.svg_every, "Snapshot every K-th imagination");
  run_cmd->add_option("--max-distance", run.max_distance, "Distance budget (m)")
      ->check(CLI::PositiveNumber);

  std::string clauses_path, imagine_out, energy_path;
  auto* imagine_cmd = app.add_subcommand("imagine", "Imagine a layout from a clause file");
  imagine_cmd->add_option("--clauses", clauses_path, "Clause JSON")->required();
  imagine_cmd->add_option("--out", imagine_out, "SVG output")->required();
  imagine_cmd->add_option("--energy", energy_path, "Energy CSV output");

  std::string trace_path, replay_out;
  std::optional<std::size_t> frame;
  auto* replay_cmd = app.add_subcommand("replay", "Render a trial trace");
  replay_cmd->add_option("--trace", trace_path, "Trace JSONL")->required();
  replay_cmd->add_option("--out", replay_out, "SVG output")->required();
  replay_cmd->add_option("--frame", frame, "Render after the K-th imagination (0-based)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help, error;
    const int code = app.exit(e, help, error);
    out << help.str();
    err << error.str();
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*run_cmd) {
      if (!run.all_goals && run.goal.empty()) {
        err << "run: one of --goal or --all-goals is required\n";
        return kExitInvalid;
      }
      return cmd_run(run, out, *log);
    }
    if (*imagine_cmd) return cmd_imagine(clauses_path, imagine_out, energy_path, out);
    if (*replay_cmd) return cmd_replay(trace_path, replay_out, frame);
  } catch (const Error& e) {
    log->error("{}", describe(e));
    return kExitInvalid;
  } catch (const std::exception& e) {
    log->error("{}", e.what());
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace amap::cli
