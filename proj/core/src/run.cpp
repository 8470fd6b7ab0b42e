#include "thermvisc/run.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <json.hpp>
#include <sstream>

#include "thermvisc/errors.hpp"
#include "thermvisc/format.hpp"
#include "thermvisc/snapshot.hpp"

#ifndef THERMVISC_VERSION_STRING
#define THERMVISC_VERSION_STRING "unknown"
#endif

namespace thermvisc {

const char* version() { return THERMVISC_VERSION_STRING; }

template <int D>
Trajectory simulate(const SimConfig& cfg, const StepObserver<D>& observer) {
  cfg.validate();
  Solver<D> solver(cfg);
  PreparedState<D> prep = solver.initial_state();
  State<D> s = std::move(prep.state);

  Trajectory tr;
  tr.detF_min_before_mollify = prep.detF_min_before;
  tr.detF_min_after_mollify = prep.detF_min_after;
  DiagnosticsTracker<D> tracker(solver.grid(), solver.material(), cfg.eps);
  tr.records.push_back(tracker.observe(s));
  if (cfg.twin_B) {
    tr.twin_deviation.push_back(twin_deviation(s));
    tr.max_twin_deviation = tr.twin_deviation.back();
  }
  if (observer) observer(s, 0, StepEvent::initial);

  double dt_fixed = cfg.dt;
  const double t_end = cfg.t_end;
  std::size_t step = 0;
  bool recorded_last = true;
  DiagnosticsRecord last_rec = tr.records.back();
  double last_dev = tr.max_twin_deviation;
  while (t_end - s.t > 1e-12 * std::max(1.0, t_end)) {
    const double stable = solver.stable_dt(s);
    double dt = stable;
    if (dt_fixed > 0.0) {
      while (dt_fixed > stable) {
        std::ostringstream w;
        w << "step " << step << ": dt = " << format_double(dt_fixed) << " exceeds the CFL bound "
          << format_double(stable) << "; halving";
        tr.warnings.push_back(w.str());
        dt_fixed *= 0.5;
      }
      dt = dt_fixed;
    }
    const double remaining = t_end - s.t;
    bool last = false;
    if (dt >= remaining * (1.0 - 1e-9)) {
      dt = remaining;
      last = true;
    }
    State<D> prev = s;
    try {
      solver.step(s, dt);
      if (last) s.t = t_end;
    } catch (const Error& e) {
      tr.halted = true;
      tr.halt_reason = std::string(dynamic_cast<const StateError*>(&e) ? "state_error: " : "numerical_error: ") +
                       e.what();
      if (!recorded_last) {
        tr.records.push_back(last_rec);
        if (cfg.twin_B) tr.twin_deviation.push_back(last_dev);
      }
      if (observer) observer(prev, step, StepEvent::halt);
      break;
    }
    ++step;
    tr.dt_last = dt;
    last_rec = tracker.observe(s);
    if (cfg.twin_B) {
      last_dev = twin_deviation(s);
      tr.max_twin_deviation = std::max(tr.max_twin_deviation, last_dev);
    }
    recorded_last = step % static_cast<std::size_t>(cfg.csv_every) == 0 || last;
    if (recorded_last) {
      tr.records.push_back(last_rec);
      if (cfg.twin_B) tr.twin_deviation.push_back(last_dev);
    }
    if (observer) observer(s, step, last ? StepEvent::final : StepEvent::step);
  }
  tr.steps = step;
  tr.flags = tracker.flags();
  return tr;
}

template Trajectory simulate<2>(const SimConfig&, const StepObserver<2>&);
template Trajectory simulate<3>(const SimConfig&, const StepObserver<3>&);

Trajectory run(const SimConfig& cfg) {
  if (cfg.grid.d == 2) return simulate<2>(cfg);
  if (cfg.grid.d == 3) return simulate<3>(cfg);
  throw ConfigError("grid.d must be 2 or 3");
}

std::string trajectory_csv(const Trajectory& tr) {
  std::string out = csv_header() + "\n";
  for (const auto& r : tr.records) out += csv_row(r) + "\n";
  return out;
}

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string snapshot_name(std::size_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%08zu.bin", step);
  return buf;
}

template <int D>
Trajectory simulate_to(const SimConfig& cfg, const std::filesystem::path& dir, int every,
                       std::vector<std::string>& outputs) {
  const Grid<D> grid(cfg.grid.n, cfg.grid.L);
  StepObserver<D> obs = [&](const State<D>& s, std::size_t step, StepEvent ev) {
    std::string rel;
    if (ev == StepEvent::halt)
      rel = "snapshots/halt.bin";
    else if (every > 0 && step % static_cast<std::size_t>(every) == 0)
      rel = "snapshots/" + snapshot_name(step);
    if (rel.empty()) return;
    std::filesystem::create_directories(dir / "snapshots");
    write_snapshot((dir / rel).string(), s, grid, step);
    outputs.push_back(rel);
  };
  Trajectory tr = simulate<D>(cfg, obs);
  return tr;
}

}  // namespace

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = version;
  j["start_time"] = start_time;
  j["end_time"] = end_time;
  j["halt_reason"] = halt_reason;
  j["steps"] = steps;
  j["outputs"] = outputs;
  j["warnings"] = warnings;
  j["monitor_flags"] = monitor_flags;
  j["config"] = config_echo;
  return j.dump(2) + "\n";
}

RunResult run_to_directory(const SimConfig& cfg_in, const std::string& out_dir, int snapshot_every) {
  SimConfig cfg = cfg_in;
  if (snapshot_every >= 0) cfg.snapshot_every = snapshot_every;
  cfg.validate();
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  RunResult res;
  RunManifest& man = res.manifest;
  man.version = version();
  man.start_time = utc_now();
  man.config_echo = to_ini(cfg);
  write_file_atomic((dir / "config.ini").string(), man.config_echo);
  man.outputs.push_back("config.ini");

  std::vector<std::string> snaps;
  Trajectory tr;
  try {
    if (cfg.grid.d == 2)
      tr = simulate_to<2>(cfg, dir, cfg.snapshot_every, snaps);
    else
      tr = simulate_to<3>(cfg, dir, cfg.snapshot_every, snaps);
  } catch (const Error& e) {
    tr.halted = true;
    tr.halt_reason = std::string("setup_error: ") + e.what();
  }

  write_file_atomic((dir / "diagnostics.csv").string(), trajectory_csv(tr));
  man.outputs.push_back("diagnostics.csv");
  for (auto& s : snaps) man.outputs.push_back(s);
  man.halt_reason = tr.halt_reason;
  man.steps = tr.steps;
  man.warnings = tr.warnings;
  man.monitor_flags = tr.flags.names();
  man.end_time = utc_now();
  man.outputs.push_back("manifest.json");
  write_file_atomic((dir / "manifest.json").string(), man.to_json());
  res.trajectory = std::move(tr);
  return res;
}

}  // namespace thermvisc
