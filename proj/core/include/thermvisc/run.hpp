#pragma once

// Run orchestration with on-disk output. A run directory holds
//   config.ini      full config echo
//   diagnostics.csv one row per recorded step
//   manifest.json   written atomically at the end, also on a halt
//   snapshots/      snap_<step>.bin when snapshots are enabled, plus
//                   halt.bin when the run stops on an invalid state

#include <string>
#include <vector>

#include "thermvisc/config.hpp"
#include "thermvisc/solver.hpp"

namespace thermvisc {

const char* version();

struct RunManifest {
  std::string version;
  std::string start_time;  // UTC, ISO 8601
  std::string end_time;
  std::string halt_reason;
  std::size_t steps = 0;
  std::vector<std::string> outputs;  // relative to the run directory
  std::vector<std::string> warnings;
  std::vector<std::string> monitor_flags;
  std::string config_echo;

  std::string to_json() const;
};

struct RunResult {
  Trajectory trajectory;
  RunManifest manifest;
};

// Creates `out_dir` if needed. `snapshot_every` >= 0 overrides the config.
RunResult run_to_directory(const SimConfig& cfg, const std::string& out_dir, int snapshot_every = -1);

std::string trajectory_csv(const Trajectory& tr);

}  // namespace thermvisc
