#pragma once

// Simulation configuration and its INI-style text format:
//
//   [section]
//   key = value   # comment
//
// Sections: grid, material, epsilons, time, output, initial. Unknown sections
// or keys are rejected with the offending line number.

#include <cstdint>
#include <string>

#include "thermvisc/materials.hpp"
#include "thermvisc/operators.hpp"

namespace thermvisc {

enum class Stepper { explicit_rk2, imex };

struct GridSpec {
  int d = 2;
  int n = 64;
  double L = 1.0;
};

// Initial profiles. Patches are the centred cube of half-width L/8.
struct InitialSpec {
  std::string velocity = "zero";  // zero | taylor_green | random
  double velocity_amplitude = 1.0;
  std::string theta = "uniform";  // uniform | bump | cold_spot
  double theta_base = 1.0;
  double theta_amplitude = 0.5;   // bump height
  double theta_patch = 0.0;       // cold-spot value; 0 selects 1.2 min(eps1, eps6)
  std::string deformation = "identity";  // identity | uniform | det_patch | stretch_patch | random
  double deformation_scale = 1.0;        // uniform: F = scale I; stretch_patch: F = scale I in the patch;
                                         // random: entrywise perturbation amplitude
  double deformation_patch_det = 0.0;    // det_patch value; 0 selects 1.1 eps5
};

struct SimConfig {
  GridSpec grid;
  std::string material = "reference";
  double g_inf = 1.0;
  EpsilonSet eps;
  double dt = 0.0;  // 0 selects the CFL step
  double t_end = 1.0;
  Stepper stepper = Stepper::explicit_rk2;
  double cfl_safety = 0.8;
  std::uint64_t seed = 0;
  bool twin_B = false;
  TransportScheme transport = TransportScheme::upwind;
  InitialSpec initial;
  int snapshot_every = 0;  // steps between snapshots, 0 disables
  int csv_every = 1;       // steps between CSV rows; the final state is always written

  // Throws ConfigError naming the violated condition.
  void validate() const;
};

SimConfig parse_config_text(const std::string& text);
SimConfig parse_config(const std::string& path);
// Full round-trippable echo with every key written.
std::string to_ini(const SimConfig& cfg);

// Sets one key, e.g. ("epsilons", "eps5", "1e-3"). Used by parameter sweeps.
void set_config_value(SimConfig& cfg, const std::string& section, const std::string& key, const std::string& value);

const char* stepper_name(Stepper s);
const char* transport_name(TransportScheme s);

}  // namespace thermvisc
