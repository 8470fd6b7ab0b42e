#pragma once

// Time integration of the regularised system on the periodic grid:
//   v_t = P[-conv(v) + div T / rho]
//   F_t = -div(F v) + Lambda(|F|) a(theta) grad v F + eps4 Lap F - (tau/2) c_F (F F^T F - F)
//   e_t = -div(e v) [+ eps7 Lap e] + (div(kappa grad theta) + T:D) / rho
// with theta = theta*(e, F), a(theta) = (theta - eps6)_+/theta,
// c_F = (det F - eps5)_+/det F, and the elastic stress
// T_el = 2 rho Lambda(|F|) g_reg(theta) a(theta) F F^T, viscous 2 nu D.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "thermvisc/config.hpp"
#include "thermvisc/diagnostics.hpp"
#include "thermvisc/grid.hpp"
#include "thermvisc/materials.hpp"
#include "thermvisc/operators.hpp"
#include "thermvisc/regularizers.hpp"

namespace thermvisc {

template <int D>
class Solver {
 public:
  struct Rates {
    Field v, F, e, B;
  };

  // cfg.grid.d must equal D. The config is validated.
  explicit Solver(const SimConfig& cfg);
  ~Solver();

  const SimConfig& config() const { return cfg_; }
  const Grid<D>& grid() const { return grid_; }
  const MaterialTable& material() const { return m_; }
  const EpsilonSet& eps() const { return cfg_.eps; }
  const EnergyInversion& inversion() const { return inv_; }

  // Builds the configured initial profiles and regularises them.
  PreparedState<D> initial_state() const;

  // theta = theta*(e, F) pointwise (previous theta as Newton hint), then
  // check_state. Throws StateError.
  void update_theta(State<D>& s) const;
  // Throws StateError on theta <= 0, det F <= 0, non-finite values, or a
  // twin B that is not positive definite.
  void check_state(const State<D>& s) const;

  // Symmetric stress, D*D components. Throws StateError if theta <= 0.
  Field assemble_stress(const State<D>& s) const;

  // Full right-hand sides (all terms explicit).
  void rates(const State<D>& s, Rates& r) const;
  Field rhs_momentum(const State<D>& s) const;
  Field rhs_F(const State<D>& s) const;
  Field rhs_energy(const State<D>& s) const;
  Field rhs_B(const State<D>& s) const;

  // Largest admissible step for the configured stepper.
  double stable_dt(const State<D>& s) const;

  // One step of the configured stepper (no CFL handling). Throws StateError.
  void step(State<D>& s, double dt);

 private:
  // `split`: leave out the terms the IMEX stepper treats implicitly and use
  // nu - nu_bar in the explicit viscous stress.
  void rates_impl(const State<D>& s, Rates& r, bool split, double nu_bar) const;
  void project(Field& v) const;
  void step_rk2(State<D>& s, double dt);
  void step_imex(State<D>& s, double dt);

  SimConfig cfg_;
  Grid<D> grid_;
  MaterialTable m_;
  EnergyInversion inv_;
  std::unique_ptr<SpectralSolver<D>> spectral_;
};

// ---- trajectories -----------------------------------------------------------

struct Trajectory {
  std::vector<DiagnosticsRecord> records;
  std::vector<double> twin_deviation;  // per record, empty without twin_B
  double max_twin_deviation = 0.0;     // over every step
  MonitorFlags flags;
  std::vector<std::string> warnings;
  std::string halt_reason = "completed";
  bool halted = false;
  std::size_t steps = 0;
  double dt_last = 0.0;
  double detF_min_before_mollify = 0.0;
  double detF_min_after_mollify = 0.0;
};

enum class StepEvent { initial, step, final, halt };

// Called with the initial state, after every accepted step, and once more
// with the last valid state when the run halts on an invalid state.
template <int D>
using StepObserver = std::function<void(const State<D>&, std::size_t, StepEvent)>;

template <int D>
Trajectory simulate(const SimConfig& cfg, const StepObserver<D>& observer = {});

// Dispatches on cfg.grid.d.
Trajectory run(const SimConfig& cfg);

// Relative twin deviation max|B - F F^T| / max|F F^T| (entrywise).
template <int D>
double twin_deviation(const State<D>& s);

}  // namespace thermvisc
