#pragma once

// Energy, entropy and a priori norm monitors evaluated on grid states.
// Discrete integrals are h^d-weighted sums. The entropy uses the regularised
// potential that the energy map e* is built from.

#include <functional>
#include <string>
#include <vector>

#include "thermvisc/config.hpp"
#include "thermvisc/grid.hpp"
#include "thermvisc/materials.hpp"

namespace thermvisc {

struct DiagnosticsRecord {
  double t = 0.0;
  double kinetic = 0.0;
  double internal = 0.0;
  double total_E = 0.0;
  double entropy_total = 0.0;
  double entropy_production = 0.0;
  double lambda_entropy_total = 0.0;
  double theta_min = 0.0;
  double theta_max = 0.0;
  double detF_min = 0.0;
  double F_linf = 0.0;
  double gronwall_bound = 0.0;
  double divv_linf = 0.0;
  double energy_residual = 0.0;
  double v_l2sq = 0.0;
  double e_l1 = 0.0;
  double cum_grad_v_l2sq = 0.0;
  double cum_F_l4_4 = 0.0;
  double ln_theta_l1 = 0.0;
  double ln_detB_l2 = 0.0;
  double cum_grad_lntheta_l2sq = 0.0;
};

// Exact CSV header line (no trailing newline) and one row per record.
const std::string& csv_header();
std::string csv_row(const DiagnosticsRecord& r);
std::vector<double> record_values(const DiagnosticsRecord& r);

struct EntropyAudit {
  double eta_total = 0.0;
  double production = 0.0;
  double heat = 0.0;      // sum of kappa_f (dtheta)^2 / (theta theta_up h^2) over faces
  double viscous = 0.0;   // 2 nu |D|^2 / theta
  double elastic = 0.0;   // rho tau c g_reg |B - I|^2 / theta
  double min_term = 0.0;  // smallest pointwise summand seen
};

// Throws DomainError on theta <= 0 or det F <= 0.
template <int D>
EntropyAudit entropy_audit(const State<D>& s, const Grid<D>& g, const MaterialTable& m, const EpsilonSet& eps);

// Per-state terms of the lambda-entropy balance
//   d/dt sum eta_l + coupling + stretching = dissipation.
struct LambdaTerms {
  double eta_lambda = 0.0;
  double coupling = 0.0;     // rho tau c |B-I|^2 (g' theta^l - h_l)
  double stretching = 0.0;   // 2 rho Lambda a_theta (h_l - g' theta^l) B:D
  double dissipation = 0.0;  // (1-l) kappa |grad theta|^2/theta^(2-l) + (2 nu |D|^2 + rho tau c g |B-I|^2)/theta^(1-l)
};

template <int D>
LambdaTerms lambda_entropy_terms(const State<D>& s, const Grid<D>& g, const MaterialTable& m, const EpsilonSet& eps,
                                 double lambda, const std::function<double(double)>& h);

// Trapezoid defect of the balance between two states dt apart.
double lambda_balance_defect(const LambdaTerms& a, const LambdaTerms& b, double dt);

// Defect of d/dt ln det B = -tau c tr(B - I) between two uniform states
// (evaluated at grid point 0, trapezoid rule).
template <int D>
double ln_det_balance_defect(const State<D>& a, const State<D>& b, double dt, const MaterialTable& m,
                             const EpsilonSet& eps);

// ---- monitors ---------------------------------------------------------------

struct MonitorFlags {
  bool theta_floor = false;      // theta_min < 0.99 min(eps1, eps6)
  bool detF_floor = false;       // detF_min < 0.9 eps5
  bool gronwall = false;         // F_linf > 1.05 max(2/eps3, |F0|_inf) e^{Kt}
  bool energy_norms = false;     // v_l2sq + e_l1 > 2 x initial
  bool log_norms = false;        // ln_theta_l1 or ln_detB_l2 > 2 max(initial, 1)
  bool non_finite = false;
  bool entropy = false;          // a step decreased total entropy beyond the slack
  bool production_sign = false;  // a pointwise production summand < -1e-14
  std::size_t entropy_violations = 0;
  double worst_entropy_margin = 0.0;  // most negative (drop + slack), 0 if none
  double min_production_term = 0.0;

  bool any() const;
  std::vector<std::string> names() const;
  void merge(const MonitorFlags& o);
};

// Pointwise-in-time bound checks of `r` against the initial record.
MonitorFlags bounds_monitor(const DiagnosticsRecord& r, const DiagnosticsRecord& initial, const EpsilonSet& eps);

// True when the entropy step from a to b violates
//   eta_b - eta_a >= -1e-6 |eta_a| - 10 dt production.
bool entropy_step_violation(double eta_a, double eta_b, double production, double dt, double* margin = nullptr);

// Streams states in time order, accumulates cumulative integrals with the
// trapezoid rule, and keeps the monitor flags.
template <int D>
class DiagnosticsTracker {
 public:
  DiagnosticsTracker(const Grid<D>& g, const MaterialTable& m, const EpsilonSet& eps);
  DiagnosticsRecord observe(const State<D>& s);
  const MonitorFlags& flags() const { return flags_; }
  const DiagnosticsRecord& initial() const { return initial_; }

 private:
  struct Integrands {
    double grad_v = 0.0, F4 = 0.0, grad_lntheta = 0.0;
  };
  Grid<D> g_;
  MaterialTable m_;
  EpsilonSet eps_;
  HLambdaTable h_;
  bool started_ = false;
  DiagnosticsRecord initial_, last_;
  Integrands last_int_;
  double F0_linf_ = 0.0;
  MonitorFlags flags_;
  bool flags_seen_ = false;
};

}  // namespace thermvisc
