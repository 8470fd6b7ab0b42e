#pragma once

// Built-in property suites and the oracle report used by the command line
// tool. Failures are report entries, never exceptions.

#include <string>
#include <vector>

#include "thermvisc/config.hpp"

namespace thermvisc {

struct CheckEntry {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckEntry> entries;
  bool passed() const;
  std::string to_text() const;
  void add(const std::string& name, bool passed, double measured, double tolerance, const std::string& detail = "");
};

enum class CheckSuite { algebra, invariants, all };

CheckSuite parse_suite(const std::string& name);  // throws InvalidInput
CheckReport run_check_suite(CheckSuite suite, std::uint64_t seed = 12345);

// Twin B versus F F^T on the relaxation test, the ln det B law, h_lambda at
// theta -> 0 versus its Beta-function value, and finite-difference checks of
// dpsi, de*/dtheta and dtheta*/de, all for the material and epsilons of `cfg`.
CheckReport oracle_suite(const SimConfig& cfg);

// Spatially uniform ODE-regime setup: v = 0, F = f0 I, theta = 1 on a coarse
// large box so the explicit step limit does not bind. Fixed dt, twin B on.
SimConfig relaxation_config(const SimConfig& base, double f0, double dt, double t_end);

// Largest per-step defect of the lambda-entropy balance, per unit volume,
// along the relaxation run with f0 = 2 and fixed dt on [0, 1]. Uses the
// direct h_lambda quadrature.
double lambda_balance_study(const SimConfig& base, double lambda, double dt);

}  // namespace thermvisc
