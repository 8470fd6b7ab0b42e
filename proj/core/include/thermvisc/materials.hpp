#pragma once

// Material parameter functions, thermodynamic potentials, the regularised
// energy map e*(theta, F) with its inverse, and the h_lambda primitive.

#include <functional>
#include <string>
#include <vector>

#include "thermvisc/tensor.hpp"

namespace thermvisc {

struct MaterialTable {
  std::string name = "custom";
  std::function<double(double)> g;         // elastic coupling
  std::function<double(double)> g_prime;
  std::function<double(double)> g_second;
  std::function<double(double)> nu;        // viscosity
  std::function<double(double)> tau;       // relaxation rate
  std::function<double(double)> kappa;     // heat conductivity
  std::function<double(double)> alpha;     // Oldroyd weight, unused by the solver
  double c_v = 1.0;
  double rho = 1.0;
  double K = 2.0;      // admissibility constant
  double delta = 0.5;  // decay exponent of theta^{1+delta} g'
};

// g = theta/(1+theta), nu = tau = kappa = 1, alpha = 0, c_v = rho = 1, K = 2.
MaterialTable reference_material();
// g = g_inf * theta/(1+theta); other data as the reference, K = max(2, g_inf).
MaterialTable saturating_material(double g_inf);
// "reference" or "saturating". Throws InvalidInput for anything else.
MaterialTable material_by_name(const std::string& name, double g_inf = 1.0);

struct AdmissibilityCheck {
  std::string name;
  bool passed = true;
  double worst_theta = 0.0;
  double worst_value = 0.0;
  std::string detail;
};

struct AdmissibilityReport {
  std::vector<AdmissibilityCheck> checks;
  double L_estimate = 0.0;        // sup of theta g'(theta) on the grid
  double L_delta_estimate = 0.0;  // sup of theta^{1+delta} g'(theta) on the grid
  bool passed() const;
  const AdmissibilityCheck* find(const std::string& name) const;
};

// Samples every structural assumption on `theta_grid` (positive, sorted).
AdmissibilityReport validate_material(const MaterialTable& m, const std::vector<double>& theta_grid);

// n log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

// C(g) = sup theta^{1+delta} g'(theta), estimated on [1e-6, 1e12].
double growth_constant(const MaterialTable& m);

struct EpsilonSet {
  double eps1 = 1e-3;
  double eps2 = 1e-5;
  double eps3 = 1e-2;
  double eps4 = 0.0;   // F diffusion, off by default
  double eps5 = 1e-2;
  double eps6 = 1e-3;
  double eps7 = 0.0;   // mollifier radius; 0 selects 2h
  double lambda = 0.5;
  bool eps7_diffusion = false;  // adds eps7 * Laplace(e) to the energy equation

  // Throws ConfigError naming the violated condition.
  void validate() const;
  double mollifier_radius(double h) const { return eps7 > 0.0 ? eps7 : 2.0 * h; }
  double energy_floor() const { return eps1 < eps6 ? eps1 : eps6; }
};

// g_eps1: linear on [0, eps1], a concave cubic blend on [eps1, 2 eps1],
// g itself beyond. The linear slope is chosen inside the interval that keeps
// the cubic concave; when that interval is empty the blend degrades to the
// chord from 0 to 2 eps1 (continuous, piecewise C1).
class RegularizedCoupling {
 public:
  RegularizedCoupling(const MaterialTable& m, double eps1);

  double value(double theta) const;
  double slope(double theta) const;
  double curvature(double theta) const;
  // g_reg - theta g_reg', set to 0 for theta < 0. Nonnegative.
  double energy_weight(double theta) const;
  // d/dtheta of energy_weight = -theta g_reg''; 0 for theta < 0.
  double energy_weight_slope(double theta) const;

  bool is_c1() const { return c1_; }
  double initial_slope() const { return s_; }
  double eps1() const { return a_; }

 private:
  MaterialTable m_;
  double a_;
  double s_;
  double G_, Gp_;
  double c2_, c3_;  // cubic coefficients in t = theta - a
  bool c1_;
};

// e*(theta, F) = c_v theta + (g_reg - theta g_reg') psi_eps2(F F^T) and its
// monotone inverse theta*(e, F). Both depend on F only through psi_eps2.
class EnergyInversion {
 public:
  EnergyInversion(const MaterialTable& m, const EpsilonSet& eps);

  double e_star_psi(double theta, double psi) const;
  double de_dtheta_psi(double theta, double psi) const;
  // Safeguarded Newton on [0, e/c_v]; `hint` seeds the iteration when inside
  // the bracket. Throws NumericalError if the residual tolerance
  // 1e-12 max(1, |e|) is not met within 100 iterations.
  double theta_star_psi(double e, double psi, double hint = -1.0) const;

  template <int D>
  double psi_of(const DefMatrix<D>& f) const {
    const SpdMatrix<D> b = sym_from_f(f);
    return psi_tilde_reg(b, eps2_);
  }
  template <int D>
  double e_star(double theta, const DefMatrix<D>& f) const {
    return e_star_psi(theta, psi_of(f));
  }
  template <int D>
  double theta_star(double e, const DefMatrix<D>& f, double hint = -1.0) const {
    return theta_star_psi(e, psi_of(f), hint);
  }

  const RegularizedCoupling& coupling() const { return coupling_; }
  double eps2() const { return eps2_; }
  double c_v() const { return c_v_; }

 private:
  RegularizedCoupling coupling_;
  double eps2_;
  double c_v_;
};

// ---- potentials of the unregularised model ----------------------------------

template <int D>
double internal_energy(double theta, const SpdMatrix<D>& b, const MaterialTable& m) {
  const double w = m.g(theta) - theta * m.g_prime(theta);
  return m.c_v * theta + w * psi_tilde(b);
}

template <int D>
double entropy(double theta, const SpdMatrix<D>& b, const MaterialTable& m) {
  if (!(theta > 0.0)) throw DomainError("entropy: theta <= 0");
  return m.c_v * std::log(theta) - m.g_prime(theta) * psi_tilde(b);
}

template <int D>
double helmholtz(double theta, const SpdMatrix<D>& b, const MaterialTable& m) {
  if (!(theta > 0.0)) throw DomainError("helmholtz: theta <= 0");
  return -m.c_v * theta * (std::log(theta) - 1.0) + m.g(theta) * psi_tilde(b);
}

// h_lambda(theta) = int_theta^inf -z^lambda g''(z) dz. theta = 0 gives the
// limit value. Throws NumericalError if the quadrature misses its tolerance.
double h_lambda(double theta, double lambda, const MaterialTable& m);

// Cutoff Theta with Theta^lambda g'(Theta) + lambda C Theta^(lambda-delta-1)/(1+delta-lambda) <= tol.
double h_lambda_cutoff(double lambda, const MaterialTable& m, double tol = 1e-10);

template <int D>
double eta_lambda(double theta, const SpdMatrix<D>& b, double lambda, const MaterialTable& m) {
  if (!(theta > 0.0)) throw DomainError("eta_lambda: theta <= 0");
  return m.c_v * std::pow(theta, lambda) / lambda - h_lambda(theta, lambda, m) * psi_tilde(b);
}

template <int D>
double total_energy_density(const std::array<double, D>& v, double theta, const SpdMatrix<D>& b,
                            const MaterialTable& m) {
  double k = 0.0;
  for (double x : v) k += x * x;
  return 0.5 * k + internal_energy(theta, b, m);
}

// Cubic Hermite table of h_lambda on a log grid, using the exact derivative
// theta^lambda g''. Falls back to direct quadrature outside its range.
class HLambdaTable {
 public:
  HLambdaTable(const MaterialTable& m, double lambda, double theta_lo = 1e-6, double theta_hi = 1e6,
               int per_decade = 256);
  double operator()(double theta) const;
  double lambda() const { return lambda_; }

 private:
  MaterialTable m_;
  double lambda_;
  double log_lo_, log_hi_, ds_;
  std::vector<double> val_, der_;  // value and d/ds in s = ln theta
};

}  // namespace thermvisc
