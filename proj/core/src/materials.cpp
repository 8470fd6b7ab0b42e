#include "thermvisc/materials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "thermvisc/errors.hpp"

namespace thermvisc {

MaterialTable reference_material() { return saturating_material(1.0); }

MaterialTable saturating_material(double g_inf) {
  if (!(g_inf > 0.0) || !std::isfinite(g_inf)) throw InvalidInput("saturating_material: g_inf must be positive");
  MaterialTable m;
  m.name = g_inf == 1.0 ? "reference" : "saturating";
  m.g = [g_inf](double t) { return g_inf * t / (1.0 + t); };
  m.g_prime = [g_inf](double t) { return g_inf / ((1.0 + t) * (1.0 + t)); };
  m.g_second = [g_inf](double t) { return -2.0 * g_inf / ((1.0 + t) * (1.0 + t) * (1.0 + t)); };
  m.nu = [](double) { return 1.0; };
  m.tau = [](double) { return 1.0; };
  m.kappa = [](double) { return 1.0; };
  m.alpha = [](double) { return 0.0; };
  m.c_v = 1.0;
  m.rho = 1.0;
  m.K = std::max(2.0, g_inf);
  m.delta = 0.5;
  return m;
}

MaterialTable material_by_name(const std::string& name, double g_inf) {
  if (name == "reference") return reference_material();
  if (name == "saturating") return saturating_material(g_inf);
  throw InvalidInput("unknown material '" + name + "' (expected reference or saturating)");
}

bool AdmissibilityReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const AdmissibilityCheck* AdmissibilityReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw InvalidInput("log_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

namespace {

// margin(theta) >= 0 means the assumption holds at theta; the worst sample is
// the one with the smallest margin.
template <class Margin, class Value>
AdmissibilityCheck sample_check(const std::string& name, const std::vector<double>& grid, Margin margin,
                                Value value, const std::string& rule) {
  AdmissibilityCheck c;
  c.name = name;
  double worst = std::numeric_limits<double>::infinity();
  for (double t : grid) {
    const double mg = margin(t);
    if (!std::isfinite(mg)) {
      c.passed = false;
      c.worst_theta = t;
      c.worst_value = value(t);
      c.detail = rule + " (non-finite value)";
      return c;
    }
    if (mg < worst) {
      worst = mg;
      c.worst_theta = t;
      c.worst_value = value(t);
    }
  }
  c.passed = worst >= 0.0;
  c.detail = rule;
  return c;
}

// Bounded growth: finite everywhere and nonincreasing over the last decade of
// the grid, so the sampled supremum is a credible bound for the limit.
template <class Value>
AdmissibilityCheck growth_check(const std::string& name, const std::vector<double>& grid, Value value,
                                const std::string& rule, double& sup_out) {
  AdmissibilityCheck c;
  c.name = name;
  c.detail = rule;
  sup_out = 0.0;
  const double tail_start = grid.back() / 10.0;
  double prev = std::numeric_limits<double>::infinity();
  for (double t : grid) {
    const double v = value(t);
    if (!std::isfinite(v)) {
      c.passed = false;
      c.worst_theta = t;
      c.worst_value = v;
      c.detail += " (non-finite value)";
      return c;
    }
    if (v > sup_out) {
      sup_out = v;
      c.worst_theta = t;
      c.worst_value = v;
    }
    if (t >= tail_start) {
      if (v > prev * (1.0 + 1e-12) + 1e-300 && c.passed) {
        c.passed = false;
        c.worst_theta = t;
        c.worst_value = v;
        c.detail += " (still growing over the last sampled decade)";
      }
      prev = v;
    }
  }
  return c;
}

}  // namespace

AdmissibilityReport validate_material(const MaterialTable& m, const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidInput("validate_material: empty theta grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) throw InvalidInput("validate_material: theta grid must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidInput("validate_material: theta grid must be strictly increasing");
  }
  if (!m.g || !m.g_prime || !m.g_second || !m.nu || !m.tau || !m.kappa || !m.alpha)
    throw InvalidInput("validate_material: material has unset functions");

  AdmissibilityReport r;
  const double K = m.K;
  auto bounded = [&](const std::string& name, const std::function<double(double)>& f) {
    return sample_check(
        name, grid, [&](double t) { const double x = f(t); return std::min(x - 1.0 / K, K - x); },
        [&](double t) { return f(t); }, "1/K <= f <= K");
  };
  r.checks.push_back(bounded("nu_bounds", m.nu));
  r.checks.push_back(bounded("tau_bounds", m.tau));
  r.checks.push_back(bounded("kappa_bounds", m.kappa));
  r.checks.push_back(sample_check(
      "alpha_bounds", grid, [&](double t) { const double x = m.alpha(t); return std::min(x, K - x); },
      [&](double t) { return m.alpha(t); }, "0 <= alpha <= K"));
  r.checks.push_back(sample_check(
      "g_bounds", grid, [&](double t) { const double x = m.g(t); return std::min(x, K - x); },
      [&](double t) { return m.g(t); }, "0 <= g <= K"));
  r.checks.push_back(sample_check(
      "g_monotone", grid, [&](double t) { return m.g_prime(t); }, [&](double t) { return m.g_prime(t); },
      "g' >= 0"));
  r.checks.push_back(sample_check(
      "g_concave", grid, [&](double t) { return -m.g_second(t); }, [&](double t) { return m.g_second(t); },
      "g'' <= 0"));
  r.checks.push_back(growth_check(
      "growth_L", grid, [&](double t) { return t * m.g_prime(t); }, "theta g' bounded (limsup L)", r.L_estimate));
  r.checks.push_back(growth_check(
      "growth_L_delta", grid, [&](double t) { return std::pow(t, 1.0 + m.delta) * m.g_prime(t); },
      "theta^(1+delta) g' bounded (limit L_delta)", r.L_delta_estimate));

  AdmissibilityCheck consts;
  consts.name = "constants";
  std::ostringstream why;
  if (!(m.c_v > 0.0)) why << "c_v <= 0; ";
  if (!(m.rho > 0.0)) why << "rho <= 0; ";
  if (!(m.K >= 1.0)) why << "K < 1; ";
  if (!(m.delta > 0.0 && m.delta < 1.0)) why << "delta outside (0,1); ";
  consts.detail = why.str();
  consts.passed = consts.detail.empty();
  if (consts.passed) consts.detail = "c_v > 0, rho > 0, K >= 1, 0 < delta < 1";
  r.checks.push_back(consts);
  return r;
}

double growth_constant(const MaterialTable& m) {
  double c = 0.0;
  for (double t : log_grid(1e-6, 1e12, 1801)) c = std::max(c, std::pow(t, 1.0 + m.delta) * m.g_prime(t));
  return c;
}

void EpsilonSet::validate() const {
  auto open_unit = [](double x) { return x > 0.0 && x < 1.0; };
  if (!open_unit(eps1)) throw ConfigError("eps1 must lie in (0,1)");
  if (!open_unit(eps2)) throw ConfigError("eps2 must lie in (0,1)");
  if (!open_unit(eps3)) throw ConfigError("eps3 must lie in (0,1)");
  if (!(eps4 >= 0.0 && eps4 < 1.0)) throw ConfigError("eps4 must lie in [0,1)");
  if (!open_unit(eps5)) throw ConfigError("eps5 must lie in (0,1)");
  if (!open_unit(eps6)) throw ConfigError("eps6 must lie in (0,1)");
  if (!(eps7 >= 0.0 && eps7 < 1.0)) throw ConfigError("eps7 must lie in [0,1) (0 selects twice the grid spacing)");
  if (!open_unit(lambda)) throw ConfigError("lambda must lie in (0,1)");
  if (!(eps2 < eps5 * eps5)) throw ConfigError("eps2 < eps5^2 violated");
}

// ---- regularised coupling ---------------------------------------------------

RegularizedCoupling::RegularizedCoupling(const MaterialTable& m, double eps1) : m_(m), a_(eps1) {
  if (!(eps1 > 0.0 && eps1 < 1.0)) throw InvalidInput("RegularizedCoupling: eps1 must lie in (0,1)");
  const double a = a_;
  G_ = m_.g(2.0 * a);
  Gp_ = m_.g_prime(2.0 * a);
  // Concavity of the Hermite cubic at both ends of [a, 2a]:
  // s >= (3G/a - G')/5 and s <= (3G/a - 2G')/4. Non-empty iff G' <= G/(2a).
  const double s_lo = (3.0 * G_ / a - Gp_) / 5.0;
  const double s_hi = (3.0 * G_ / a - 2.0 * Gp_) / 4.0;
  if (s_lo <= s_hi) {
    s_ = 0.5 * (s_lo + s_hi);
    c1_ = true;
    const double r1 = G_ - 2.0 * s_ * a;
    const double r2 = Gp_ - s_;
    c3_ = (r2 - 2.0 * r1 / a) / (a * a);
    c2_ = (r1 - c3_ * a * a * a) / (a * a);
  } else {
    s_ = G_ / (2.0 * a);
    c1_ = false;
    c2_ = 0.0;
    c3_ = 0.0;
  }
}

double RegularizedCoupling::value(double th) const {
  if (th <= a_) return s_ * th;
  if (th >= 2.0 * a_) return m_.g(th);
  const double t = th - a_;
  return s_ * a_ + s_ * t + c2_ * t * t + c3_ * t * t * t;
}

double RegularizedCoupling::slope(double th) const {
  if (th <= a_) return s_;
  if (th >= 2.0 * a_) return m_.g_prime(th);
  const double t = th - a_;
  return s_ + 2.0 * c2_ * t + 3.0 * c3_ * t * t;
}

double RegularizedCoupling::curvature(double th) const {
  if (th <= a_) return 0.0;
  if (th >= 2.0 * a_) return m_.g_second(th);
  const double t = th - a_;
  return 2.0 * c2_ + 6.0 * c3_ * t;
}

double RegularizedCoupling::energy_weight(double th) const {
  if (th <= 0.0) return 0.0;
  if (th <= a_) return 0.0;
  return value(th) - th * slope(th);
}

double RegularizedCoupling::energy_weight_slope(double th) const {
  if (th <= 0.0) return 0.0;
  return -th * curvature(th);
}

// ---- energy inversion -------------------------------------------------------

EnergyInversion::EnergyInversion(const MaterialTable& m, const EpsilonSet& eps)
    : coupling_(m, eps.eps1), eps2_(eps.eps2), c_v_(m.c_v) {
  if (!(c_v_ > 0.0)) throw InvalidInput("EnergyInversion: c_v must be positive");
}

double EnergyInversion::e_star_psi(double theta, double psi) const {
  return c_v_ * theta + coupling_.energy_weight(theta) * psi;
}

double EnergyInversion::de_dtheta_psi(double theta, double psi) const {
  return c_v_ + coupling_.energy_weight_slope(theta) * psi;
}

double EnergyInversion::theta_star_psi(double e, double psi, double hint) const {
  if (!std::isfinite(e) || !std::isfinite(psi)) throw NumericalError("theta_star: non-finite energy or potential");
  if (e <= 0.0) return e / c_v_;  // e* = c_v theta on theta <= 0
  const double tol_accept = 1e-12 * std::max(1.0, std::abs(e));
  const double tol_target = 0.1 * tol_accept;
  double lo = 0.0;
  double hi = e / c_v_;
  if (psi < 0.0) {
    int guard = 0;
    while (e_star_psi(hi, psi) < e) {
      hi *= 2.0;
      if (++guard > 200) throw NumericalError("theta_star: failed to bracket");
    }
  }
  double th = (hint > lo && hint < hi) ? hint : hi;
  for (int it = 0; it < 100; ++it) {
    const double f = e_star_psi(th, psi) - e;
    if (std::abs(f) <= tol_target) return th;
    if (f > 0.0)
      hi = th;
    else
      lo = th;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      if (std::abs(f) <= tol_accept) return th;
      const double fm = e_star_psi(0.5 * (lo + hi), psi) - e;
      if (std::abs(fm) <= tol_accept) return 0.5 * (lo + hi);
      throw NumericalError("theta_star: bracket collapsed above residual tolerance");
    }
    double next = th - f / de_dtheta_psi(th, psi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    th = next;
  }
  const double f = e_star_psi(th, psi) - e;
  if (std::abs(f) <= tol_accept) return th;
  throw NumericalError("theta_star: no convergence within 100 iterations");
}

}  // namespace thermvisc
