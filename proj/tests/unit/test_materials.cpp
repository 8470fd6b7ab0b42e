#include <doctest.h>

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "thermvisc/errors.hpp"
#include "thermvisc/materials.hpp"

using namespace thermvisc;

namespace {

// For g = g_inf theta/(1+theta), -g'' = 2 g_inf/(1+z)^3 and the substitution
// t = z/(1+z) turns the tail integral into an incomplete Beta function:
//   h_l(theta) = 2 g_inf B(1+l, 2-l) I_{1-x}(2-l, 1+l),  x = theta/(1+theta).
double h_oracle(double theta, double l, double g_inf = 1.0) {
  const double x = theta / (1.0 + theta);
  return 2.0 * g_inf * boost::math::beta(1.0 + l, 2.0 - l) * boost::math::ibetac(1.0 + l, 2.0 - l, x);
}

}  // namespace

TEST_CASE("reference material data") {
  const auto m = reference_material();
  CHECK(m.name == "reference");
  CHECK(m.g(1.0) == 0.5);
  CHECK(m.g_prime(1.0) == 0.25);
  CHECK(m.g_second(1.0) == doctest::Approx(-0.25));
  CHECK(m.nu(3.0) == 1.0);
  CHECK(m.tau(3.0) == 1.0);
  CHECK(m.kappa(3.0) == 1.0);
  CHECK(material_by_name("saturating", 3.0).g(1.0) == 1.5);
  CHECK_THROWS_AS(material_by_name("rubber"), InvalidInput);
  CHECK_THROWS_AS(saturating_material(-1.0), InvalidInput);
}

TEST_CASE("admissibility of the reference material and rejection of a bad one") {
  const auto grid = log_grid(1e-3, 1e3, 121);
  CHECK(grid.size() == 121);
  CHECK(grid.front() == doctest::Approx(1e-3));
  CHECK(grid.back() == doctest::Approx(1e3));
  const auto rep = validate_material(reference_material(), grid);
  CHECK(rep.passed());
  CHECK(rep.L_estimate == doctest::Approx(0.25).epsilon(1e-3));  // sup theta/(1+theta)^2 at theta = 1

  auto bad = reference_material();
  bad.g = [](double t) { return 1.0 / (1.0 + t); };
  bad.g_prime = [](double t) { return -1.0 / ((1.0 + t) * (1.0 + t)); };
  bad.nu = [](double) { return -1.0; };
  const auto r2 = validate_material(bad, grid);
  CHECK_FALSE(r2.passed());
  REQUIRE(r2.find("g_monotone") != nullptr);
  CHECK_FALSE(r2.find("g_monotone")->passed);
  CHECK_FALSE(r2.find("nu_bounds")->passed);
  CHECK_THROWS_AS(validate_material(reference_material(), {}), InvalidInput);
  CHECK_THROWS_AS(validate_material(reference_material(), {0.0, 1.0}), InvalidInput);
}

TEST_CASE("growth constant of the reference material") {
  // theta^{3/2}/(1+theta)^2 peaks at theta = 3.
  CHECK(growth_constant(reference_material()) == doctest::Approx(std::pow(3.0, 1.5) / 16.0).epsilon(1e-4));
}

TEST_CASE("h_lambda against the incomplete Beta oracle") {
  const auto m = reference_material();
  for (double l : {0.1, 0.5, 0.9}) {
    CHECK(h_lambda(0.0, l, m) == doctest::Approx(std::tgamma(1.0 + l) * std::tgamma(2.0 - l)).epsilon(1e-10));
    for (double th : {1e-6, 1e-3, 0.1, 1.0, 10.0, 1e3, 1e5}) {
      CAPTURE(l);
      CAPTURE(th);
      CHECK(h_lambda(th, l, m) == doctest::Approx(h_oracle(th, l)).epsilon(1e-9));
    }
  }
  CHECK(h_lambda(0.0, 0.5, m) == doctest::Approx(std::numbers::pi / 4.0).epsilon(1e-12));
  CHECK(h_lambda(2.0, 0.5, saturating_material(4.0)) == doctest::Approx(h_oracle(2.0, 0.5, 4.0)).epsilon(1e-9));
  CHECK_THROWS_AS(h_lambda(-1.0, 0.5, m), DomainError);
}

TEST_CASE("h_lambda cutoff satisfies its tail inequality") {
  const auto m = reference_material();
  const double C = growth_constant(m);
  for (double l : {0.1, 0.5, 0.9}) {
    const double T = h_lambda_cutoff(l, m);
    const double tail = std::pow(T, l) * m.g_prime(T) + l * C * std::pow(T, l - m.delta - 1.0) / (1.0 + m.delta - l);
    CHECK(tail <= 1e-10);
    CHECK(h_oracle(T, l) <= 1e-10);
  }
  CHECK_THROWS(h_lambda_cutoff(1.6, m));
}

TEST_CASE("h_lambda table interpolates the oracle") {
  const auto m = reference_material();
  const HLambdaTable tab(m, 0.5);
  std::mt19937_64 r(9);
  std::uniform_real_distribution<double> s(std::log(1e-7), std::log(1e7));
  double worst = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const double th = std::exp(s(r));
    worst = std::max(worst, std::abs(tab(th) - h_oracle(th, 0.5)) / std::max(1e-3, h_oracle(th, 0.5)));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("regularised coupling: shape, continuity and concavity") {
  const auto m = reference_material();
  const double a = 1e-3;
  const RegularizedCoupling c(m, a);
  CHECK(c.is_c1());
  const double s0 = c.initial_slope();
  CHECK(c.value(0.0) == 0.0);
  CHECK(c.value(0.5 * a) == doctest::Approx(0.5 * a * s0));
  CHECK(c.value(-1.0) == doctest::Approx(-s0));  // linear extension below 0
  for (double th : {2 * a, 3 * a, 1.0, 10.0}) CHECK(c.value(th) == m.g(th));
  const double e = 1e-10;
  for (double knot : {a, 2 * a}) {
    CHECK(c.value(knot - e) == doctest::Approx(c.value(knot + e)).epsilon(1e-9));
    CHECK(c.slope(knot - e) == doctest::Approx(c.slope(knot + e)).epsilon(1e-6));
  }
  // Monotone, concave and with a nonnegative energy weight.
  for (int k = 1; k <= 3000; ++k) {
    const double th = 3 * a * k / 3000.0;
    CHECK(c.slope(th) >= 0.0);
    CHECK(c.curvature(th) <= 0.0);
    CHECK(c.energy_weight(th) >= 0.0);
  }
  CHECK(c.energy_weight(0.5 * a) == 0.0);
  CHECK(c.energy_weight(-1.0) == 0.0);
  // Energy weight slope by central differences.
  for (double th : {1.3 * a, 1.7 * a, 0.5, 4.0}) {
    const double h = 1e-7 * th;
    const double fd = (c.energy_weight(th + h) - c.energy_weight(th - h)) / (2 * h);
    CHECK(fd == doctest::Approx(c.energy_weight_slope(th)).epsilon(1e-5).scale(1e-6));
  }
}

TEST_CASE("energy map and its inverse") {
  const auto m = reference_material();
  const EpsilonSet eps;
  const EnergyInversion inv(m, eps);
  std::mt19937_64 r(5);
  std::uniform_real_distribution<double> ls(std::log(1e-5), std::log(1e4));
  std::uniform_real_distribution<double> pert(-0.5, 0.5);
  for (int k = 0; k < 3000; ++k) {
    const double th = std::exp(ls(r));
    DefMatrix<2> f = DefMatrix<2>::identity();
    for (auto& x : f.m) x += pert(r);
    if (det(f) <= 0) continue;
    const double e = inv.e_star(th, f);
    CHECK(inv.theta_star(e, f) == doctest::Approx(th).epsilon(1e-11).scale(1.0));
    const double h = 1e-6 * th;
    const double psi = inv.psi_of(f);
    const double fd = (inv.e_star_psi(th + h, psi) - inv.e_star_psi(th - h, psi)) / (2 * h);
    CHECK(fd == doctest::Approx(inv.de_dtheta_psi(th, psi)).epsilon(1e-6));
    CHECK(inv.de_dtheta_psi(th, psi) >= m.c_v);
  }
  CHECK(inv.theta_star_psi(-2.0, 1.0) == -2.0);
  CHECK(inv.theta_star_psi(0.0, 3.0) == 0.0);
}

TEST_CASE("Gibbs relations of the unregularised potentials") {
  const auto m = reference_material();
  const auto b = SpdMatrix<3>::diagonal({0.4, 1.5, 3.0});
  for (double th : {0.01, 0.3, 1.0, 7.0}) {
    CHECK(internal_energy(th, b, m) ==
          doctest::Approx(helmholtz(th, b, m) + th * entropy(th, b, m)).epsilon(1e-13));
    const double h = 1e-6 * th;
    const double dpsi = (helmholtz(th + h, b, m) - helmholtz(th - h, b, m)) / (2 * h);
    CHECK(-dpsi == doctest::Approx(entropy(th, b, m)).epsilon(1e-7));
    // eta_lambda at lambda -> its defining combination.
    CHECK(eta_lambda(th, b, 0.5, m) ==
          doctest::Approx(2.0 * std::sqrt(th) - h_oracle(th, 0.5) * psi_tilde(b)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(entropy(0.0, b, m), DomainError);
  CHECK(total_energy_density<3>({1.0, 0.0, 1.0}, 1.0, SpdMatrix<3>::identity(), m) == 2.0);
}

TEST_CASE("epsilon validation") {
  EpsilonSet e;
  CHECK_NOTHROW(e.validate());
  e.eps2 = 1e-2;
  e.eps5 = 1e-2;
  CHECK_THROWS_AS(e.validate(), ConfigError);
  try {
    e.validate();
  } catch (const ConfigError& err) {
    CHECK(std::string(err.what()).find("eps2 < eps5^2") != std::string::npos);
  }
  EpsilonSet f;
  f.eps3 = 0.0;
  CHECK_THROWS_AS(f.validate(), ConfigError);
  CHECK(EpsilonSet{}.mollifier_radius(0.1) == 0.2);
  CHECK(EpsilonSet{}.energy_floor() == 1e-3);
}
