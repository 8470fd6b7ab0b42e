#include <doctest.h>

#include <cmath>
#include <random>

#include "thermvisc/errors.hpp"
#include "thermvisc/operators.hpp"
#include "thermvisc/regularizers.hpp"

using namespace thermvisc;

TEST_CASE("cutoff Lambda plateau, transition and derivative") {
  const double e3 = 1e-2;
  CHECK(cutoff_lambda(0.0, e3) == 1.0);
  CHECK(cutoff_lambda(100.0, e3) == 1.0);
  CHECK(cutoff_lambda(150.0, e3) == doctest::Approx(0.5));
  CHECK(cutoff_lambda(200.0, e3) == 0.0);
  CHECK(cutoff_lambda(1e9, e3) == 0.0);
  CHECK(cutoff_lambda(-150.0, e3) == cutoff_lambda(150.0, e3));
  // 1 - (6u^5 - 15u^4 + 10u^3) at u = 0.25.
  const double u = 0.25;
  CHECK(cutoff_lambda(125.0, e3) == doctest::Approx(1.0 - (6 * std::pow(u, 5) - 15 * std::pow(u, 4) + 10 * u * u * u)));
  CHECK(std::abs(cutoff_lambda_derivative(150.0, e3)) == doctest::Approx(15.0 / 8.0 * e3));
  for (double s : {101.0, 120.0, 170.0, 199.0}) {
    const double h = 1e-3;
    const double fd = (cutoff_lambda(s + h, e3) - cutoff_lambda(s - h, e3)) / (2 * h);
    CHECK(fd == doctest::Approx(cutoff_lambda_derivative(s, e3)).epsilon(1e-6).scale(1e-8));
  }
  CHECK(cutoff_lambda_derivative(50.0, e3) == 0.0);
  CHECK(cutoff_lambda_derivative(250.0, e3) == 0.0);
}

TEST_CASE("truncation and determinant guard") {
  const double e3 = 1e-2;
  const auto small = DefMatrix<2>::scaled_identity(10.0);
  CHECK(truncate_F(small, e3) == small);
  const auto big = DefMatrix<2>::scaled_identity(150.0);  // |F| = 212 > 200
  CHECK(truncate_F(big, e3) == DefMatrix<2>::identity());
  const auto thin = DefMatrix<3>::diagonal({1.0, 1.0, 1e-3});
  CHECK(det_guard(thin, 1e-2) == DefMatrix<3>::identity());
  CHECK(det_guard(thin, 1e-4) == thin);
  auto flip = DefMatrix<2>::identity();
  flip(0, 0) = -1.0;
  CHECK(det_guard(flip, 1e-2) == DefMatrix<2>::identity());
}

TEST_CASE("mollifier kernel properties") {
  const Grid<2> g(32, 1.0);
  Field delta(1, g.npts());
  const std::size_t p0 = g.index({10, 12});
  delta.at(0, p0) = 1.0;
  const double r = 3.0 * g.h();
  const Field k = mollify_field(delta, r, g);
  double sum = 0.0;
  for (std::size_t p = 0; p < g.npts(); ++p) {
    const auto c = g.coords(p);
    const double dx = (c[0] - 10) * g.h(), dy = (c[1] - 12) * g.h();
    const double rr = std::sqrt(dx * dx + dy * dy);
    CHECK(k.at(0, p) >= 0.0);
    if (rr >= r) CHECK(k.at(0, p) == 0.0);
    sum += k.at(0, p);
    // Mirror symmetry of the kernel.
    const std::size_t q = g.index({(20 - c[0] + 32) % 32, (24 - c[1] + 32) % 32});
    CHECK(k.at(0, p) == doctest::Approx(k.at(0, q)).epsilon(1e-14));
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));

  std::mt19937_64 rng(3);
  Field f(2, g.npts());
  for (auto& x : f.raw()) x = std::uniform_real_distribution<double>(-1, 1)(rng);
  const Field mf = mollify_field(f, r, g);
  CHECK(mf.linf() <= f.linf());
  for (int c = 0; c < 2; ++c) {
    double a = 0, b = 0;
    for (std::size_t p = 0; p < g.npts(); ++p) {
      a += f.at(c, p);
      b += mf.at(c, p);
    }
    CHECK(a == doctest::Approx(b).epsilon(1e-12).scale(1.0));
  }
  CHECK_THROWS_AS(mollify_field(f, 0.5 * g.h(), g), InvalidInput);
}

TEST_CASE("initial data preparation") {
  const Grid<2> g(16, 1.0);
  const std::size_t np = g.npts();
  EpsilonSet eps;
  const auto m = reference_material();

  Field v(2, np), F(4, np), th(1, np, 2.0);
  std::mt19937_64 rng(5);
  for (auto& x : v.raw()) x = std::uniform_real_distribution<double>(-1, 1)(rng);
  for (std::size_t p = 0; p < np; ++p) set_matrix(F, p, DefMatrix<2>::scaled_identity(1.2));
  set_matrix(F, 0, DefMatrix<2>::scaled_identity(500.0));           // truncated
  set_matrix(F, 1, DefMatrix<2>::diagonal({1.0, 1e-4}));            // guarded
  th.at(0, 2) = 1e-6;                                               // energy below the floor

  const auto ps = prepare_initial_data(v, F, th, eps, m, g, true);
  CHECK(ps.truncated_points == 1);
  CHECK(ps.guarded_points == 1);
  CHECK(ps.floored_points >= 1);
  CHECK(ps.detF_min_before >= eps.eps5);
  std::vector<double> div(np);
  divergence(g, ps.state.v, div.data());
  for (double x : div) CHECK(std::abs(x) <= 1e-12);
  const EnergyInversion inv(m, eps);
  for (std::size_t p = 0; p < np; ++p) {
    const auto f = matrix_at<2>(ps.state.F, p);
    const auto ffT = f * transpose(f);
    const auto b = matrix_at<2>(ps.state.B, p);
    for (int i = 0; i < 4; ++i) CHECK(b.m[i] == doctest::Approx(ffT.m[i]).epsilon(1e-14));
    CHECK(ps.state.e.at(0, p) >= eps.energy_floor());
    CHECK(inv.e_star(ps.state.theta.at(0, p), f) == doctest::Approx(ps.state.e.at(0, p)).epsilon(1e-12));
  }
  // Far from the modified points F keeps its value after mollification.
  CHECK(ps.state.F.at(0, g.index({8, 8})) == doctest::Approx(1.2).epsilon(1e-14));
  CHECK_THROWS_AS(prepare_initial_data(v, Field(3, np), th, eps, m, g), InvalidInput);
}
