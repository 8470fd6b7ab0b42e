#include <doctest.h>

#include <cmath>

#include "thermvisc/checks.hpp"
#include "thermvisc/errors.hpp"
#include "thermvisc/solver.hpp"

using namespace thermvisc;

namespace {

// u = F00^2 under F_t = -(1/2)(F^3 - F) with F = f I, tau = 1, eps5 -> 0.
double logistic(double t, double u0) { return u0 / (u0 + (1.0 - u0) * std::exp(-t)); }

SimConfig relaxation(double dt, double t_end, Stepper st = Stepper::explicit_rk2) {
  SimConfig base;
  base.eps.eps5 = 1e-12;
  base.eps.eps2 = 1e-25;
  SimConfig c = relaxation_config(base, 2.0, dt, t_end);
  c.stepper = st;
  return c;
}

double final_u(const SimConfig& c) {
  double u = 0.0;
  simulate<2>(c, [&](const State<2>& s, std::size_t, StepEvent) { u = s.F.at(0, 0) * s.F.at(0, 0); });
  return u;
}

template <int D>
double energy_rate(const Solver<D>& sol, const State<D>& s) {
  typename Solver<D>::Rates r;
  sol.rates(s, r);
  double sum = 0.0;
  for (std::size_t p = 0; p < sol.grid().npts(); ++p) {
    for (int a = 0; a < D; ++a) sum += s.v.at(a, p) * r.v.at(a, p);
    sum += r.e.at(0, p);
  }
  return sum * sol.grid().cell_volume();
}

}  // namespace

TEST_CASE("equilibrium is a fixed point for both steppers") {
  for (auto st : {Stepper::explicit_rk2, Stepper::imex}) {
    SimConfig c;
    c.grid = GridSpec{2, 16, 1.0};
    c.stepper = st;
    c.eps.eps4 = st == Stepper::imex ? 1e-3 : 0.0;
    Solver<2> sol(c);
    State<2> s = sol.initial_state().state;
    const State<2> s0 = s;
    const double dt = sol.stable_dt(s);
    for (int k = 0; k < 50; ++k) sol.step(s, dt);
    for (std::size_t i = 0; i < s.F.raw().size(); ++i) CHECK(s.F.raw()[i] == s0.F.raw()[i]);
    for (std::size_t i = 0; i < s.e.raw().size(); ++i) CHECK(s.e.raw()[i] == s0.e.raw()[i]);
    CHECK(s.v.linf() == 0.0);
    CHECK(s.t == doctest::Approx(50 * dt));
  }
}

TEST_CASE("relaxation right-hand side in closed form") {
  const SimConfig c = relaxation(0.01, 1.0);
  Solver<2> sol(c);
  const State<2> s = sol.initial_state().state;
  const Field rf = sol.rhs_F(s);
  // B = 4I, (tau/2) c_F (B F - F) = 0.5 (1 - eps5/4) 6 I.
  const double expect = -3.0 * (4.0 - c.eps.eps5) / 4.0;
  CHECK(rf.at(0, 5) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(rf.at(1, 5) == 0.0);
  CHECK(sol.rhs_momentum(s).linf() == 0.0);
  const Field rb = sol.rhs_B(s);
  // tau c_B (B^2 - B) with c_B from sqrt(det B) = det F.
  CHECK(rb.at(0, 5) == doctest::Approx(-12.0 * (4.0 - c.eps.eps5) / 4.0).epsilon(1e-14));
}

TEST_CASE("relaxation matches the logistic law at second order") {
  const double u1 = final_u(relaxation(0.02, 1.0));
  const double u2 = final_u(relaxation(0.01, 1.0));
  const double exact = logistic(1.0, 4.0);
  const double e1 = std::abs(u1 - exact), e2 = std::abs(u2 - exact);
  CHECK(e2 <= 5 * 0.01 * 0.01 * 4.0);
  CHECK(std::log2(e1 / e2) >= 1.9);
  const double ui = final_u(relaxation(0.01, 1.0, Stepper::imex));
  CHECK(std::abs(ui - exact) <= 5 * 0.01 * 0.01 * 4.0);
}

TEST_CASE("twin B follows F F^T") {
  const Trajectory tr = simulate<2>(relaxation(1e-3, 0.5));
  CHECK_FALSE(tr.halted);
  CHECK(tr.max_twin_deviation <= 1e-4);
  CHECK(tr.twin_deviation.size() == tr.records.size());
}

TEST_CASE("the discrete energy identity holds for the semi-discrete rates") {
  SimConfig c;
  c.grid = GridSpec{2, 16, 1.0};
  c.initial.velocity = "taylor_green";
  c.initial.theta = "bump";
  c.initial.deformation = "random";
  c.initial.deformation_scale = 0.2;
  c.seed = 4;
  Solver<2> sol(c);
  const State<2> s = sol.initial_state().state;
  CHECK(std::abs(energy_rate(sol, s)) <= 1e-11);

  SimConfig c3 = c;
  c3.grid = GridSpec{3, 8, 1.0};
  Solver<3> sol3(c3);
  const State<3> s3 = sol3.initial_state().state;
  CHECK(std::abs(energy_rate(sol3, s3)) <= 1e-11);
}

TEST_CASE("stable step formula") {
  SimConfig c;
  c.grid = GridSpec{2, 16, 1.0};
  c.initial.velocity = "taylor_green";
  Solver<2> sol(c);
  const State<2> s = sol.initial_state().state;
  const double h = 1.0 / 16;
  const double speed = s.v.linf() * 0.0 + [&] {
    double a = 0, b = 0;
    for (double x : s.v.span(0)) a = std::max(a, std::abs(x));
    for (double x : s.v.span(1)) b = std::max(b, std::abs(x));
    return a + b;
  }();
  CHECK(sol.stable_dt(s) == doctest::Approx(0.8 / (4.0 / (h * h) + speed / h)));
}

TEST_CASE("too large a fixed dt is halved with a warning") {
  SimConfig c;
  c.grid = GridSpec{2, 16, 1.0};
  c.initial.velocity = "taylor_green";
  c.dt = 0.01;
  c.t_end = 0.02;
  const Trajectory tr = simulate<2>(c);
  CHECK_FALSE(tr.halted);
  REQUIRE_FALSE(tr.warnings.empty());
  CHECK(tr.warnings.front().find("halv") != std::string::npos);
  CHECK(tr.records.back().t == doctest::Approx(0.02).epsilon(1e-14));
}

TEST_CASE("invalid states raise StateError and halt runs cleanly") {
  SimConfig c;
  c.grid = GridSpec{2, 8, 1.0};
  Solver<2> sol(c);
  State<2> s = sol.initial_state().state;
  s.theta.at(0, 3) = -1.0;
  CHECK_THROWS_AS(sol.check_state(s), StateError);
  s = sol.initial_state().state;
  s.F.at(0, 2) = std::nan("");
  CHECK_THROWS_AS(sol.update_theta(s), StateError);
  CHECK_THROWS_AS(sol.step(s, -1.0), InvalidInput);

  SimConfig bad = c;
  bad.grid.d = 3;
  CHECK_THROWS_AS(Solver<2>{bad}, InvalidInput);
}

TEST_CASE("CSV cadence keeps the last step") {
  SimConfig c = relaxation(0.01, 0.095);
  c.csv_every = 4;
  const Trajectory tr = simulate<2>(c);
  CHECK(tr.steps == 10);
  CHECK(tr.records.size() == 4);  // steps 0, 4, 8 and the last
  CHECK(tr.records.back().t == doctest::Approx(0.095).epsilon(1e-14));
  CHECK(tr.dt_last == doctest::Approx(0.005).epsilon(1e-12));
}

TEST_CASE("three-dimensional Taylor-Green run stays admissible") {
  SimConfig c;
  c.grid = GridSpec{3, 8, 1.0};
  c.initial.velocity = "taylor_green";
  c.twin_B = true;
  c.t_end = 0.01;
  const Trajectory tr = run(c);
  CHECK_FALSE(tr.halted);
  CHECK_FALSE(tr.flags.any());
  CHECK(tr.records.back().divv_linf <= 1e-12);
}
