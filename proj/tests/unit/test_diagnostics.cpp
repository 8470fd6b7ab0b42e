#include <doctest.h>

#include <boost/math/special_functions/beta.hpp>
#include <cmath>

#include "thermvisc/checks.hpp"
#include "thermvisc/diagnostics.hpp"
#include "thermvisc/errors.hpp"
#include "thermvisc/solver.hpp"

using namespace thermvisc;

namespace {

double h_oracle(double theta, double l) {
  const double x = theta / (1.0 + theta);
  return 2.0 * boost::math::beta(1.0 + l, 2.0 - l) * boost::math::ibetac(1.0 + l, 2.0 - l, x);
}

State<2> uniform_state(const Grid<2>& g, double f, double theta) {
  State<2> s = State<2>::zeros(g, false);
  for (std::size_t p = 0; p < g.npts(); ++p) {
    set_matrix(s.F, p, DefMatrix<2>::scaled_identity(f));
    s.theta.at(0, p) = theta;
    s.e.at(0, p) = theta;
  }
  return s;
}

}  // namespace

TEST_CASE("CSV header and row format") {
  CHECK(csv_header() ==
        "t,kinetic,internal,total_E,entropy_total,entropy_production,lambda_entropy_total,theta_min,theta_max,"
        "detF_min,F_linf,gronwall_bound,divv_linf,energy_residual,v_l2sq,e_l1,cum_grad_v_l2sq,cum_F_l4_4,"
        "ln_theta_l1,ln_detB_l2,cum_grad_lntheta_l2sq");
  DiagnosticsRecord r;
  r.t = 0.1;
  r.kinetic = 1.0 / 3.0;
  r.cum_grad_lntheta_l2sq = -2.5e-300;
  const std::string row = csv_row(r);
  CHECK(row.rfind("0.1,0.3333333333333333,0,", 0) == 0);
  CHECK(row.substr(row.rfind(',') + 1) == "-2.5e-300");
  CHECK(std::count(row.begin(), row.end(), ',') == 20);
  CHECK(record_values(r).size() == 21);
}

TEST_CASE("entropy audit of a uniform stretched state") {
  const Grid<2> g(8, 1.0);
  const auto m = reference_material();
  EpsilonSet eps;
  const State<2> s = uniform_state(g, 2.0, 1.5);
  const EntropyAudit a = entropy_audit(s, g, m, eps);
  // B = 4I: psi = 8 - 2 - ln 16, |B - I|^2 = 18, det F = 4.
  const double psi = 6.0 - std::log(16.0);
  const double g15 = 1.5 / 2.5, gp15 = 1.0 / (2.5 * 2.5);
  CHECK(a.eta_total == doctest::Approx(std::log(1.5) - gp15 * psi).epsilon(1e-14));
  CHECK(a.elastic == doctest::Approx((4.0 - eps.eps5) / 4.0 * g15 * 18.0 / 1.5).epsilon(1e-14));
  CHECK(a.heat == 0.0);
  CHECK(a.viscous == 0.0);
  CHECK(a.production == a.elastic);
  CHECK(a.min_term >= 0.0);
}

TEST_CASE("heat production over faces") {
  const Grid<2> g(8, 1.0);
  const auto m = reference_material();
  State<2> s = uniform_state(g, 1.0, 1.0);
  // theta = 1 + 0.5 [x-index even]: every x-face has theta pair (1, 1.5).
  for (std::size_t p = 0; p < g.npts(); ++p)
    if (g.coords(p)[0] % 2 == 0) s.theta.at(0, p) = 1.5;
  const EntropyAudit a = entropy_audit(s, g, m, EpsilonSet{});
  const double h = g.h();
  const double per_face = 0.25 / (1.5 * h * h);
  CHECK(a.heat == doctest::Approx(per_face * g.npts() * g.cell_volume()).epsilon(1e-13));
  s.theta.at(0, 0) = 0.0;
  CHECK_THROWS_AS(entropy_audit(s, g, m, EpsilonSet{}), DomainError);
}

TEST_CASE("lambda entropy terms against closed forms") {
  const Grid<2> g(8, 1.0);
  const auto m = reference_material();
  EpsilonSet eps;
  const State<2> s = uniform_state(g, 2.0, 1.5);
  const double l = 0.5;
  const auto h = [&](double t) { return h_oracle(t, l); };
  const LambdaTerms t = lambda_entropy_terms(s, g, m, eps, l, h);
  const double psi = 6.0 - std::log(16.0);
  const double c = (4.0 - eps.eps5) / 4.0;
  const double tl = std::sqrt(1.5);
  CHECK(t.eta_lambda == doctest::Approx(2.0 * tl - h(1.5) * psi).epsilon(1e-13));
  CHECK(t.coupling == doctest::Approx(c * 18.0 * (tl / 6.25 - h(1.5))).epsilon(1e-13));
  CHECK(t.stretching == 0.0);
  CHECK(t.dissipation == doctest::Approx(c * 0.6 * 18.0 * tl / 1.5).epsilon(1e-13));

  LambdaTerms a, b;
  a.eta_lambda = 1.0;
  b.eta_lambda = 1.5;
  a.coupling = 2.0;
  b.coupling = 4.0;
  b.dissipation = 1.0;
  // (0.5)/0.1 + 3 - 0.5
  CHECK(lambda_balance_defect(a, b, 0.1) == doctest::Approx(7.5));
}

TEST_CASE("ln det B defect on the exact relaxation trajectory is the trapezoid error") {
  // With det F = u and u' = u(1 - u), d/dt(2 ln det F) = 2(1 - u) and the
  // trapezoid rule on 2(u - 1) misses it by dt^2/12 * 2u'' + O(dt^4).
  const Grid<2> g(8, 64.0);
  const auto m = reference_material();
  EpsilonSet eps;
  eps.eps5 = 1e-12;
  eps.eps2 = 1e-25;
  auto u = [](double t) { return 4.0 / (4.0 + (1.0 - 4.0) * std::exp(-t)); };
  for (double dt : {0.02, 0.01, 0.005}) {
    const State<2> a = uniform_state(g, std::sqrt(u(0.3)), 1.0);
    const State<2> b = uniform_state(g, std::sqrt(u(0.3 + dt)), 1.0);
    const double um = u(0.3 + 0.5 * dt);
    const double upp = um * (1.0 - um) * (1.0 - 2.0 * um);
    CHECK(ln_det_balance_defect(a, b, dt, m, eps) == doctest::Approx(dt * dt / 12.0 * 2.0 * std::abs(upp)).epsilon(0.02));
  }
}

TEST_CASE("bounds monitor and entropy step rule") {
  EpsilonSet eps;
  DiagnosticsRecord init;
  init.v_l2sq = 1.0;
  init.e_l1 = 1.0;
  init.theta_min = 1.0;
  init.detF_min = 1.0;
  init.gronwall_bound = 200.0;
  init.F_linf = 1.0;
  CHECK_FALSE(bounds_monitor(init, init, eps).any());

  DiagnosticsRecord r = init;
  r.theta_min = 0.98e-3;
  r.detF_min = 0.89e-2;
  r.F_linf = 211.0;
  r.e_l1 = 3.5;
  r.ln_detB_l2 = 2.5;
  const MonitorFlags f = bounds_monitor(r, init, eps);
  CHECK(f.theta_floor);
  CHECK(f.detF_floor);
  CHECK(f.gronwall);
  CHECK(f.energy_norms);
  CHECK(f.log_norms);
  CHECK_FALSE(f.non_finite);
  CHECK(f.names().size() == 5);
  r.kinetic = std::nan("");
  CHECK(bounds_monitor(r, init, eps).non_finite);

  double margin = 0.0;
  CHECK_FALSE(entropy_step_violation(1.0, 1.0 - 0.5e-6, 0.0, 0.1, &margin));
  CHECK(margin == doctest::Approx(0.5e-6));
  CHECK(entropy_step_violation(1.0, 1.0 - 2e-6, 0.0, 0.1));
  CHECK_FALSE(entropy_step_violation(1.0, 0.99, 0.011, 0.1));

  MonitorFlags x, y;
  y.entropy = true;
  y.entropy_violations = 2;
  y.worst_entropy_margin = -1.0;
  x.merge(y);
  CHECK(x.entropy);
  CHECK(x.entropy_violations == 2);
  CHECK(x.worst_entropy_margin == -1.0);
  CHECK(x.names() == std::vector<std::string>{"entropy"});
}

TEST_CASE("tracker on the rest state") {
  SimConfig c;
  c.grid = GridSpec{2, 8, 1.0};
  Solver<2> sol(c);
  const State<2> s = sol.initial_state().state;
  DiagnosticsTracker<2> tr(sol.grid(), sol.material(), c.eps);
  const DiagnosticsRecord r0 = tr.observe(s);
  CHECK(r0.kinetic == 0.0);
  CHECK(r0.internal == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r0.entropy_production == 0.0);
  CHECK(r0.gronwall_bound == 200.0);
  CHECK(r0.detF_min == 1.0);
  CHECK(r0.F_linf == doctest::Approx(std::sqrt(2.0)));
  CHECK(r0.lambda_entropy_total == doctest::Approx(2.0).epsilon(1e-10));
  State<2> s1 = s;
  s1.t = 0.5;
  const DiagnosticsRecord r1 = tr.observe(s1);
  CHECK(r1.gronwall_bound == doctest::Approx(200.0 * std::exp(1.0)));
  CHECK(r1.energy_residual == 0.0);
  CHECK(r1.cum_F_l4_4 == doctest::Approx(0.5 * 4.0));  // |F|^4 = 4 on a unit box
  CHECK_FALSE(tr.flags().any());
}

TEST_CASE("Taylor-Green runs keep entropy and production monitors clean") {
  SimConfig c;
  c.grid = GridSpec{2, 32, 1.0};
  c.initial.velocity = "taylor_green";
  c.initial.theta = "bump";
  c.t_end = 0.02;
  const Trajectory tr = run(c);
  CHECK_FALSE(tr.halted);
  CHECK_FALSE(tr.flags.entropy);
  CHECK_FALSE(tr.flags.production_sign);
  for (std::size_t k = 1; k < tr.records.size(); ++k) CHECK(tr.records[k].kinetic < tr.records[k - 1].kinetic);
}
