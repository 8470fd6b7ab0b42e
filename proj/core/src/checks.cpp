#include "thermvisc/checks.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "thermvisc/diagnostics.hpp"
#include "thermvisc/errors.hpp"
#include "thermvisc/format.hpp"
#include "thermvisc/initial.hpp"
#include "thermvisc/operators.hpp"
#include "thermvisc/regularizers.hpp"
#include "thermvisc/solver.hpp"

namespace thermvisc {

bool CheckReport::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.passed; });
}

void CheckReport::add(const std::string& name, bool ok, double measured, double tolerance, const std::string& detail) {
  entries.push_back({name, ok, measured, tolerance, detail});
}

std::string CheckReport::to_text() const {
  std::ostringstream os;
  for (const auto& e : entries) {
    os << (e.passed ? "PASS " : "FAIL ") << e.name << "  measured=" << format_double(e.measured)
       << " tol=" << format_double(e.tolerance);
    if (!e.detail.empty()) os << "  (" << e.detail << ")";
    os << "\n";
  }
  return os.str();
}

CheckSuite parse_suite(const std::string& name) {
  if (name == "algebra") return CheckSuite::algebra;
  if (name == "invariants") return CheckSuite::invariants;
  if (name == "all") return CheckSuite::all;
  throw InvalidInput("unknown suite '" + name + "' (expected algebra, invariants or all)");
}

SimConfig relaxation_config(const SimConfig& base, double f0, double dt, double t_end) {
  SimConfig c = base;
  c.grid = GridSpec{2, 8, 64.0};
  c.initial = InitialSpec{};
  c.initial.deformation = "uniform";
  c.initial.deformation_scale = f0;
  c.initial.theta_base = 1.0;
  c.dt = dt;
  c.t_end = t_end;
  c.twin_B = true;
  c.stepper = Stepper::explicit_rk2;
  c.csv_every = 1;
  c.snapshot_every = 0;
  c.eps.eps7 = 0.0;
  return c;
}

double lambda_balance_study(const SimConfig& base, double lambda, double dt) {
  const SimConfig c = relaxation_config(base, 2.0, dt, 1.0);
  Solver<2> sol(c);
  const MaterialTable& m = sol.material();
  double cached_theta = -1.0, cached_h = 0.0;
  const std::function<double(double)> h = [&](double th) {
    if (th != cached_theta) {
      cached_theta = th;
      cached_h = h_lambda(th, lambda, m);
    }
    return cached_h;
  };
  LambdaTerms prev;
  bool have = false;
  double worst = 0.0;
  double t_prev = 0.0;
  const Trajectory tr = simulate<2>(c, [&](const State<2>& s, std::size_t, StepEvent ev) {
    if (ev == StepEvent::halt) return;
    const LambdaTerms t = lambda_entropy_terms(s, sol.grid(), m, c.eps, lambda, h);
    if (have) worst = std::max(worst, lambda_balance_defect(prev, t, s.t - t_prev));
    prev = t;
    t_prev = s.t;
    have = true;
  });
  if (tr.halted) throw StateError("lambda_balance_study: " + tr.halt_reason);
  return worst / std::pow(c.grid.L, c.grid.d);
}

namespace {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit_double(rng_()); }

  template <int D>
  DefMatrix<D> matrix(double amp) {
    DefMatrix<D> m;
    for (auto& x : m.m) x = uniform(-amp, amp);
    return m;
  }
  // Q diag(l) Q^T with eigenvalues in [lo, hi] and Q orthogonal (Gram-Schmidt).
  template <int D>
  SpdMatrix<D> spd(double lo, double hi) {
    DefMatrix<D> q = matrix<D>(1.0);
    for (int j = 0; j < D; ++j) {
      for (int k = 0; k < j; ++k) {
        double d = 0.0;
        for (int i = 0; i < D; ++i) d += q(i, j) * q(i, k);
        for (int i = 0; i < D; ++i) q(i, j) -= d * q(i, k);
      }
      double n = 0.0;
      for (int i = 0; i < D; ++i) n += q(i, j) * q(i, j);
      n = std::sqrt(n);
      for (int i = 0; i < D; ++i) q(i, j) /= n;
    }
    std::array<double, D> l{};
    for (auto& x : l) x = std::exp(uniform(std::log(lo), std::log(hi)));
    DefMatrix<D> b = q * DefMatrix<D>::diagonal(l) * transpose(q);
    return SpdMatrix<D>::from_upper(b);
  }

 private:
  std::mt19937_64 rng_;
};

template <int D>
void algebra_checks(CheckReport& rep, Sampler& rnd) {
  const std::string tag = "[d=" + std::to_string(D) + "] ";
  const MaterialTable m = reference_material();

  double min_eig = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2000; ++k) min_eig = std::min(min_eig, min_eigenvalue(sym_from_f(rnd.matrix<D>(3.0))));
  rep.add(tag + "sym_from_f semidefinite", min_eig >= -1e-12, min_eig, -1e-12);

  double min_psi = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2000; ++k) min_psi = std::min(min_psi, psi_tilde(rnd.spd<D>(0.01, 100.0)));
  rep.add(tag + "psi_tilde nonnegative", min_psi >= 0.0, min_psi, 0.0);
  rep.add(tag + "psi_tilde(I) = 0", psi_tilde(SpdMatrix<D>::identity()) == 0.0,
          psi_tilde(SpdMatrix<D>::identity()), 0.0);

  double worst_fd = 0.0;
  const double hfd = 1e-5;
  for (int k = 0; k < 300; ++k) {
    const SpdMatrix<D> b = rnd.spd<D>(0.1, 10.0);
    const SpdMatrix<D> dpsi = dpsi_tilde(b);
    for (int i = 0; i < D; ++i)
      for (int j = i; j < D; ++j) {
        DefMatrix<D> e;
        e(i, j) = 1.0;
        e(j, i) = 1.0;
        const SpdMatrix<D> bp = SpdMatrix<D>::from_upper(b.as_matrix() + hfd * e);
        const SpdMatrix<D> bm = SpdMatrix<D>::from_upper(b.as_matrix() - hfd * e);
        const double fd = (psi_tilde(bp) - psi_tilde(bm)) / (2.0 * hfd);
        const double an = ddot(dpsi.as_matrix(), e);
        worst_fd = std::max(worst_fd, std::abs(fd - an) / std::max(1.0, std::abs(an)));
      }
  }
  rep.add(tag + "dpsi_tilde vs central differences", worst_fd <= 1e-6, worst_fd, 1e-6);

  double worst_reg = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const SpdMatrix<D> b = rnd.spd<D>(0.05, 20.0);
    worst_reg = std::max(worst_reg, std::abs(psi_tilde_reg(b, 1e-5) - psi_tilde(b)));
  }
  rep.add(tag + "psi_tilde_reg = psi_tilde above eps2", worst_reg == 0.0, worst_reg, 0.0);

  double worst_gibbs = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double th = std::exp(rnd.uniform(std::log(1e-2), std::log(1e2)));
    const SpdMatrix<D> b = rnd.spd<D>(0.2, 5.0);
    const double e = internal_energy(th, b, m);
    const double gibbs = e - th * entropy(th, b, m) - helmholtz(th, b, m);
    worst_gibbs = std::max(worst_gibbs, std::abs(gibbs) / std::max(1.0, std::abs(e)));
  }
  rep.add(tag + "Gibbs relation e = psi + theta eta", worst_gibbs <= 1e-12, worst_gibbs, 1e-12);

  EpsilonSet eps;
  const EnergyInversion inv(m, eps);
  double worst_rt = 0.0, min_slope = std::numeric_limits<double>::infinity(), max_slope = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const double th = std::exp(rnd.uniform(std::log(1e-4), std::log(1e3)));
    DefMatrix<D> f = DefMatrix<D>::identity() + rnd.matrix<D>(0.6);
    if (det(f) <= 0.0) f = DefMatrix<D>::identity();
    const double psi = inv.psi_of(f);
    const double e = inv.e_star_psi(th, psi);
    const double back = inv.theta_star_psi(e, psi);
    worst_rt = std::max(worst_rt, std::abs(back - th) / std::max(1.0, th));
    const double de = 1e-6 * std::max(1.0, e);
    const double slope = (inv.theta_star_psi(e + de, psi) - inv.theta_star_psi(e - de, psi)) / (2.0 * de);
    min_slope = std::min(min_slope, slope);
    max_slope = std::max(max_slope, slope);
  }
  rep.add(tag + "theta* round trip", worst_rt <= 1e-10, worst_rt, 1e-10);
  rep.add(tag + "dtheta*/de >= 0", min_slope >= -1e-8, min_slope, -1e-8);
  rep.add(tag + "dtheta*/de <= 1", max_slope <= 1.0 + 1e-8, max_slope, 1.0 + 1e-8);
}

void material_checks(CheckReport& rep) {
  const MaterialTable m = reference_material();
  const auto rep_m = validate_material(m, log_grid(1e-3, 1e3, 241));
  rep.add("reference material admissible", rep_m.passed(), rep_m.passed() ? 1.0 : 0.0, 1.0);

  const double h0 = h_lambda(0.0, 0.5, m);
  const double rel = std::abs(h0 - std::numbers::pi / 4.0) / (std::numbers::pi / 4.0);
  rep.add("h_lambda(0+) = pi/4", rel <= 1e-8, rel, 1e-8);

  const double C = growth_constant(m);
  double worst_bound = -std::numeric_limits<double>::infinity();
  double prev = h0;
  bool mono = true, nonneg = true;
  for (double th : log_grid(1e-3, 1e3, 61)) {
    const double h = h_lambda(th, 0.5, m);
    nonneg = nonneg && h >= 0.0 && h <= h0;
    mono = mono && h <= prev + 1e-14;
    prev = h;
    const double bound = std::pow(th, 0.5) * m.g_prime(th) + (0.5 / 0.5) * C * std::pow(th, 0.5 - m.delta - 1.0);
    worst_bound = std::max(worst_bound, h - bound);
  }
  rep.add("h_lambda nonnegative and bounded by h_lambda(0+)", nonneg, nonneg ? 1.0 : 0.0, 1.0);
  rep.add("h_lambda nonincreasing", mono, mono ? 1.0 : 0.0, 1.0);
  rep.add("h_lambda growth bound", worst_bound <= 0.0, worst_bound, 0.0);

  double worst_cut = 0.0;
  bool cut_ok = true;
  const double e3 = 1e-2;
  double prevc = 1.0;
  for (int k = 0; k <= 20000; ++k) {
    const double s = 3.0 / e3 * k / 20000.0;
    const double c = cutoff_lambda(s, e3);
    cut_ok = cut_ok && c >= 0.0 && c <= 1.0 && c <= prevc;
    prevc = c;
    worst_cut = std::max(worst_cut, std::abs(cutoff_lambda_derivative(s, e3)));
  }
  cut_ok = cut_ok && cutoff_lambda(1.0 / e3, e3) == 1.0 && cutoff_lambda(2.0 / e3, e3) == 0.0;
  rep.add("cutoff Lambda range, plateau, monotone", cut_ok, cut_ok ? 1.0 : 0.0, 1.0);
  rep.add("cutoff |Lambda'| <= 2 eps3", worst_cut <= 2.0 * e3, worst_cut, 2.0 * e3);

  const RegularizedCoupling cpl(m, 1e-3);
  double max_curv = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 4000; ++k) max_curv = std::max(max_curv, cpl.curvature(3e-3 * k / 4000.0));
  rep.add("g_reg concave", max_curv <= 0.0, max_curv, 0.0);
}

template <int D>
double max_abs(const Field& f) {
  return f.linf();
}

void invariant_checks(CheckReport& rep, Sampler& rnd) {
  const Grid<2> g(32, 1.0);
  const std::size_t np = g.npts();
  Field v(2, np);
  for (auto& x : v.raw()) x = rnd.uniform(-1.0, 1.0);

  SpectralSolver<2> sp(g);
  Field pv = v;
  sp.project(pv);
  std::vector<double> dv(np);
  divergence(g, pv, dv.data());
  double dmax = 0.0;
  for (double x : dv) dmax = std::max(dmax, std::abs(x));
  rep.add("projection divergence-free", dmax <= 1e-10 * std::max(1.0, v.linf() / g.h()), dmax, 1e-10);
  Field ppv = pv;
  sp.project(ppv);
  ppv.axpy(-1.0, pv);
  rep.add("projection idempotent", ppv.linf() <= 1e-10 * std::max(1.0, pv.linf()), ppv.linf(), 1e-10);
  double n0 = 0.0, n1 = 0.0;
  for (std::size_t k = 0; k < v.raw().size(); ++k) {
    n0 += v.raw()[k] * v.raw()[k];
    n1 += pv.raw()[k] * pv.raw()[k];
  }
  rep.add("projection norm nonincreasing", n1 <= n0 * (1.0 + 1e-14), n1 / n0, 1.0);

  std::vector<double> q(np), w(np), tq(np);
  for (auto& x : q) x = rnd.uniform(0.0, 1.0);
  for (auto& x : w) x = rnd.uniform(-1.0, 1.0);
  transport_div(g, q.data(), pv, tq.data(), TransportScheme::upwind);
  double sum = 0.0, scale = 0.0;
  for (double x : tq) {
    sum += x;
    scale += std::abs(x);
  }
  rep.add("transport conserves the sum", std::abs(sum) <= 1e-12 * std::max(1.0, scale), std::abs(sum), 1e-12);

  const double dt = 0.9 / (cfl_number(pv, g, 1.0));
  double qmin = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < np; ++p) qmin = std::min(qmin, q[p] - dt * tq[p]);
  rep.add("upwind transport keeps q >= 0 under CFL", qmin >= 0.0, qmin, 0.0);

  // Summation by parts: sum u d_x w + sum w d_x u = 0.
  std::vector<double> du(np), dw(np);
  partial(g, q.data(), 0, du.data());
  partial(g, w.data(), 0, dw.data());
  double sbp = 0.0, sbp_scale = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    sbp += q[p] * dw[p] + w[p] * du[p];
    sbp_scale += std::abs(q[p] * dw[p]);
  }
  rep.add("summation by parts", std::abs(sbp) <= 1e-12 * sbp_scale, std::abs(sbp), 1e-12);

  Field f1(1, np);
  for (auto& x : f1.raw()) x = rnd.uniform(-1.0, 1.0);
  const Field mf = mollify_field(f1, 3.0 * g.h(), g);
  rep.add("mollifier L-infinity contraction", mf.linf() <= f1.linf(), mf.linf(), f1.linf());
  Field c1(1, np, 0.7);
  const Field mc = mollify_field(c1, 3.0 * g.h(), g);
  double cdev = 0.0;
  for (double x : mc.raw()) cdev = std::max(cdev, std::abs(x - 0.7));
  rep.add("mollifier preserves constants", cdev <= 1e-15, cdev, 1e-15);

  // Equilibrium fixed point.
  SimConfig cfg;
  cfg.grid = GridSpec{2, 16, 1.0};
  Solver<2> solver(cfg);
  State<2> s = solver.initial_state().state;
  const State<2> s0 = s;
  const double dts = solver.stable_dt(s);
  for (int k = 0; k < 100; ++k) solver.step(s, dts);
  double dev = 0.0;
  for (std::size_t k = 0; k < s.F.raw().size(); ++k) dev = std::max(dev, std::abs(s.F.raw()[k] - s0.F.raw()[k]));
  for (std::size_t k = 0; k < s.e.raw().size(); ++k) dev = std::max(dev, std::abs(s.e.raw()[k] - s0.e.raw()[k]));
  dev = std::max(dev, s.v.linf());
  rep.add("equilibrium is a fixed point (100 steps)", dev <= 1e-12, dev, 1e-12);

  // Pointwise entropy production terms on a random admissible state.
  SimConfig rc;
  rc.grid = GridSpec{2, 16, 1.0};
  rc.initial.velocity = "random";
  rc.initial.theta = "bump";
  rc.initial.deformation = "random";
  rc.initial.deformation_scale = 0.2;
  Solver<2> rs(rc);
  const State<2> st = rs.initial_state().state;
  const EntropyAudit au = entropy_audit(st, rs.grid(), rs.material(), rc.eps);
  rep.add("entropy production terms nonnegative", au.min_term >= -1e-14, au.min_term, -1e-14);

  // Lambda-entropy balance in the spatially uniform regime: trapezoid defect
  // must shrink at least linearly under dt halving.
  SimConfig ode;
  ode.eps.eps5 = 1e-12;
  ode.eps.eps2 = 1e-25;
  for (double l : {0.1, 0.5, 0.9}) {
    const double d1 = lambda_balance_study(ode, l, 0.02);
    const double d2 = lambda_balance_study(ode, l, 0.01);
    const double order = std::log2(d1 / d2);
    rep.add("lambda-entropy balance order, lambda = " + format_double(l), order >= 0.9, order, 0.9,
            "defects " + format_double(d1) + ", " + format_double(d2));
  }
}

}  // namespace

CheckReport run_check_suite(CheckSuite suite, std::uint64_t seed) {
  CheckReport rep;
  Sampler rnd(seed);
  if (suite == CheckSuite::algebra || suite == CheckSuite::all) {
    algebra_checks<2>(rep, rnd);
    algebra_checks<3>(rep, rnd);
    material_checks(rep);
  }
  if (suite == CheckSuite::invariants || suite == CheckSuite::all) invariant_checks(rep, rnd);
  return rep;
}

CheckReport oracle_suite(const SimConfig& cfg) {
  CheckReport rep;
  cfg.validate();
  const MaterialTable m = material_by_name(cfg.material, cfg.g_inf);

  // (a) twin B against F F^T.
  {
    const SimConfig rc = relaxation_config(cfg, 2.0, 1e-3, 1.0);
    const Trajectory tr = simulate<2>(rc);
    rep.add("twin B vs F F^T on relaxation (dt = 1e-3)", !tr.halted && tr.max_twin_deviation <= 1e-4,
            tr.max_twin_deviation, 1e-4, tr.halt_reason);
  }
  // (b) ln det B law, defect order under dt halving.
  {
    double defect[2] = {0.0, 0.0};
    for (int r = 0; r < 2; ++r) {
      const double dt = r == 0 ? 0.02 : 0.01;
      const SimConfig rc = relaxation_config(cfg, 2.0, dt, 1.0);
      State<2> prev;
      bool have = false;
      double worst = 0.0;
      simulate<2>(rc, [&](const State<2>& s, std::size_t, StepEvent ev) {
        if (ev == StepEvent::halt) return;
        if (have) worst = std::max(worst, ln_det_balance_defect(prev, s, s.t - prev.t, m, rc.eps));
        prev = s;
        have = true;
      });
      defect[r] = worst;
    }
    const double order = std::log2(defect[0] / defect[1]);
    rep.add("ln det B law defect order", order >= 0.9, order, 0.9,
            "defects " + format_double(defect[0]) + ", " + format_double(defect[1]));
  }
  // (c) h_lambda at theta -> 0 against Gamma(1+l) Gamma(2-l) scaled for the family.
  {
    const double l = 0.5;
    const double exact = cfg.g_inf * std::tgamma(1.0 + l) * std::tgamma(2.0 - l);
    const double rel = std::abs(h_lambda(0.0, l, m) - exact) / exact;
    rep.add("h_lambda(0+) vs Beta-function value", rel <= 1e-8, rel, 1e-8);
  }
  // (d) finite-difference checks.
  {
    Sampler rnd(cfg.seed + 7);
    const EnergyInversion inv(m, cfg.eps);
    double worst_de = 0.0, lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double th = std::exp(rnd.uniform(std::log(1e-4), std::log(1e3)));
      DefMatrix<2> f = DefMatrix<2>::identity() + rnd.matrix<2>(0.6);
      if (det(f) <= 0.0) f = DefMatrix<2>::identity();
      const double psi = inv.psi_of(f);
      const double ht = 1e-6 * th;
      const double fd = (inv.e_star_psi(th + ht, psi) - inv.e_star_psi(th - ht, psi)) / (2.0 * ht);
      const double an = inv.de_dtheta_psi(th, psi);
      worst_de = std::max(worst_de, std::abs(fd - an) / an);
      const double e = inv.e_star_psi(th, psi);
      const double de = 1e-6 * std::max(1.0, e);
      const double s = (inv.theta_star_psi(e + de, psi) - inv.theta_star_psi(e - de, psi)) / (2.0 * de);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    rep.add("de*/dtheta vs central differences", worst_de <= 1e-5, worst_de, 1e-5);
    rep.add("dtheta*/de in [-1e-8, 1/c_v + 1e-8]", lo >= -1e-8 && hi <= 1.0 / m.c_v + 1e-8, hi, 1.0 / m.c_v + 1e-8,
            "min " + format_double(lo));
    CheckReport alg;
    Sampler r2(cfg.seed + 11);
    algebra_checks<2>(alg, r2);
    for (const auto& e : alg.entries)
      if (e.name.find("dpsi_tilde") != std::string::npos) rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace thermvisc
