#include "thermvisc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "parallel_impl.hpp"
#include "thermvisc/errors.hpp"
#include "thermvisc/initial.hpp"

namespace thermvisc {

namespace {

Field like(const Field& f) { return Field(f.ncomp(), f.npts()); }

void ensure(Field& f, int ncomp, std::size_t np) {
  if (f.ncomp() != ncomp || f.npts() != np)
    f = Field(ncomp, np);
  else
    f.fill(0.0);
}

}  // namespace

template <int D>
Solver<D>::Solver(const SimConfig& cfg)
    : cfg_(cfg),
      grid_(cfg.grid.n, cfg.grid.L),
      m_(material_by_name(cfg.material, cfg.g_inf)),
      inv_(m_, cfg.eps),
      spectral_(std::make_unique<SpectralSolver<D>>(grid_)) {
  cfg_.validate();
  if (cfg_.grid.d != D) throw InvalidInput("Solver: grid dimension does not match the template dimension");
}

template <int D>
Solver<D>::~Solver() = default;

template <int D>
PreparedState<D> Solver<D>::initial_state() const {
  const InitialFields<D> f = build_initial_fields<D>(cfg_, grid_);
  PreparedState<D> out = prepare_initial_data<D>(f.v, f.F, f.theta, cfg_.eps, m_, grid_, cfg_.twin_B);
  check_state(out.state);
  return out;
}

template <int D>
void Solver<D>::project(Field& v) const {
  spectral_->project(v);
}

template <int D>
void Solver<D>::update_theta(State<D>& s) const {
  const std::size_t np = grid_.npts();
  parallel_for_checked(np, [&](std::size_t p) {
    const DefMatrix<D> f = matrix_at<D>(s.F, p);
    if (!is_finite(f)) throw StateError("non-finite F at point " + std::to_string(p));
    const double psi = inv_.psi_of(f);
    const double hint = s.theta.at(0, p);
    s.theta.at(0, p) = inv_.theta_star_psi(s.e.at(0, p), psi, hint);
  });
  check_state(s);
}

template <int D>
void Solver<D>::check_state(const State<D>& s) const {
  const std::size_t np = grid_.npts();
  for (std::size_t p = 0; p < np; ++p) {
    const double th = s.theta.at(0, p);
    if (!(th > 0.0) || !std::isfinite(th)) {
      std::ostringstream os;
      os << "theta <= 0 or non-finite (" << th << ") at point " << p << ", t = " << s.t;
      throw StateError(os.str());
    }
    const double dF = det(matrix_at<D>(s.F, p));
    if (!(dF > 0.0) || !std::isfinite(dF)) {
      std::ostringstream os;
      os << "det F <= 0 or non-finite (" << dF << ") at point " << p << ", t = " << s.t;
      throw StateError(os.str());
    }
    if (!std::isfinite(s.e.at(0, p))) throw StateError("non-finite energy at point " + std::to_string(p));
    for (int a = 0; a < D; ++a)
      if (!std::isfinite(s.v.at(a, p))) throw StateError("non-finite velocity at point " + std::to_string(p));
    if (s.has_B()) {
      const SpdMatrix<D> b = SpdMatrix<D>::from_upper(matrix_at<D>(s.B, p));
      if (!is_finite(b.as_matrix()) || !(min_eigenvalue(b) > 0.0)) {
        std::ostringstream os;
        os << "twin B lost positive definiteness at point " << p << ", t = " << s.t;
        throw StateError(os.str());
      }
    }
  }
}

template <int D>
Field Solver<D>::assemble_stress(const State<D>& s) const {
  const std::size_t np = grid_.npts();
  Field gv(D * D, np);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) partial(grid_, s.v.comp(i), j, gv.comp(i * D + j));
  Field T(D * D, np);
  const EpsilonSet& eps = cfg_.eps;
  const auto& cpl = inv_.coupling();
  parallel_for_checked(np, [&](std::size_t p) {
    const double th = s.theta.at(0, p);
    if (!(th > 0.0)) throw StateError("assemble_stress: theta <= 0 at point " + std::to_string(p));
    const DefMatrix<D> f = matrix_at<D>(s.F, p);
    const SpdMatrix<D> b = sym_from_f(f);
    const double a = std::max(th - eps.eps6, 0.0) / th;
    const double el = 2.0 * m_.rho * cutoff_lambda(frobenius(f), eps.eps3) * cpl.value(th) * a;
    const double nu = m_.nu(th);
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        const double dij = 0.5 * (gv.at(i * D + j, p) + gv.at(j * D + i, p));
        T.at(i * D + j, p) = el * b(i, j) + 2.0 * nu * dij;
      }
  });
  return T;
}

template <int D>
void Solver<D>::rates_impl(const State<D>& s, Rates& r, bool split, double nu_bar) const {
  const Grid<D>& g = grid_;
  const std::size_t np = g.npts();
  const EpsilonSet& eps = cfg_.eps;
  const auto& cpl = inv_.coupling();
  const double rho = m_.rho;
  const double inv2h = 0.5 / g.h();
  const bool twin = s.has_B();

  ensure(r.v, D, np);
  ensure(r.F, D * D, np);
  ensure(r.e, 1, np);
  if (twin) ensure(r.B, D * D, np);

  Field gv(D * D, np);  // gv(i*D+j) = d_j v_i
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) partial(g, s.v.comp(i), j, gv.comp(i * D + j));

  Field T(D * D, np);
  Field w(D * D, np);  // Lambda(|v|^2) v_a v_b
  std::vector<double> kappa(np), lam_v(np);

  parallel_for_checked(np, [&](std::size_t p) {
    const double th = s.theta.at(0, p);
    if (!(th > 0.0)) throw StateError("theta <= 0 at point " + std::to_string(p));
    const DefMatrix<D> f = matrix_at<D>(s.F, p);
    const SpdMatrix<D> b = sym_from_f(f);
    DefMatrix<D> L;
    for (int k = 0; k < D * D; ++k) L.m[static_cast<std::size_t>(k)] = gv.at(k, p);

    const double a = std::max(th - eps.eps6, 0.0) / th;
    const double lam_f = cutoff_lambda(frobenius(f), eps.eps3);
    const double el = 2.0 * rho * lam_f * cpl.value(th) * a;
    const double nu = m_.nu(th);
    const double nu_exp = split ? nu - nu_bar : nu;
    double heat = 0.0;
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        const double dij = 0.5 * (L(i, j) + L(j, i));
        T.at(i * D + j, p) = el * b(i, j) + 2.0 * nu_exp * dij;
        heat += (el * b(i, j) + 2.0 * nu * dij) * dij;
      }
    r.e.at(0, p) = heat / rho;

    const double tau = m_.tau(th);
    const double dF = det(f);
    const double cF = dF > 0.0 ? std::max(dF - eps.eps5, 0.0) / dF : 0.0;
    const DefMatrix<D> LF = L * f;
    const DefMatrix<D> BF = b.as_matrix() * f;
    for (int k = 0; k < D * D; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      r.F.at(k, p) = lam_f * a * LF.m[kk] - 0.5 * tau * cF * (BF.m[kk] - f.m[kk]);
    }

    if (twin) {
      const DefMatrix<D> bt = matrix_at<D>(s.B, p);
      const double dB = det(bt);
      const double sdB = dB > 0.0 ? std::sqrt(dB) : 0.0;
      const double cB = sdB > 0.0 ? std::max(sdB - eps.eps5, 0.0) / sdB : 0.0;
      const double tr = trace(bt);
      const double aB = cutoff_lambda(std::sqrt(std::max(tr, 0.0)), eps.eps3) * a;
      const DefMatrix<D> LB = L * bt;
      const DefMatrix<D> B2 = bt * bt;
      for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j)
          r.B.at(i * D + j, p) = aB * (LB(i, j) + LB(j, i)) - tau * cB * (B2(i, j) - bt(i, j));
    }

    kappa[p] = m_.kappa(th);
    double v2 = 0.0;
    for (int q = 0; q < D; ++q) v2 += s.v.at(q, p) * s.v.at(q, p);
    const double lv = cutoff_lambda(v2, eps.eps3);
    lam_v[p] = lv;
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) w.at(i * D + j, p) = lv * s.v.at(i, p) * s.v.at(j, p);
  });

  // Momentum: -1/2 [div(Lambda v v) + Lambda v.grad v] + div T / rho.
  parallel_for(np, [&](std::size_t p) {
    for (int i = 0; i < D; ++i) {
      double divT = 0.0, divw = 0.0, adv = 0.0;
      for (int j = 0; j < D; ++j) {
        const std::size_t u = g.up(p, j), d = g.dn(p, j);
        divT += (T.at(i * D + j, u) - T.at(i * D + j, d)) * inv2h;
        divw += (w.at(i * D + j, u) - w.at(i * D + j, d)) * inv2h;
        adv += s.v.at(j, p) * gv.at(i * D + j, p);
      }
      r.v.at(i, p) = -0.5 * (divw + lam_v[p] * adv) + divT / rho;
    }
  });
  project(r.v);

  std::vector<double> tmp(np);
  const TransportScheme scheme = cfg_.transport;
  for (int k = 0; k < D * D; ++k) {
    transport_div(g, s.F.comp(k), s.v, tmp.data(), scheme);
    double* o = r.F.comp(k);
    for (std::size_t p = 0; p < np; ++p) o[p] -= tmp[p];
    if (!split && eps.eps4 > 0.0) {
      compact_laplacian(g, s.F.comp(k), tmp.data());
      for (std::size_t p = 0; p < np; ++p) o[p] += eps.eps4 * tmp[p];
    }
    if (twin) {
      transport_div(g, s.B.comp(k), s.v, tmp.data(), scheme);
      double* ob = r.B.comp(k);
      for (std::size_t p = 0; p < np; ++p) ob[p] -= tmp[p];
      if (!split && eps.eps4 > 0.0) {
        compact_laplacian(g, s.B.comp(k), tmp.data());
        for (std::size_t p = 0; p < np; ++p) ob[p] += eps.eps4 * tmp[p];
      }
    }
  }

  double* oe = r.e.comp(0);
  transport_div(g, s.e.comp(0), s.v, tmp.data(), scheme);
  for (std::size_t p = 0; p < np; ++p) oe[p] -= tmp[p];
  diffusion_div(g, kappa.data(), s.theta.comp(0), tmp.data());
  for (std::size_t p = 0; p < np; ++p) oe[p] += tmp[p] / rho;
  if (!split && eps.eps7_diffusion) {
    const double e7 = eps.mollifier_radius(g.h());
    compact_laplacian(g, s.e.comp(0), tmp.data());
    for (std::size_t p = 0; p < np; ++p) oe[p] += e7 * tmp[p];
  }
}

template <int D>
void Solver<D>::rates(const State<D>& s, Rates& r) const {
  rates_impl(s, r, false, 0.0);
}

template <int D>
Field Solver<D>::rhs_momentum(const State<D>& s) const {
  Rates r;
  rates(s, r);
  return r.v;
}
template <int D>
Field Solver<D>::rhs_F(const State<D>& s) const {
  Rates r;
  rates(s, r);
  return r.F;
}
template <int D>
Field Solver<D>::rhs_energy(const State<D>& s) const {
  Rates r;
  rates(s, r);
  return r.e;
}
template <int D>
Field Solver<D>::rhs_B(const State<D>& s) const {
  if (!s.has_B()) throw InvalidInput("rhs_B: state carries no twin B");
  Rates r;
  rates(s, r);
  return r.B;
}

template <int D>
double Solver<D>::stable_dt(const State<D>& s) const {
  const Grid<D>& g = grid_;
  const std::size_t np = g.npts();
  const bool imex = cfg_.stepper == Stepper::imex;
  double diff = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    const double th = s.theta.at(0, p);
    diff = std::max(diff, m_.kappa(th));
    if (!imex) diff = std::max(diff, m_.nu(th));
  }
  if (!imex) {
    diff = std::max(diff, cfg_.eps.eps4);
    if (cfg_.eps.eps7_diffusion) diff = std::max(diff, cfg_.eps.mollifier_radius(g.h()));
  }
  double speed = 0.0;
  for (int a = 0; a < D; ++a) {
    double mx = 0.0;
    for (double x : s.v.span(a)) mx = std::max(mx, std::abs(x));
    speed += mx;
  }
  speed = std::max(speed, 1e-8);
  const double h = g.h();
  // 1/(A + B) <= min(1/A, 1/B): the combined bound keeps the upwind
  // transport plus diffusion update a convex combination.
  return cfg_.cfl_safety / (2.0 * D * diff / (h * h) + speed / h);
}

template <int D>
void Solver<D>::step(State<D>& s, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("step: dt must be positive");
  if (cfg_.stepper == Stepper::imex)
    step_imex(s, dt);
  else
    step_rk2(s, dt);
}

template <int D>
void Solver<D>::step_rk2(State<D>& s, double dt) {
  Rates k1, k2;
  rates(s, k1);
  State<D> s1 = s;
  s1.v.axpy(dt, k1.v);
  s1.F.axpy(dt, k1.F);
  s1.e.axpy(dt, k1.e);
  if (s.has_B()) s1.B.axpy(dt, k1.B);
  s1.t = s.t + dt;
  project(s1.v);
  update_theta(s1);

  rates(s1, k2);
  const double h = 0.5 * dt;
  s.v.axpy(h, k1.v);
  s.v.axpy(h, k2.v);
  s.F.axpy(h, k1.F);
  s.F.axpy(h, k2.F);
  s.e.axpy(h, k1.e);
  s.e.axpy(h, k2.e);
  if (s.has_B()) {
    s.B.axpy(h, k1.B);
    s.B.axpy(h, k2.B);
  }
  s.t += dt;
  project(s.v);
  update_theta(s);
}

// ARS(2,2,2): L-stable implicit part, second order overall.
template <int D>
void Solver<D>::step_imex(State<D>& s, double dt) {
  const double gamma = 1.0 - 1.0 / std::sqrt(2.0);
  const double delta = 1.0 - 1.0 / (2.0 * gamma);
  const std::size_t np = grid_.npts();
  const EpsilonSet& eps = cfg_.eps;

  double nu_bar = 0.0;
  for (std::size_t p = 0; p < np; ++p) nu_bar = std::max(nu_bar, m_.nu(s.theta.at(0, p)));
  const double cv = nu_bar / m_.rho;
  const double cF = eps.eps4;
  const double ce = eps.eps7_diffusion ? eps.mollifier_radius(grid_.h()) : 0.0;

  auto solve = [&](State<D>& y, double c) {
    for (int a = 0; a < D; ++a) spectral_->helmholtz(y.v.comp(a), c * cv, LaplacianKind::wide);
    for (int k = 0; k < D * D; ++k) spectral_->helmholtz(y.F.comp(k), c * cF, LaplacianKind::compact);
    spectral_->helmholtz(y.e.comp(0), c * ce, LaplacianKind::compact);
    if (y.has_B())
      for (int k = 0; k < D * D; ++k) spectral_->helmholtz(y.B.comp(k), c * cF, LaplacianKind::compact);
  };
  auto axpy_state = [](State<D>& y, double a, const Rates& r) {
    y.v.axpy(a, r.v);
    y.F.axpy(a, r.F);
    y.e.axpy(a, r.e);
    if (y.has_B()) y.B.axpy(a, r.B);
  };

  Rates E1, E2;
  rates_impl(s, E1, true, nu_bar);
  State<D> y2 = s;
  axpy_state(y2, gamma * dt, E1);
  const State<D> pre2 = y2;
  solve(y2, gamma * dt);
  // Implicit rate at stage 2 recovered from the solve: I2 = (Y2 - pre2)/(gamma dt).
  Rates I2{like(s.v), like(s.F), like(s.e), s.has_B() ? like(s.B) : Field()};
  const double inv = 1.0 / (gamma * dt);
  I2.v.axpy(inv, y2.v);
  I2.v.axpy(-inv, pre2.v);
  I2.F.axpy(inv, y2.F);
  I2.F.axpy(-inv, pre2.F);
  I2.e.axpy(inv, y2.e);
  I2.e.axpy(-inv, pre2.e);
  if (s.has_B()) {
    I2.B.axpy(inv, y2.B);
    I2.B.axpy(-inv, pre2.B);
  }
  y2.t = s.t + gamma * dt;
  project(y2.v);
  update_theta(y2);

  rates_impl(y2, E2, true, nu_bar);
  State<D> y3 = s;
  axpy_state(y3, delta * dt, E1);
  axpy_state(y3, (1.0 - delta) * dt, E2);
  axpy_state(y3, (1.0 - gamma) * dt, I2);
  solve(y3, gamma * dt);
  y3.t = s.t + dt;
  project(y3.v);
  update_theta(y3);
  s = std::move(y3);
}

template <int D>
double twin_deviation(const State<D>& s) {
  if (!s.has_B()) return 0.0;
  double num = 0.0, den = 0.0;
  for (std::size_t p = 0; p < s.F.npts(); ++p) {
    const SpdMatrix<D> b = sym_from_f(matrix_at<D>(s.F, p));
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        num = std::max(num, std::abs(s.B.at(i * D + j, p) - b(i, j)));
        den = std::max(den, std::abs(b(i, j)));
      }
  }
  return den > 0.0 ? num / den : num;
}

template class Solver<2>;
template class Solver<3>;
template double twin_deviation<2>(const State<2>&);
template double twin_deviation<3>(const State<3>&);

}  // namespace thermvisc
