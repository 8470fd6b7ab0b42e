#include "thermvisc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermvisc/errors.hpp"
#include "thermvisc/format.hpp"
#include "thermvisc/operators.hpp"
#include "thermvisc/regularizers.hpp"

namespace thermvisc {

const std::string& csv_header() {
  static const std::string h =
      "t,kinetic,internal,total_E,entropy_total,entropy_production,lambda_entropy_total,theta_min,theta_max,"
      "detF_min,F_linf,gronwall_bound,divv_linf,energy_residual,v_l2sq,e_l1,cum_grad_v_l2sq,cum_F_l4_4,"
      "ln_theta_l1,ln_detB_l2,cum_grad_lntheta_l2sq";
  return h;
}

std::vector<double> record_values(const DiagnosticsRecord& r) {
  return {r.t,         r.kinetic,         r.internal,     r.total_E,         r.entropy_total,      r.entropy_production,
          r.lambda_entropy_total, r.theta_min, r.theta_max, r.detF_min,  r.F_linf,             r.gronwall_bound,
          r.divv_linf, r.energy_residual, r.v_l2sq,       r.e_l1,            r.cum_grad_v_l2sq,    r.cum_F_l4_4,
          r.ln_theta_l1, r.ln_detB_l2,   r.cum_grad_lntheta_l2sq};
}

std::string csv_row(const DiagnosticsRecord& r) {
  std::string out;
  for (double x : record_values(r)) {
    if (!out.empty()) out += ',';
    out += format_double(x);
  }
  return out;
}

namespace {

template <int D>
Field velocity_gradient(const State<D>& s, const Grid<D>& g) {
  Field gv(D * D, g.npts());
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) partial(g, s.v.comp(i), j, gv.comp(i * D + j));
  return gv;
}

template <int D>
double sym_norm2(const Field& gv, std::size_t p) {
  double s = 0.0;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) {
      const double d = 0.5 * (gv.at(i * D + j, p) + gv.at(j * D + i, p));
      s += d * d;
    }
  return s;
}

template <int D>
double b_minus_i_norm2(const SpdMatrix<D>& b) {
  double s = 0.0;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) {
      const double x = b(i, j) - (i == j ? 1.0 : 0.0);
      s += x * x;
    }
  return s;
}

template <int D>
double b_ddot_d(const SpdMatrix<D>& b, const Field& gv, std::size_t p) {
  double s = 0.0;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) s += b(i, j) * 0.5 * (gv.at(i * D + j, p) + gv.at(j * D + i, p));
  return s;
}

double relax_factor(double detF, double eps5) { return detF > 0.0 ? std::max(detF - eps5, 0.0) / detF : 0.0; }

}  // namespace

template <int D>
EntropyAudit entropy_audit(const State<D>& s, const Grid<D>& g, const MaterialTable& m, const EpsilonSet& eps) {
  const std::size_t np = g.npts();
  const RegularizedCoupling cpl(m, eps.eps1);
  const Field gv = velocity_gradient(s, g);
  EntropyAudit a;
  a.min_term = 0.0;
  std::vector<double> kappa(np);
  const double h2 = g.h() * g.h();
  for (std::size_t p = 0; p < np; ++p) {
    const double th = s.theta.at(0, p);
    if (!(th > 0.0)) throw DomainError("entropy_audit: theta <= 0");
    const DefMatrix<D> f = matrix_at<D>(s.F, p);
    const double dF = det(f);
    if (!(dF > 0.0)) throw DomainError("entropy_audit: det F <= 0");
    const SpdMatrix<D> b = sym_from_f(f);
    const double psi = psi_tilde_reg(b, eps.eps2);
    a.eta_total += m.rho * (m.c_v * std::log(th) - cpl.slope(th) * psi);
    const double visc = 2.0 * m.nu(th) * sym_norm2<D>(gv, p) / th;
    const double elas = m.rho * m.tau(th) * relax_factor(dF, eps.eps5) * cpl.value(th) * b_minus_i_norm2(b) / th;
    a.viscous += visc;
    a.elastic += elas;
    a.min_term = std::min({a.min_term, visc, elas});
    kappa[p] = m.kappa(th);
  }
  for (std::size_t p = 0; p < np; ++p)
    for (int ax = 0; ax < D; ++ax) {
      const std::size_t u = g.up(p, ax);
      const double t0 = s.theta.at(0, p), t1 = s.theta.at(0, u);
      const double term = 0.5 * (kappa[p] + kappa[u]) * (t1 - t0) * (t1 - t0) / (t0 * t1 * h2);
      a.heat += term;
      a.min_term = std::min(a.min_term, term);
    }
  const double vol = g.cell_volume();
  a.eta_total *= vol;
  a.heat *= vol;
  a.viscous *= vol;
  a.elastic *= vol;
  a.production = a.heat + a.viscous + a.elastic;
  return a;
}

template <int D>
LambdaTerms lambda_entropy_terms(const State<D>& s, const Grid<D>& g, const MaterialTable& m, const EpsilonSet& eps,
                                 double lambda, const std::function<double(double)>& h) {
  const std::size_t np = g.npts();
  const Field gv = velocity_gradient(s, g);
  Field gth(D, np);
  gradient(g, s.theta.comp(0), gth);
  LambdaTerms out;
  for (std::size_t p = 0; p < np; ++p) {
    const double th = s.theta.at(0, p);
    if (!(th > 0.0)) throw DomainError("lambda_entropy_terms: theta <= 0");
    const DefMatrix<D> f = matrix_at<D>(s.F, p);
    const double dF = det(f);
    if (!(dF > 0.0)) throw DomainError("lambda_entropy_terms: det F <= 0");
    const SpdMatrix<D> b = sym_from_f(f);
    const double psi = psi_tilde_reg(b, eps.eps2);
    const double hl = h(th);
    const double tl = std::pow(th, lambda);
    const double gp = m.g_prime(th);
    const double c = relax_factor(dF, eps.eps5);
    const double bi2 = b_minus_i_norm2(b);
    const double tau = m.tau(th);
    out.eta_lambda += m.rho * (m.c_v * tl / lambda - hl * psi);
    out.coupling += m.rho * tau * c * bi2 * (gp * tl - hl);
    const double a = std::max(th - eps.eps6, 0.0) / th;
    out.stretching += 2.0 * m.rho * cutoff_lambda(frobenius(f), eps.eps3) * a * (hl - gp * tl) * b_ddot_d(b, gv, p);
    double gt2 = 0.0;
    for (int ax = 0; ax < D; ++ax) gt2 += gth.at(ax, p) * gth.at(ax, p);
    out.dissipation += (1.0 - lambda) * m.kappa(th) * gt2 / std::pow(th, 2.0 - lambda) +
                       (2.0 * m.nu(th) * sym_norm2<D>(gv, p) + m.rho * tau * c * m.g(th) * bi2) * tl / th;
  }
  const double vol = g.cell_volume();
  out.eta_lambda *= vol;
  out.coupling *= vol;
  out.stretching *= vol;
  out.dissipation *= vol;
  return out;
}

double lambda_balance_defect(const LambdaTerms& a, const LambdaTerms& b, double dt) {
  return std::abs((b.eta_lambda - a.eta_lambda) / dt + 0.5 * (a.coupling + b.coupling) +
                  0.5 * (a.stretching + b.stretching) - 0.5 * (a.dissipation + b.dissipation));
}

template <int D>
double ln_det_balance_defect(const State<D>& a, const State<D>& b, double dt, const MaterialTable& m,
                             const EpsilonSet& eps) {
  auto parts = [&](const State<D>& s, double& lndet, double& rate) {
    const DefMatrix<D> f = matrix_at<D>(s.F, 0);
    const double dF = det(f);
    if (!(dF > 0.0)) throw DomainError("ln_det_balance_defect: det F <= 0");
    const SpdMatrix<D> bb = sym_from_f(f);
    lndet = 2.0 * std::log(dF);
    rate = m.tau(s.theta.at(0, 0)) * relax_factor(dF, eps.eps5) * (trace(bb) - D);
  };
  double la, ra, lb, rb;
  parts(a, la, ra);
  parts(b, lb, rb);
  return std::abs((lb - la) / dt + 0.5 * (ra + rb));
}

// ---- monitors ---------------------------------------------------------------

bool MonitorFlags::any() const {
  return theta_floor || detF_floor || gronwall || energy_norms || log_norms || non_finite || entropy ||
         production_sign;
}

std::vector<std::string> MonitorFlags::names() const {
  std::vector<std::string> n;
  if (theta_floor) n.push_back("theta_floor");
  if (detF_floor) n.push_back("detF_floor");
  if (gronwall) n.push_back("gronwall");
  if (energy_norms) n.push_back("energy_norms");
  if (log_norms) n.push_back("log_norms");
  if (non_finite) n.push_back("non_finite");
  if (entropy) n.push_back("entropy");
  if (production_sign) n.push_back("production_sign");
  return n;
}

void MonitorFlags::merge(const MonitorFlags& o) {
  theta_floor |= o.theta_floor;
  detF_floor |= o.detF_floor;
  gronwall |= o.gronwall;
  energy_norms |= o.energy_norms;
  log_norms |= o.log_norms;
  non_finite |= o.non_finite;
  entropy |= o.entropy;
  production_sign |= o.production_sign;
  entropy_violations += o.entropy_violations;
  worst_entropy_margin = std::min(worst_entropy_margin, o.worst_entropy_margin);
  min_production_term = std::min(min_production_term, o.min_production_term);
}

MonitorFlags bounds_monitor(const DiagnosticsRecord& r, const DiagnosticsRecord& initial, const EpsilonSet& eps) {
  MonitorFlags f;
  for (double x : record_values(r))
    if (!std::isfinite(x)) f.non_finite = true;
  f.theta_floor = r.theta_min < 0.99 * eps.energy_floor();
  f.detF_floor = r.detF_min < 0.9 * eps.eps5;
  f.gronwall = r.F_linf > 1.05 * r.gronwall_bound;
  f.energy_norms = r.v_l2sq + r.e_l1 > 2.0 * (initial.v_l2sq + initial.e_l1);
  f.log_norms = r.ln_theta_l1 > 2.0 * std::max(initial.ln_theta_l1, 1.0) ||
                r.ln_detB_l2 > 2.0 * std::max(initial.ln_detB_l2, 1.0);
  return f;
}

bool entropy_step_violation(double eta_a, double eta_b, double production, double dt, double* margin) {
  const double slack = 1e-6 * std::abs(eta_a) + 10.0 * dt * production;
  const double m = (eta_b - eta_a) + slack;
  if (margin) *margin = m;
  return m < 0.0;
}

template <int D>
DiagnosticsTracker<D>::DiagnosticsTracker(const Grid<D>& g, const MaterialTable& m, const EpsilonSet& eps)
    : g_(g), m_(m), eps_(eps), h_(m, eps.lambda) {}

template <int D>
DiagnosticsRecord DiagnosticsTracker<D>::observe(const State<D>& s) {
  const Grid<D>& g = g_;
  const std::size_t np = g.npts();
  const double vol = g.cell_volume();
  const MaterialTable& m = m_;
  DiagnosticsRecord r;
  r.t = s.t;

  const EntropyAudit audit = entropy_audit(s, g, m, eps_);
  r.entropy_total = audit.eta_total;
  r.entropy_production = audit.production;

  const Field gv = velocity_gradient(s, g);
  std::vector<double> lnth(np), divv(np);
  divergence(g, s.v, divv.data());
  r.theta_min = std::numeric_limits<double>::infinity();
  r.theta_max = -std::numeric_limits<double>::infinity();
  r.detF_min = std::numeric_limits<double>::infinity();
  Integrands in;
  double lndetB2 = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    double v2 = 0.0;
    for (int a = 0; a < D; ++a) v2 += s.v.at(a, p) * s.v.at(a, p);
    const double e = s.e.at(0, p);
    const double th = s.theta.at(0, p);
    const DefMatrix<D> f = matrix_at<D>(s.F, p);
    const double dF = det(f);
    const double fn2 = ddot(f, f);
    r.kinetic += 0.5 * m.rho * v2;
    r.internal += m.rho * e;
    r.v_l2sq += v2;
    r.e_l1 += std::abs(e);
    r.theta_min = std::min(r.theta_min, th);
    r.theta_max = std::max(r.theta_max, th);
    r.detF_min = std::min(r.detF_min, dF);
    r.F_linf = std::max(r.F_linf, std::sqrt(fn2));
    r.divv_linf = std::max(r.divv_linf, std::abs(divv[p]));
    lnth[p] = std::log(th);
    r.ln_theta_l1 += std::abs(lnth[p]);
    const double ldb = 2.0 * std::log(dF);
    lndetB2 += ldb * ldb;
    const SpdMatrix<D> b = sym_from_f(f);
    const double psi = psi_tilde_reg(b, eps_.eps2);
    r.lambda_entropy_total += m.rho * (m.c_v * std::pow(th, eps_.lambda) / eps_.lambda - h_(th) * psi);
    double gv2 = 0.0;
    for (int k = 0; k < D * D; ++k) gv2 += gv.at(k, p) * gv.at(k, p);
    in.grad_v += gv2;
    in.F4 += fn2 * fn2;
  }
  Field glt(D, np);
  gradient(g, lnth.data(), glt);
  for (std::size_t p = 0; p < np; ++p)
    for (int a = 0; a < D; ++a) in.grad_lntheta += glt.at(a, p) * glt.at(a, p);

  r.kinetic *= vol;
  r.internal *= vol;
  r.total_E = r.kinetic + r.internal;
  r.v_l2sq *= vol;
  r.e_l1 *= vol;
  r.ln_theta_l1 *= vol;
  r.ln_detB_l2 = std::sqrt(lndetB2 * vol);
  r.lambda_entropy_total *= vol;
  in.grad_v *= vol;
  in.F4 *= vol;
  in.grad_lntheta *= vol;

  if (!started_) {
    F0_linf_ = r.F_linf;
    r.energy_residual = 0.0;
  } else {
    const double dt = r.t - last_.t;
    r.energy_residual = r.total_E - initial_.total_E;
    r.cum_grad_v_l2sq = last_.cum_grad_v_l2sq + 0.5 * dt * (last_int_.grad_v + in.grad_v);
    r.cum_F_l4_4 = last_.cum_F_l4_4 + 0.5 * dt * (last_int_.F4 + in.F4);
    r.cum_grad_lntheta_l2sq = last_.cum_grad_lntheta_l2sq + 0.5 * dt * (last_int_.grad_lntheta + in.grad_lntheta);
  }
  r.gronwall_bound = std::max(2.0 / eps_.eps3, F0_linf_) * std::exp(m.K * r.t);

  if (!started_) {
    initial_ = r;
    started_ = true;
  }
  MonitorFlags f = bounds_monitor(r, initial_, eps_);
  if (audit.min_term < -1e-14) f.production_sign = true;
  f.min_production_term = std::min(0.0, audit.min_term);
  if (flags_seen_ && r.t > last_.t) {
    double margin = 0.0;
    const double dt = r.t - last_.t;
    if (entropy_step_violation(last_.entropy_total, r.entropy_total,
                               std::max(last_.entropy_production, r.entropy_production), dt, &margin)) {
      f.entropy = true;
      f.entropy_violations = 1;
    }
    f.worst_entropy_margin = std::min(0.0, margin);
  }
  flags_.merge(f);
  flags_seen_ = true;
  last_ = r;
  last_int_ = in;
  return r;
}

#define THERMVISC_INSTANTIATE(D)                                                                               \
  template EntropyAudit entropy_audit<D>(const State<D>&, const Grid<D>&, const MaterialTable&, const EpsilonSet&); \
  template LambdaTerms lambda_entropy_terms<D>(const State<D>&, const Grid<D>&, const MaterialTable&,             \
                                               const EpsilonSet&, double, const std::function<double(double)>&);  \
  template double ln_det_balance_defect<D>(const State<D>&, const State<D>&, double, const MaterialTable&,       \
                                           const EpsilonSet&);                                                   \
  template class DiagnosticsTracker<D>;

THERMVISC_INSTANTIATE(2)
THERMVISC_INSTANTIATE(3)

}  // namespace thermvisc
