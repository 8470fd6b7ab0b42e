#include "thermvisc/regularizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel_impl.hpp"
#include "thermvisc/errors.hpp"

namespace thermvisc {

double cutoff_lambda(double s, double eps3) {
  const double x = std::abs(s);
  if (x <= 1.0 / eps3) return 1.0;
  if (x >= 2.0 / eps3) return 0.0;
  const double u = x * eps3 - 1.0;
  return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

double cutoff_lambda_derivative(double s, double eps3) {
  const double x = std::abs(s);
  if (x <= 1.0 / eps3 || x >= 2.0 / eps3) return 0.0;
  const double u = x * eps3 - 1.0;
  const double d = -30.0 * eps3 * u * u * (1.0 - u) * (1.0 - u);
  return s < 0.0 ? -d : d;
}

template <int D>
Field mollify_field(const Field& f, double eps7, const Grid<D>& g) {
  if (f.npts() != g.npts()) throw InvalidInput("mollify_field: field does not live on this grid");
  if (!(eps7 >= g.h())) throw InvalidInput("mollify_field: kernel radius below the grid spacing");
  const int r = static_cast<int>(std::floor(eps7 / g.h()));
  const int n = g.n();
  struct Tap {
    std::array<int, D> off;
    double w;
  };
  std::vector<Tap> taps;
  double total = 0.0;
  std::array<int, D> off{};
  for (int a = 0; a < D; ++a) off[a] = -r;
  while (true) {
    double rho2 = 0.0;
    for (int a = 0; a < D; ++a) rho2 += (off[a] * g.h()) * (off[a] * g.h());
    rho2 /= eps7 * eps7;
    if (rho2 < 1.0) {
      const double w = std::exp(-1.0 / (1.0 - rho2));
      taps.push_back({off, w});
      total += w;
    }
    int a = D - 1;
    while (a >= 0 && off[a] == r) off[a--] = -r;
    if (a < 0) break;
    ++off[a];
  }
  for (auto& t : taps) t.w /= total;

  Field out(f.ncomp(), f.npts());
  for (int c = 0; c < f.ncomp(); ++c) {
    const double* in = f.comp(c);
    double* o = out.comp(c);
    parallel_for(g.npts(), [&](std::size_t p) {
      const auto x = g.coords(p);
      double s = 0.0;
      for (const auto& t : taps) {
        std::array<int, D> y{};
        for (int a = 0; a < D; ++a) y[a] = ((x[a] + t.off[a]) % n + n) % n;
        s += t.w * in[g.index(y)];
      }
      o[p] = s;
    });
  }
  return out;
}

template <int D>
PreparedState<D> prepare_initial_data(const Field& v0, const Field& F0, const Field& theta0, const EpsilonSet& eps,
                                      const MaterialTable& m, const Grid<D>& g, bool with_B) {
  const std::size_t np = g.npts();
  if (v0.ncomp() != D || v0.npts() != np || F0.ncomp() != D * D || F0.npts() != np || theta0.ncomp() != 1 ||
      theta0.npts() != np)
    throw InvalidInput("prepare_initial_data: field shape mismatch");
  eps.validate();

  PreparedState<D> out;
  State<D>& s = out.state;
  s = State<D>::zeros(g, with_B);
  s.v = v0;
  SpectralSolver<D> spectral(g);
  spectral.project(s.v);

  Field guarded(D * D, np);
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < np; ++p) {
    const DefMatrix<D> f = matrix_at<D>(F0, p);
    if (!is_finite(f)) throw InvalidInput("prepare_initial_data: non-finite F0");
    DefMatrix<D> t = truncate_F(f, eps.eps3);
    if (!(t == f)) ++out.truncated_points;
    const DefMatrix<D> q = det_guard(t, eps.eps5);
    if (!(q == t)) ++out.guarded_points;
    set_matrix(guarded, p, q);
    dmin = std::min(dmin, det(q));
  }
  out.detF_min_before = dmin;
  s.F = mollify_field(guarded, eps.mollifier_radius(g.h()), g);
  dmin = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < np; ++p) dmin = std::min(dmin, det(matrix_at<D>(s.F, p)));
  out.detF_min_after = dmin;

  const EnergyInversion inv(m, eps);
  const double floor = eps.energy_floor();
  for (std::size_t p = 0; p < np; ++p) {
    const DefMatrix<D> f = matrix_at<D>(s.F, p);
    const double psi = inv.psi_of(f);
    double e = inv.e_star_psi(theta0.at(0, p), psi);
    if (e < floor) {
      e = 1.0;
      ++out.floored_points;
    }
    s.e.at(0, p) = e;
    s.theta.at(0, p) = inv.theta_star_psi(e, psi);
    if (with_B) {
      const SpdMatrix<D> b = sym_from_f(f);
      for (int k = 0; k < D * D; ++k) s.B.at(k, p) = b.entries()[static_cast<std::size_t>(k)];
    }
  }
  s.t = 0.0;
  return out;
}

template Field mollify_field<2>(const Field&, double, const Grid<2>&);
template Field mollify_field<3>(const Field&, double, const Grid<3>&);
template PreparedState<2> prepare_initial_data<2>(const Field&, const Field&, const Field&, const EpsilonSet&,
                                                  const MaterialTable&, const Grid<2>&, bool);
template PreparedState<3> prepare_initial_data<3>(const Field&, const Field&, const Field&, const EpsilonSet&,
                                                  const MaterialTable&, const Grid<3>&, bool);

}  // namespace thermvisc
