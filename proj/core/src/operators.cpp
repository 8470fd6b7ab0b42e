#include "thermvisc/operators.hpp"

#include <algorithm>
#include <cmath>

#include "parallel_impl.hpp"
#include "thermvisc/errors.hpp"

namespace thermvisc {

template <int D>
void partial(const Grid<D>& g, const double* q, int axis, double* out) {
  const double inv = 0.5 / g.h();
  parallel_for(g.npts(), [&](std::size_t p) { out[p] = (q[g.up(p, axis)] - q[g.dn(p, axis)]) * inv; });
}

template <int D>
void gradient(const Grid<D>& g, const double* q, Field& out) {
  if (out.ncomp() != D || out.npts() != g.npts()) throw InvalidInput("gradient: output shape mismatch");
  for (int a = 0; a < D; ++a) partial(g, q, a, out.comp(a));
}

template <int D>
void divergence(const Grid<D>& g, const Field& v, double* out) {
  if (v.ncomp() != D || v.npts() != g.npts()) throw InvalidInput("divergence: input shape mismatch");
  const double inv = 0.5 / g.h();
  parallel_for(g.npts(), [&](std::size_t p) {
    double s = 0.0;
    for (int a = 0; a < D; ++a) {
      const double* va = v.comp(a);
      s += va[g.up(p, a)] - va[g.dn(p, a)];
    }
    out[p] = s * inv;
  });
}

template <int D>
void laplacian(const Grid<D>& g, const double* q, double* out) {
  Field gq(D, g.npts());
  gradient(g, q, gq);
  divergence(g, gq, out);
}

template <int D>
void compact_laplacian(const Grid<D>& g, const double* q, double* out) {
  const double inv = 1.0 / (g.h() * g.h());
  parallel_for(g.npts(), [&](std::size_t p) {
    double s = 0.0;
    for (int a = 0; a < D; ++a) s += q[g.up(p, a)] - 2.0 * q[p] + q[g.dn(p, a)];
    out[p] = s * inv;
  });
}

template <int D>
void diffusion_div(const Grid<D>& g, const double* kappa, const double* theta, double* out) {
  const double inv = 1.0 / (g.h() * g.h());
  parallel_for(g.npts(), [&](std::size_t p) {
    double s = 0.0;
    for (int a = 0; a < D; ++a) {
      const std::size_t u = g.up(p, a), d = g.dn(p, a);
      s += 0.5 * (kappa[p] + kappa[u]) * (theta[u] - theta[p]);
      s -= 0.5 * (kappa[d] + kappa[p]) * (theta[p] - theta[d]);
    }
    out[p] = s * inv;
  });
}

template <int D>
Field diff_ops(const Field& f, const Grid<D>& g, DiffKind kind) {
  if (f.npts() != g.npts() || f.ncomp() < 1) throw InvalidInput("diff_ops: field does not live on this grid");
  switch (kind) {
    case DiffKind::grad: {
      Field out(f.ncomp() * D, g.npts());
      for (int c = 0; c < f.ncomp(); ++c)
        for (int a = 0; a < D; ++a) partial(g, f.comp(c), a, out.comp(c * D + a));
      return out;
    }
    case DiffKind::div: {
      if (f.ncomp() % D != 0) throw InvalidInput("diff_ops: divergence needs a multiple of d components");
      const int nc = f.ncomp() / D;
      Field out(nc, g.npts());
      std::vector<double> tmp(g.npts());
      for (int c = 0; c < nc; ++c)
        for (int a = 0; a < D; ++a) {
          partial(g, f.comp(c * D + a), a, tmp.data());
          double* o = out.comp(c);
          for (std::size_t p = 0; p < g.npts(); ++p) o[p] += tmp[p];
        }
      return out;
    }
    case DiffKind::laplacian: {
      Field out(f.ncomp(), g.npts());
      for (int c = 0; c < f.ncomp(); ++c) laplacian(g, f.comp(c), out.comp(c));
      return out;
    }
  }
  throw InvalidInput("diff_ops: unknown kind");
}

template <int D>
void transport_div(const Grid<D>& g, const double* q, const Field& v, double* out, TransportScheme scheme) {
  if (v.ncomp() != D || v.npts() != g.npts()) throw InvalidInput("transport_div: velocity shape mismatch");
  const double inv = 1.0 / g.h();
  const bool upwind = scheme == TransportScheme::upwind;
  auto flux = [&](std::size_t p, std::size_t u, const double* va) {
    const double uf = 0.5 * (va[p] + va[u]);
    if (!upwind) return uf * 0.5 * (q[p] + q[u]);
    return uf > 0.0 ? uf * q[p] : uf * q[u];
  };
  parallel_for(g.npts(), [&](std::size_t p) {
    double s = 0.0;
    for (int a = 0; a < D; ++a) {
      const double* va = v.comp(a);
      const std::size_t d = g.dn(p, a);
      s += flux(p, g.up(p, a), va) - flux(d, p, va);
    }
    out[p] = s * inv;
  });
}

template <int D>
Field transport_div(const Field& q, const Field& v, const Grid<D>& g, TransportScheme scheme) {
  if (q.npts() != g.npts()) throw InvalidInput("transport_div: field does not live on this grid");
  Field out(q.ncomp(), g.npts());
  for (int c = 0; c < q.ncomp(); ++c) transport_div(g, q.comp(c), v, out.comp(c), scheme);
  return out;
}

template <int D>
double cfl_number(const Field& v, const Grid<D>& g, double dt) {
  double s = 0.0;
  for (int a = 0; a < D; ++a) {
    double m = 0.0;
    for (double x : v.span(a)) m = std::max(m, std::abs(x));
    s += m;
  }
  return dt * s / g.h();
}

template <int D>
Field leray_project(const Field& v, const Grid<D>& g) {
  SpectralSolver<D> s(g);
  Field out = v;
  s.project(out);
  return out;
}

#define THERMVISC_INSTANTIATE(D)                                                                   \
  template void partial<D>(const Grid<D>&, const double*, int, double*);                           \
  template void gradient<D>(const Grid<D>&, const double*, Field&);                                \
  template void divergence<D>(const Grid<D>&, const Field&, double*);                              \
  template void laplacian<D>(const Grid<D>&, const double*, double*);                              \
  template void compact_laplacian<D>(const Grid<D>&, const double*, double*);                      \
  template void diffusion_div<D>(const Grid<D>&, const double*, const double*, double*);           \
  template Field diff_ops<D>(const Field&, const Grid<D>&, DiffKind);                              \
  template void transport_div<D>(const Grid<D>&, const double*, const Field&, double*,             \
                                 TransportScheme);                                                 \
  template Field transport_div<D>(const Field&, const Field&, const Grid<D>&, TransportScheme);    \
  template double cfl_number<D>(const Field&, const Grid<D>&, double);                             \
  template Field leray_project<D>(const Field&, const Grid<D>&);

THERMVISC_INSTANTIATE(2)
THERMVISC_INSTANTIATE(3)

}  // namespace thermvisc
