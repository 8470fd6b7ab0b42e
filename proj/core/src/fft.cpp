#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

#include "thermvisc/errors.hpp"
#include "thermvisc/operators.hpp"

namespace thermvisc {

namespace {
// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

template <int D>
struct SpectralSolver<D>::Impl {
  int n;
  std::size_t npts, nspec;
  double h;
  double* real = nullptr;
  std::vector<fftw_complex*> spec;  // one spectrum per velocity component
  fftw_plan fwd = nullptr, bwd = nullptr;
  // Per-axis symbols indexed by wavenumber slot.
  std::vector<double> sym;       // sin(2 pi k/n)/h, exactly 0 at k = 0, n/2
  std::vector<double> wide_eig;  // -sym^2
  std::vector<double> comp_eig;  // -(4/h^2) sin^2(pi k/n)

  explicit Impl(const Grid<D>& g) : n(g.n()), npts(g.npts()), h(g.h()) {
    nspec = npts / static_cast<std::size_t>(n) * static_cast<std::size_t>(n / 2 + 1);
    real = fftw_alloc_real(npts);
    for (int a = 0; a < D; ++a) spec.push_back(fftw_alloc_complex(nspec));
    int dims[D];
    for (int a = 0; a < D; ++a) dims[a] = n;
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fwd = fftw_plan_dft_r2c(D, dims, real, spec[0], FFTW_ESTIMATE);
      bwd = fftw_plan_dft_c2r(D, dims, spec[0], real, FFTW_ESTIMATE);
    }
    sym.resize(static_cast<std::size_t>(n));
    wide_eig.resize(static_cast<std::size_t>(n));
    comp_eig.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const double s = (k == 0 || 2 * k == n) ? 0.0 : std::sin(2.0 * std::numbers::pi * k / n) / h;
      const double c = std::sin(std::numbers::pi * k / n);
      sym[static_cast<std::size_t>(k)] = s;
      wide_eig[static_cast<std::size_t>(k)] = -s * s;
      comp_eig[static_cast<std::size_t>(k)] = -4.0 / (h * h) * c * c;
    }
  }
  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    fftw_free(real);
    for (auto* s : spec) fftw_free(s);
  }

  // Wavenumber slot per axis for spectral index q (last axis is halved).
  std::array<int, D> slots(std::size_t q) const {
    std::array<int, D> k{};
    const std::size_t nh = static_cast<std::size_t>(n / 2 + 1);
    k[D - 1] = static_cast<int>(q % nh);
    q /= nh;
    for (int a = D - 2; a >= 0; --a) {
      k[a] = static_cast<int>(q % static_cast<std::size_t>(n));
      q /= static_cast<std::size_t>(n);
    }
    return k;
  }

  void forward(const double* in, fftw_complex* out) {
    std::copy(in, in + npts, real);
    fftw_execute_dft_r2c(fwd, real, out);
  }
  void backward(fftw_complex* in, double* out) {
    fftw_execute_dft_c2r(bwd, in, real);
    const double scale = 1.0 / static_cast<double>(npts);
    for (std::size_t p = 0; p < npts; ++p) out[p] = real[p] * scale;
  }
};

template <int D>
SpectralSolver<D>::SpectralSolver(const Grid<D>& g) : impl_(std::make_unique<Impl>(g)) {}

template <int D>
SpectralSolver<D>::~SpectralSolver() = default;

template <int D>
void SpectralSolver<D>::project(Field& v) {
  Impl& m = *impl_;
  if (v.ncomp() != D || v.npts() != m.npts) throw InvalidInput("project: velocity shape mismatch");
  for (int a = 0; a < D; ++a) m.forward(v.comp(a), m.spec[static_cast<std::size_t>(a)]);
  for (std::size_t q = 0; q < m.nspec; ++q) {
    const auto k = m.slots(q);
    double s[D];
    double s2 = 0.0;
    for (int a = 0; a < D; ++a) {
      s[a] = m.sym[static_cast<std::size_t>(k[a])];
      s2 += s[a] * s[a];
    }
    if (s2 == 0.0) continue;
    double re = 0.0, im = 0.0;
    for (int a = 0; a < D; ++a) {
      re += s[a] * m.spec[static_cast<std::size_t>(a)][q][0];
      im += s[a] * m.spec[static_cast<std::size_t>(a)][q][1];
    }
    re /= s2;
    im /= s2;
    for (int a = 0; a < D; ++a) {
      m.spec[static_cast<std::size_t>(a)][q][0] -= s[a] * re;
      m.spec[static_cast<std::size_t>(a)][q][1] -= s[a] * im;
    }
  }
  for (int a = 0; a < D; ++a) m.backward(m.spec[static_cast<std::size_t>(a)], v.comp(a));
  for (double x : v.raw())
    if (!std::isfinite(x)) throw NumericalError("project: non-finite velocity");
}

template <int D>
void SpectralSolver<D>::helmholtz(double* u, double c, LaplacianKind kind) {
  Impl& m = *impl_;
  if (c == 0.0) return;
  if (!(c > 0.0)) throw InvalidInput("helmholtz: coefficient must be nonnegative");
  const auto& eig = kind == LaplacianKind::wide ? m.wide_eig : m.comp_eig;
  m.forward(u, m.spec[0]);
  for (std::size_t q = 0; q < m.nspec; ++q) {
    const auto k = m.slots(q);
    double lam = 0.0;
    for (int a = 0; a < D; ++a) lam += eig[static_cast<std::size_t>(k[a])];
    const double f = 1.0 / (1.0 - c * lam);
    m.spec[0][q][0] *= f;
    m.spec[0][q][1] *= f;
  }
  m.backward(m.spec[0], u);
}

template class SpectralSolver<2>;
template class SpectralSolver<3>;

}  // namespace thermvisc
