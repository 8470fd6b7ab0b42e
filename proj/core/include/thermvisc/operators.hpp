#pragma once

// Centred periodic finite differences, conservative transport, and the
// FFT-diagonalised Leray projection / implicit diffusion solves.

#include <memory>

#include "thermvisc/grid.hpp"

namespace thermvisc {

enum class DiffKind { grad, div, laplacian };
enum class TransportScheme { upwind, centered };
enum class LaplacianKind { wide, compact };

// Centred 2h-stencil derivative along `axis`.
template <int D>
void partial(const Grid<D>& g, const double* q, int axis, double* out);
// out has D components.
template <int D>
void gradient(const Grid<D>& g, const double* q, Field& out);
// v has D components.
template <int D>
void divergence(const Grid<D>& g, const Field& v, double* out);
// div(grad q) with the same centred stencils (wide 2h Laplacian).
template <int D>
void laplacian(const Grid<D>& g, const double* q, double* out);
// Nearest-neighbour 3-point Laplacian.
template <int D>
void compact_laplacian(const Grid<D>& g, const double* q, double* out);
// Conservative div(kappa grad theta) with face kappa = arithmetic mean.
template <int D>
void diffusion_div(const Grid<D>& g, const double* kappa, const double* theta, double* out);

// Componentwise application: grad maps c components to c*D (index c*D + axis),
// div maps c*D components to c (contracting the last index), laplacian keeps c.
template <int D>
Field diff_ops(const Field& f, const Grid<D>& g, DiffKind kind);

// Conservative div(q v) using face velocity (v_i + v_up)/2. Upwind fluxes by
// default. Face divergences equal the centred divergence, so a projected v
// gives exact telescoping and a discrete minimum principle under CFL.
template <int D>
void transport_div(const Grid<D>& g, const double* q, const Field& v, double* out,
                   TransportScheme scheme = TransportScheme::upwind);
template <int D>
Field transport_div(const Field& q, const Field& v, const Grid<D>& g,
                    TransportScheme scheme = TransportScheme::upwind);

// dt * sum_a max|v_a| / h; the upwind update is a convex combination when <= 1.
template <int D>
double cfl_number(const Field& v, const Grid<D>& g, double dt);

// Owns FFT plans for one grid. Not thread-safe; create one per thread.
template <int D>
class SpectralSolver {
 public:
  explicit SpectralSolver(const Grid<D>& g);
  ~SpectralSolver();
  SpectralSolver(const SpectralSolver&) = delete;
  SpectralSolver& operator=(const SpectralSolver&) = delete;

  // v <- v - grad phi with div grad phi = div v, in place. Throws
  // NumericalError on non-finite data.
  void project(Field& v);
  // Solves (I - c Lap) u = u in place for the chosen discrete Laplacian, c >= 0.
  void helmholtz(double* u, double c, LaplacianKind kind);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

template <int D>
Field leray_project(const Field& v, const Grid<D>& g);

}  // namespace thermvisc
