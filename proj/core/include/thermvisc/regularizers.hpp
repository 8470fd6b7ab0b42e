#pragma once

// Cutoffs, truncations, the determinant guard, mollification, and the
// preparation of regularised initial data.

#include "thermvisc/grid.hpp"
#include "thermvisc/materials.hpp"
#include "thermvisc/operators.hpp"

namespace thermvisc {

// 1 for |s| <= 1/eps3, 0 for |s| >= 2/eps3, quintic smoothstep in between.
// |d/ds| peaks at (15/8) eps3.
double cutoff_lambda(double s, double eps3);
double cutoff_lambda_derivative(double s, double eps3);

// F if |F| <= 2/eps3, otherwise I.
template <int D>
DefMatrix<D> truncate_F(const DefMatrix<D>& f, double eps3) {
  return frobenius(f) <= 2.0 / eps3 ? f : DefMatrix<D>::identity();
}

// F if det F >= eps5, otherwise I.
template <int D>
DefMatrix<D> det_guard(const DefMatrix<D>& f, double eps5) {
  return det(f) >= eps5 ? f : DefMatrix<D>::identity();
}

// Periodic convolution of every component with the normalised bump
// exp(-1/(1 - r^2/eps7^2)). Throws InvalidInput if eps7 < h.
template <int D>
Field mollify_field(const Field& f, double eps7, const Grid<D>& g);

template <int D>
struct PreparedState {
  State<D> state;
  double detF_min_before = 0.0;  // after truncation and guard
  double detF_min_after = 0.0;   // after mollification
  std::size_t truncated_points = 0;
  std::size_t guarded_points = 0;
  std::size_t floored_points = 0;  // energy reset to 1
};

// v0 is Leray-projected; F0 -> mollify(det_guard(truncate_F(F0))); e0 = e*(theta0, F)
// with values below min(eps1, eps6) replaced by 1; theta = theta*(e, F).
// With `with_B` the twin conformation tensor starts at F F^T.
template <int D>
PreparedState<D> prepare_initial_data(const Field& v0, const Field& F0, const Field& theta0, const EpsilonSet& eps,
                                      const MaterialTable& m, const Grid<D>& g, bool with_B = false);

}  // namespace thermvisc
