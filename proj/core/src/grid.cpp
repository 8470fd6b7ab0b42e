#include "thermvisc/grid.hpp"

#include <algorithm>
#include <cmath>

#include "thermvisc/errors.hpp"

namespace thermvisc {

template <int D>
Grid<D>::Grid(int n, double L) : n_(n), L_(L) {
  if (n < 8 || n % 2 != 0) throw InvalidInput("Grid: n must be even and >= 8");
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidInput("Grid: L must be positive");
  h_ = L / n;
  vol_ = std::pow(h_, D);
  npts_ = 1;
  for (int a = 0; a < D; ++a) npts_ *= static_cast<std::size_t>(n);
  up_.resize(npts_ * D);
  dn_.resize(npts_ * D);
  for (std::size_t p = 0; p < npts_; ++p) {
    const auto c = coords(p);
    for (int a = 0; a < D; ++a) {
      auto cu = c, cd = c;
      cu[a] = (c[a] + 1) % n;
      cd[a] = (c[a] + n - 1) % n;
      up_[p * D + a] = static_cast<std::uint32_t>(index(cu));
      dn_[p * D + a] = static_cast<std::uint32_t>(index(cd));
    }
  }
}

template <int D>
std::size_t Grid<D>::index(const std::array<int, D>& c) const {
  std::size_t p = 0;
  for (int a = 0; a < D; ++a) p = p * static_cast<std::size_t>(n_) + static_cast<std::size_t>(c[a]);
  return p;
}

template <int D>
std::array<int, D> Grid<D>::coords(std::size_t p) const {
  std::array<int, D> c{};
  for (int a = D - 1; a >= 0; --a) {
    c[a] = static_cast<int>(p % static_cast<std::size_t>(n_));
    p /= static_cast<std::size_t>(n_);
  }
  return c;
}

template <int D>
std::array<double, D> Grid<D>::position(std::size_t p) const {
  const auto c = coords(p);
  std::array<double, D> x{};
  for (int a = 0; a < D; ++a) x[a] = c[a] * h_;
  return x;
}

void Field::axpy(double a, const Field& x) {
  if (!same_shape(x)) throw InvalidInput("Field::axpy: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += a * x.data_[k];
}

double Field::linf() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

template class Grid<2>;
template class Grid<3>;

}  // namespace thermvisc
