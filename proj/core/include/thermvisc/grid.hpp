#pragma once

// Periodic uniform grid, structure-of-arrays fields, and the simulation state.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "thermvisc/tensor.hpp"

namespace thermvisc {

template <int D>
class Grid {
 public:
  static constexpr int dim = D;

  // n >= 8 and even, L > 0; throws InvalidInput otherwise.
  Grid(int n, double L);

  int n() const { return n_; }
  double L() const { return L_; }
  double h() const { return h_; }
  std::size_t npts() const { return npts_; }
  double cell_volume() const { return vol_; }

  // Row-major, last axis fastest.
  std::size_t index(const std::array<int, D>& c) const;
  std::array<int, D> coords(std::size_t p) const;
  // Node position along each axis, x = i h.
  std::array<double, D> position(std::size_t p) const;

  std::size_t up(std::size_t p, int axis) const { return up_[p * D + static_cast<std::size_t>(axis)]; }
  std::size_t dn(std::size_t p, int axis) const { return dn_[p * D + static_cast<std::size_t>(axis)]; }

  bool operator==(const Grid& o) const { return n_ == o.n_ && L_ == o.L_; }

 private:
  int n_;
  double L_, h_, vol_;
  std::size_t npts_;
  std::vector<std::uint32_t> up_, dn_;
};

// ncomp components of npts values each, stored component-major.
class Field {
 public:
  Field() = default;
  Field(int ncomp, std::size_t npts, double fill = 0.0)
      : ncomp_(ncomp), npts_(npts), data_(static_cast<std::size_t>(ncomp) * npts, fill) {}

  int ncomp() const { return ncomp_; }
  std::size_t npts() const { return npts_; }
  bool empty() const { return data_.empty(); }

  double* comp(int c) { return data_.data() + static_cast<std::size_t>(c) * npts_; }
  const double* comp(int c) const { return data_.data() + static_cast<std::size_t>(c) * npts_; }
  std::span<double> span(int c) { return {comp(c), npts_}; }
  std::span<const double> span(int c) const { return {comp(c), npts_}; }
  double& at(int c, std::size_t p) { return data_[static_cast<std::size_t>(c) * npts_ + p]; }
  double at(int c, std::size_t p) const { return data_[static_cast<std::size_t>(c) * npts_ + p]; }

  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  void fill(double x) { std::fill(data_.begin(), data_.end(), x); }
  bool same_shape(const Field& o) const { return ncomp_ == o.ncomp_ && npts_ == o.npts_; }
  // this += a * x
  void axpy(double a, const Field& x);
  double linf() const;

 private:
  int ncomp_ = 0;
  std::size_t npts_ = 0;
  std::vector<double> data_;
};

// Tensor-valued fields use component index i*D + j.
template <int D>
DefMatrix<D> matrix_at(const Field& f, std::size_t p) {
  DefMatrix<D> m;
  for (int k = 0; k < D * D; ++k) m.m[static_cast<std::size_t>(k)] = f.at(k, p);
  return m;
}
template <int D>
void set_matrix(Field& f, std::size_t p, const DefMatrix<D>& m) {
  for (int k = 0; k < D * D; ++k) f.at(k, p) = m.m[static_cast<std::size_t>(k)];
}

template <int D>
struct State {
  Field v;      // D components
  Field F;      // D*D components
  Field e;      // 1 component
  Field theta;  // 1 component, derived from (e, F)
  Field B;      // D*D components when the twin conformation tensor is carried
  double t = 0.0;

  static State zeros(const Grid<D>& g, bool with_B = false) {
    State s;
    s.v = Field(D, g.npts());
    s.F = Field(D * D, g.npts());
    s.e = Field(1, g.npts());
    s.theta = Field(1, g.npts());
    if (with_B) s.B = Field(D * D, g.npts());
    return s;
  }
  bool has_B() const { return !B.empty(); }
};

}  // namespace thermvisc
