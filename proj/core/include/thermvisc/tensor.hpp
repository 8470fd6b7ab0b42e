#pragma once

// Dense d x d tensors (d = 2 or 3) for the deformation factor F and the
// left Cauchy-Green tensor B = F F^T, plus the elastic potential
// psi(B) = tr B - d - ln det B and its regularised variant.

#include <array>
#include <cmath>
#include <numbers>

#include "thermvisc/errors.hpp"

namespace thermvisc {

template <int D>
struct DefMatrix {
  static_assert(D == 2 || D == 3, "only d = 2 and d = 3 are supported");
  static constexpr int dim = D;

  std::array<double, D * D> m{};

  static constexpr DefMatrix identity() {
    DefMatrix r;
    for (int i = 0; i < D; ++i) r.m[i * D + i] = 1.0;
    return r;
  }
  static constexpr DefMatrix scaled_identity(double s) {
    DefMatrix r;
    for (int i = 0; i < D; ++i) r.m[i * D + i] = s;
    return r;
  }
  static constexpr DefMatrix diagonal(const std::array<double, D>& d) {
    DefMatrix r;
    for (int i = 0; i < D; ++i) r.m[i * D + i] = d[i];
    return r;
  }

  constexpr double& operator()(int i, int j) { return m[i * D + j]; }
  constexpr double operator()(int i, int j) const { return m[i * D + j]; }

  constexpr DefMatrix& operator+=(const DefMatrix& o) {
    for (int k = 0; k < D * D; ++k) m[k] += o.m[k];
    return *this;
  }
  constexpr DefMatrix& operator-=(const DefMatrix& o) {
    for (int k = 0; k < D * D; ++k) m[k] -= o.m[k];
    return *this;
  }
  constexpr DefMatrix& operator*=(double s) {
    for (auto& x : m) x *= s;
    return *this;
  }
  friend constexpr DefMatrix operator+(DefMatrix a, const DefMatrix& b) { return a += b; }
  friend constexpr DefMatrix operator-(DefMatrix a, const DefMatrix& b) { return a -= b; }
  friend constexpr DefMatrix operator*(DefMatrix a, double s) { return a *= s; }
  friend constexpr DefMatrix operator*(double s, DefMatrix a) { return a *= s; }
  friend constexpr bool operator==(const DefMatrix&, const DefMatrix&) = default;
};

// Symmetric tensor. Stored in full, but every constructor writes both
// triangles from the same value so B(i,j) == B(j,i) holds bit for bit.
template <int D>
class SpdMatrix {
 public:
  static constexpr int dim = D;

  constexpr SpdMatrix() = default;

  static constexpr SpdMatrix identity() {
    SpdMatrix r;
    for (int i = 0; i < D; ++i) r.m_[i * D + i] = 1.0;
    return r;
  }
  static constexpr SpdMatrix scaled_identity(double s) {
    SpdMatrix r;
    for (int i = 0; i < D; ++i) r.m_[i * D + i] = s;
    return r;
  }
  static constexpr SpdMatrix diagonal(const std::array<double, D>& d) {
    SpdMatrix r;
    for (int i = 0; i < D; ++i) r.m_[i * D + i] = d[i];
    return r;
  }
  // Takes the upper triangle of `a` and mirrors it.
  static constexpr SpdMatrix from_upper(const DefMatrix<D>& a) {
    SpdMatrix r;
    for (int i = 0; i < D; ++i)
      for (int j = i; j < D; ++j) {
        r.m_[i * D + j] = a(i, j);
        r.m_[j * D + i] = a(i, j);
      }
    return r;
  }

  constexpr double operator()(int i, int j) const { return m_[i * D + j]; }
  constexpr void set(int i, int j, double x) {
    m_[i * D + j] = x;
    m_[j * D + i] = x;
  }
  constexpr DefMatrix<D> as_matrix() const {
    DefMatrix<D> r;
    r.m = m_;
    return r;
  }
  constexpr const std::array<double, D * D>& entries() const { return m_; }
  friend constexpr bool operator==(const SpdMatrix&, const SpdMatrix&) = default;

 private:
  std::array<double, D * D> m_{};
};

// ---- elementary algebra ----------------------------------------------------

template <int D>
constexpr double trace(const DefMatrix<D>& a) {
  double t = 0.0;
  for (int i = 0; i < D; ++i) t += a(i, i);
  return t;
}
template <int D>
constexpr double trace(const SpdMatrix<D>& a) {
  double t = 0.0;
  for (int i = 0; i < D; ++i) t += a(i, i);
  return t;
}

template <int D>
constexpr double det(const DefMatrix<D>& a) {
  if constexpr (D == 2) {
    return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  } else {
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
           a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  }
}
template <int D>
constexpr double det(const SpdMatrix<D>& b) {
  return det(b.as_matrix());
}

template <int D>
constexpr DefMatrix<D> transpose(const DefMatrix<D>& a) {
  DefMatrix<D> r;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) r(i, j) = a(j, i);
  return r;
}

template <int D>
constexpr DefMatrix<D> operator*(const DefMatrix<D>& a, const DefMatrix<D>& b) {
  DefMatrix<D> r;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) {
      double s = 0.0;
      for (int k = 0; k < D; ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

// Frobenius inner product A : B.
template <int D>
constexpr double ddot(const DefMatrix<D>& a, const DefMatrix<D>& b) {
  double s = 0.0;
  for (int k = 0; k < D * D; ++k) s += a.m[k] * b.m[k];
  return s;
}

template <int D>
inline double frobenius(const DefMatrix<D>& a) {
  return std::sqrt(ddot(a, a));
}
template <int D>
inline double frobenius(const SpdMatrix<D>& a) {
  return frobenius(a.as_matrix());
}

template <int D>
inline bool is_finite(const DefMatrix<D>& a) {
  for (double x : a.m)
    if (!std::isfinite(x)) return false;
  return true;
}

// Cofactor inverse; no pivoting, d <= 3.
template <int D>
inline DefMatrix<D> inverse(const DefMatrix<D>& a) {
  const double dt = det(a);
  if (dt == 0.0 || !std::isfinite(dt)) throw DomainError("inverse: singular matrix");
  DefMatrix<D> r;
  if constexpr (D == 2) {
    r(0, 0) = a(1, 1) / dt;
    r(0, 1) = -a(0, 1) / dt;
    r(1, 0) = -a(1, 0) / dt;
    r(1, 1) = a(0, 0) / dt;
  } else {
    r(0, 0) = (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) / dt;
    r(0, 1) = (a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2)) / dt;
    r(0, 2) = (a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1)) / dt;
    r(1, 0) = (a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2)) / dt;
    r(1, 1) = (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) / dt;
    r(1, 2) = (a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2)) / dt;
    r(2, 0) = (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)) / dt;
    r(2, 1) = (a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1)) / dt;
    r(2, 2) = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) / dt;
  }
  return r;
}

// ---- operations on F and B -------------------------------------------------

// B = F F^T. Only the upper triangle is computed, then mirrored.
template <int D>
inline SpdMatrix<D> sym_from_f(const DefMatrix<D>& f) {
  if (!is_finite(f)) throw InvalidInput("sym_from_f: non-finite entry in F");
  SpdMatrix<D> b;
  for (int i = 0; i < D; ++i)
    for (int j = i; j < D; ++j) {
      double s = 0.0;
      for (int k = 0; k < D; ++k) s += f(i, k) * f(j, k);
      b.set(i, j, s);
    }
  return b;
}

// Eigenvalues in ascending order from the characteristic polynomial.
template <int D>
inline std::array<double, D> eigenvalues(const SpdMatrix<D>& b) {
  if constexpr (D == 2) {
    const double mean = 0.5 * (b(0, 0) + b(1, 1));
    const double half_diff = 0.5 * (b(0, 0) - b(1, 1));
    const double r = std::hypot(half_diff, b(0, 1));
    return {mean - r, mean + r};
  } else {
    const double p1 = b(0, 1) * b(0, 1) + b(0, 2) * b(0, 2) + b(1, 2) * b(1, 2);
    if (p1 == 0.0) {
      std::array<double, 3> e{b(0, 0), b(1, 1), b(2, 2)};
      if (e[0] > e[1]) std::swap(e[0], e[1]);
      if (e[1] > e[2]) std::swap(e[1], e[2]);
      if (e[0] > e[1]) std::swap(e[0], e[1]);
      return e;
    }
    const double q = trace(b) / 3.0;
    const double d0 = b(0, 0) - q, d1 = b(1, 1) - q, d2 = b(2, 2) - q;
    const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    DefMatrix<3> c = b.as_matrix();
    for (int i = 0; i < 3; ++i) c(i, i) -= q;
    c *= 1.0 / p;
    double r = 0.5 * det(c);
    r = r < -1.0 ? -1.0 : (r > 1.0 ? 1.0 : r);
    const double phi = std::acos(r) / 3.0;
    const double hi = q + 2.0 * p * std::cos(phi);
    const double lo = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    return {lo, 3.0 * q - hi - lo, hi};
  }
}

template <int D>
inline double min_eigenvalue(const SpdMatrix<D>& b) {
  return eigenvalues(b)[0];
}

template <int D>
inline bool is_positive_definite(const SpdMatrix<D>& b, double tol = 1e-12) {
  return min_eigenvalue(b) > tol;
}

// psi(B) = tr B - d - ln det B, minimum 0 at B = I.
template <int D>
inline double psi_tilde(const SpdMatrix<D>& b) {
  const double d = det(b);
  if (!(d > 0.0)) throw DomainError("psi_tilde: det B <= 0 (loss of positivity)");
  return trace(b) - D - std::log(d);
}

// d psi / dB = I - B^{-1}.
template <int D>
inline SpdMatrix<D> dpsi_tilde(const SpdMatrix<D>& b) {
  const DefMatrix<D> inv = inverse(b.as_matrix());
  DefMatrix<D> r = DefMatrix<D>::identity() - inv;
  return SpdMatrix<D>::from_upper(r);
}

// tr B - d - ln((det B - eps2)_+ + eps2): equals psi_tilde for det B >= eps2
// and stays finite down to det B = 0.
inline double psi_tilde_reg_from(double tr, double det_b, int d, double eps2) {
  const double excess = det_b - eps2;
  return tr - d - std::log((excess > 0.0 ? excess : 0.0) + eps2);
}

template <int D>
inline double psi_tilde_reg(const SpdMatrix<D>& b, double eps2) {
  return psi_tilde_reg_from(trace(b), det(b), D, eps2);
}

}  // namespace thermvisc
