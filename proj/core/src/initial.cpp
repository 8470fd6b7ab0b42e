#include "thermvisc/initial.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "thermvisc/errors.hpp"

namespace thermvisc {

namespace {

template <int D>
bool in_patch(const std::array<double, D>& x, double L) {
  for (int a = 0; a < D; ++a)
    if (std::abs(x[a] - 0.5 * L) > L / 8.0 + 1e-12 * L) return false;
  return true;
}

}  // namespace

template <int D>
InitialFields<D> build_initial_fields(const SimConfig& cfg, const Grid<D>& g) {
  const InitialSpec& in = cfg.initial;
  const std::size_t np = g.npts();
  const double L = g.L();
  const double k = 2.0 * std::numbers::pi / L;
  InitialFields<D> out{Field(D, np), Field(D * D, np), Field(1, np)};
  std::mt19937_64 rng(cfg.seed);
  auto uniform = [&rng](double lo, double hi) { return lo + (hi - lo) * unit_double(rng()); };

  for (std::size_t p = 0; p < np; ++p) {
    const auto x = g.position(p);
    if (in.velocity == "taylor_green") {
      const double A = in.velocity_amplitude;
      if constexpr (D == 2) {
        out.v.at(0, p) = A * std::sin(k * x[0]) * std::cos(k * x[1]);
        out.v.at(1, p) = -A * std::cos(k * x[0]) * std::sin(k * x[1]);
      } else {
        out.v.at(0, p) = A * std::sin(k * x[0]) * std::cos(k * x[1]) * std::cos(k * x[2]);
        out.v.at(1, p) = -A * std::cos(k * x[0]) * std::sin(k * x[1]) * std::cos(k * x[2]);
      }
    } else if (in.velocity == "random") {
      for (int a = 0; a < D; ++a) out.v.at(a, p) = in.velocity_amplitude * uniform(-1.0, 1.0);
    } else if (in.velocity != "zero") {
      throw InvalidInput("unknown initial velocity profile '" + in.velocity + "'");
    }

    double th = in.theta_base;
    if (in.theta == "bump") {
      double r2 = 0.0;
      for (int a = 0; a < D; ++a) r2 += (x[a] - 0.5 * L) * (x[a] - 0.5 * L);
      const double sigma = L / 10.0;
      th += in.theta_amplitude * std::exp(-r2 / (2.0 * sigma * sigma));
    } else if (in.theta == "cold_spot") {
      const double patch = in.theta_patch > 0.0 ? in.theta_patch : 1.2 * cfg.eps.energy_floor();
      if (in_patch<D>(x, L)) th = patch;
    } else if (in.theta != "uniform") {
      throw InvalidInput("unknown initial theta profile '" + in.theta + "'");
    }
    out.theta.at(0, p) = th;

    DefMatrix<D> f = DefMatrix<D>::identity();
    if (in.deformation == "uniform") {
      f = DefMatrix<D>::scaled_identity(in.deformation_scale);
    } else if (in.deformation == "det_patch") {
      if (in_patch<D>(x, L)) f(0, 0) = in.deformation_patch_det > 0.0 ? in.deformation_patch_det : 1.1 * cfg.eps.eps5;
    } else if (in.deformation == "stretch_patch") {
      if (in_patch<D>(x, L)) f = DefMatrix<D>::scaled_identity(in.deformation_scale);
    } else if (in.deformation == "random") {
      for (auto& e : f.m) e += in.deformation_scale * uniform(-1.0, 1.0);
    } else if (in.deformation != "identity") {
      throw InvalidInput("unknown initial deformation profile '" + in.deformation + "'");
    }
    set_matrix(out.F, p, f);
  }
  return out;
}

template InitialFields<2> build_initial_fields<2>(const SimConfig&, const Grid<2>&);
template InitialFields<3> build_initial_fields<3>(const SimConfig&, const Grid<3>&);

}  // namespace thermvisc
