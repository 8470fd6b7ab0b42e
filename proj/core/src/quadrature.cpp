#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "thermvisc/errors.hpp"
#include "thermvisc/materials.hpp"

namespace thermvisc {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

constexpr double kThetaFloor = 1e-30;  // below this the integrand in s is < 1e-40

// Integrand of h_lambda in s = ln z: -z^(1+lambda) g''(z).
double integrand(const MaterialTable& m, double lambda, double s) {
  const double z = std::exp(s);
  return -std::pow(z, 1.0 + lambda) * m.g_second(z);
}

double tail_bound(const MaterialTable& m, double lambda, double C, double Theta) {
  return std::pow(Theta, lambda) * m.g_prime(Theta) +
         lambda * C * std::pow(Theta, lambda - m.delta - 1.0) / (1.0 + m.delta - lambda);
}

// The GK request tolerance stays above the roundoff floor of the error
// estimate (about 1e-13 relative); below it the recursion runs to max_depth.
double integrate_s(const MaterialTable& m, double lambda, double s0, double s1) {
  double err = 0.0;
  double l1 = 0.0;
  const double v = GK::integrate([&](double s) { return integrand(m, lambda, s); }, s0, s1, 15, 1e-12, &err, &l1);
  if (!std::isfinite(v) || err > 1e-11 * std::max(1.0, l1))
    throw NumericalError("h_lambda: adaptive quadrature did not reach tolerance");
  return v;
}

}  // namespace

double h_lambda_cutoff(double lambda, const MaterialTable& m, double tol) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidInput("h_lambda: lambda must lie in (0,1)");
  if (!(1.0 + m.delta > lambda)) throw NumericalError("h_lambda: tail bound needs 1 + delta > lambda");
  const double C = growth_constant(m);
  double Theta = 10.0;
  while (tail_bound(m, lambda, C, Theta) > tol) {
    Theta *= 10.0;
    if (Theta > 1e300) throw NumericalError("h_lambda: tail bound never drops below tolerance");
  }
  return Theta;
}

double h_lambda(double theta, double lambda, const MaterialTable& m) {
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw DomainError("h_lambda: theta must be finite and >= 0");
  double Theta = h_lambda_cutoff(lambda, m);
  const double lo = std::max(theta, kThetaFloor);
  if (Theta <= 10.0 * lo) Theta = 10.0 * lo;
  // Split at decades so every adaptive call sees a smooth, modest interval.
  double s0 = std::log(lo);
  const double s_end = std::log(Theta);
  double sum = 0.0;
  while (s0 < s_end) {
    const double s1 = std::min(s_end, s0 + 4.0 * std::log(10.0));
    sum += integrate_s(m, lambda, s0, s1);
    s0 = s1;
  }
  return sum;
}

HLambdaTable::HLambdaTable(const MaterialTable& m, double lambda, double theta_lo, double theta_hi, int per_decade)
    : m_(m), lambda_(lambda) {
  if (!(theta_lo > 0.0) || !(theta_hi > theta_lo) || per_decade < 4)
    throw InvalidInput("HLambdaTable: bad range");
  log_lo_ = std::log(theta_lo);
  log_hi_ = std::log(theta_hi);
  const int n = static_cast<int>(std::ceil((log_hi_ - log_lo_) / std::log(10.0) * per_decade)) + 1;
  ds_ = (log_hi_ - log_lo_) / (n - 1);
  val_.assign(static_cast<std::size_t>(n), 0.0);
  der_.assign(static_cast<std::size_t>(n), 0.0);
  val_.back() = h_lambda(theta_hi, lambda, m_);
  for (int i = n - 2; i >= 0; --i) {
    const double s0 = log_lo_ + i * ds_;
    val_[static_cast<std::size_t>(i)] = val_[static_cast<std::size_t>(i) + 1] + integrate_s(m_, lambda, s0, s0 + ds_);
  }
  for (int i = 0; i < n; ++i) {
    const double z = std::exp(log_lo_ + i * ds_);
    der_[static_cast<std::size_t>(i)] = std::pow(z, 1.0 + lambda) * m_.g_second(z);  // dh/ds
  }
}

double HLambdaTable::operator()(double theta) const {
  if (!(theta > 0.0)) return h_lambda(theta > 0.0 ? theta : 0.0, lambda_, m_);
  const double s = std::log(theta);
  if (s < log_lo_ || s > log_hi_) return h_lambda(theta, lambda_, m_);
  double x = (s - log_lo_) / ds_;
  auto i = static_cast<std::size_t>(x);
  if (i >= val_.size() - 1) i = val_.size() - 2;
  const double t = x - static_cast<double>(i);
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * val_[i] + h10 * ds_ * der_[i] + h01 * val_[i + 1] + h11 * ds_ * der_[i + 1];
}

}  // namespace thermvisc
