#include "scatterbound/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "scatterbound/errors.hpp"

namespace scatterbound::specfun {

CylOrder::CylOrder(int order) : order_(order) {
  if (order != 0 && order != 1) {
    throw PreconditionError("cylinder function order must be 0 or 1");
  }
}

namespace detail {

// Ascending series, accumulated in extended precision: at x = 17 the largest
// term of the J0 series is ~5e5, so long double keeps the result near 1e-13.
void series(double xd, double& j0, double& j1, double& y0, double& y1) {
  using R = long double;
  const R x = xd;
  const R pi = std::numbers::pi_v<long double>;
  const R euler = std::numbers::egamma_v<long double>;
  const R z = x * x / 4;

  // term_k = (-z)^k / (k!)^2 and (-z)^k / (k! (k+1)!)
  R t0 = 1, t1 = 1;
  R s_j0 = 0, s_j1 = 0;
  R s_y0 = 0;  // sum_{k>=1} (-1)^{k+1} H_k z^k / (k!)^2
  R s_y1 = 0;  // sum_{k>=0} (-1)^k (psi(k+1) + psi(k+2)) z^k / (k!(k+1)!)
  R harmonic = 0;  // H_k
  const R tiny = 1e-24L;
  for (int k = 0; k < 300; ++k) {
    if (k > 0) {
      t0 *= -z / (R(k) * R(k));
      t1 *= -z / (R(k) * R(k + 1));
      harmonic += R(1) / R(k);
    }
    s_j0 += t0;
    s_j1 += t1;
    s_y0 -= harmonic * t0;  // (-1)^{k+1} H_k z^k/(k!)^2 = -H_k * t0
    const R psi1 = -euler + harmonic;
    const R psi2 = psi1 + R(1) / R(k + 1);
    s_y1 += (psi1 + psi2) * t1;
    if (k > 2 && std::fabs(t0) * (1 + harmonic) < tiny &&
        std::fabs(t1) * (2 + 2 * harmonic) < tiny) {
      break;
    }
  }
  const R jj0 = s_j0;
  const R jj1 = (x / 2) * s_j1;
  j0 = static_cast<double>(jj0);
  j1 = static_cast<double>(jj1);
  if (x > 0) {
    const R log_term = std::log(x / 2) + euler;
    y0 = static_cast<double>((2 / pi) * (log_term * jj0 + s_y0));
    y1 = static_cast<double>((2 / pi) * std::log(x / 2) * jj1 - 2 / (pi * x) -
                             (x / (2 * pi)) * s_y1);
  } else {
    y0 = -std::numeric_limits<double>::infinity();
    y1 = -std::numeric_limits<double>::infinity();
  }
}

namespace {

// Hankel asymptotic expansion P_nu(x), Q_nu(x), summed up to the smallest term.
void hankel_pq(int nu, double x, double& p, double& q) {
  const double mu = 4.0 * nu * nu;
  p = 1.0;
  q = 0.0;
  double term = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * x);
    const double mag = std::fabs(term);
    if (mag >= prev || mag < 1e-18) break;
    prev = mag;
    // sign pattern: k=1 -> +Q, k=2 -> -P, k=3 -> -Q, k=4 -> +P, ...
    switch (k % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      case 0: p += term; break;
    }
  }
}

}  // namespace

void asymptotic(double x, double& j0, double& j1, double& y0, double& y1) {
  const double amp = std::sqrt(2.0 / (std::numbers::pi * x));
  const double c = std::cos(x);
  const double s = std::sin(x);
  const double r2 = std::numbers::sqrt2 / 2.0;
  // chi0 = x - pi/4, chi1 = x - 3pi/4
  const double cos0 = (c + s) * r2, sin0 = (s - c) * r2;
  const double cos1 = (s - c) * r2, sin1 = -(s + c) * r2;
  double p, q;
  hankel_pq(0, x, p, q);
  j0 = amp * (p * cos0 - q * sin0);
  y0 = amp * (p * sin0 + q * cos0);
  hankel_pq(1, x, p, q);
  j1 = amp * (p * cos1 - q * sin1);
  y1 = amp * (p * sin1 + q * cos1);
}

}  // namespace detail

namespace {

struct Values {
  double j0, j1, y0, y1;
};

Values evaluate(double x) {
  Values v{};
  if (x <= kSeriesAsymptoticSwitch) {
    detail::series(x, v.j0, v.j1, v.y0, v.y1);
  } else {
    detail::asymptotic(x, v.j0, v.j1, v.y0, v.y1);
  }
  return v;
}

void require_finite(double x) {
  if (!std::isfinite(x)) throw PreconditionError("Bessel argument must be finite");
}

}  // namespace

double bessel_j0(double x) {
  require_finite(x);
  return evaluate(std::fabs(x)).j0;
}

double bessel_j1(double x) {
  require_finite(x);
  const double v = evaluate(std::fabs(x)).j1;
  return x < 0 ? -v : v;
}

double bessel_y0(double x) {
  require_finite(x);
  if (x <= 0) throw PreconditionError("Y0: domain error, argument must be positive");
  return evaluate(x).y0;
}

double bessel_y1(double x) {
  require_finite(x);
  if (x <= 0) throw PreconditionError("Y1: domain error, argument must be positive");
  return evaluate(x).y1;
}

double cyl_bessel(BesselKind kind, CylOrder order, double x) {
  if (kind == BesselKind::J) {
    if (x < 0) throw PreconditionError("J: domain error, argument must be nonnegative");
    return order.value() == 0 ? bessel_j0(x) : bessel_j1(x);
  }
  return order.value() == 0 ? bessel_y0(x) : bessel_y1(x);
}

std::complex<double> hankel1(CylOrder order, double x) {
  require_finite(x);
  if (x <= 0) throw PreconditionError("hankel1: domain error, argument must be positive");
  const Values v = evaluate(x);
  return order.value() == 0 ? std::complex<double>(v.j0, v.y0)
                            : std::complex<double>(v.j1, v.y1);
}

}  // namespace scatterbound::specfun
