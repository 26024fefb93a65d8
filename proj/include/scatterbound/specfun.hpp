#pragma once

#include <complex>

namespace scatterbound::specfun {

enum class BesselKind { J, Y };

/// Integer order restricted to {0, 1}.
class CylOrder {
 public:
  constexpr CylOrder() = default;
  explicit CylOrder(int order);
  constexpr int value() const noexcept { return order_; }

 private:
  int order_ = 0;
};

/// Cylinder Bessel function of the first (J) or second (Y) kind.
/// Absolute accuracy is about 1e-13 on (0, 1e3]. Y requires x > 0, J requires x >= 0.
double cyl_bessel(BesselKind kind, CylOrder order, double x);

double bessel_j0(double x);
double bessel_j1(double x);
double bessel_y0(double x);
double bessel_y1(double x);

/// H^(1)_n(x) = J_n(x) + i Y_n(x), x > 0.
std::complex<double> hankel1(CylOrder order, double x);

// Switch point between the ascending series and the Hankel asymptotic
// expansion. Exposed so tests can probe both branches around it.
inline constexpr double kSeriesAsymptoticSwitch = 17.0;

namespace detail {
// Raw branch evaluators; valid where each branch is accurate (tests use them
// to check that both agree in an overlap band).
void series(double x, double& j0, double& j1, double& y0, double& y1);
void asymptotic(double x, double& j0, double& j1, double& y0, double& y1);
}  // namespace detail

}  // namespace scatterbound::specfun
