#include "scatterbound/inversion_fm.hpp"

#include <algorithm>
#include <cmath>

#include "scatterbound/errors.hpp"
#include "scatterbound/operators.hpp"
#include "scatterbound/spectral.hpp"

namespace scatterbound {

SamplingGrid::SamplingGrid(Box box, int resolution) : box_(box), resolution_(resolution) {
  if (resolution < 2) throw PreconditionError("sampling grid resolution must be at least 2");
  if (!(box.xmax > box.xmin) || !(box.ymax > box.ymin) || !std::isfinite(box.xmin) ||
      !std::isfinite(box.xmax) || !std::isfinite(box.ymin) || !std::isfinite(box.ymax)) {
    throw PreconditionError("sampling grid needs a finite nondegenerate box");
  }
  points_.reserve(static_cast<std::size_t>(resolution) * resolution);
  const double dx = (box.xmax - box.xmin) / (resolution - 1);
  const double dy = (box.ymax - box.ymin) / (resolution - 1);
  for (int j = 0; j < resolution; ++j) {
    for (int i = 0; i < resolution; ++i) points_.push_back({box.xmin + i * dx, box.ymin + j * dy});
  }
}

std::vector<double> normalize_to_max(std::vector<double> values) {
  double mx = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) throw NumericalError("indicator values must be finite and nonnegative");
    mx = std::max(mx, v);
  }
  if (!(mx > 0.0)) throw NumericalError("indicator map is identically zero");
  for (double& v : values) v = v == mx ? 1.0 : v / mx;
  return values;
}

namespace {

Eigen::MatrixXcd test_functions(const FarFieldMatrix& f, const SamplingGrid& grid) {
  const int n = f.size();
  const double k = f.ctx.k();
  Eigen::MatrixXcd phi(n, static_cast<Eigen::Index>(grid.size()));
  for (std::size_t c = 0; c < grid.size(); ++c) {
    for (int i = 0; i < n; ++i) {
      const double phase = -k * dot(f.dirs.direction(i), grid.points()[c]);
      phi(i, static_cast<Eigen::Index>(c)) = {std::cos(phase), std::sin(phase)};
    }
  }
  return phi;
}

std::vector<double> reciprocals(const std::vector<double>& w) {
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0)) throw NumericalError("Picard sum vanished at a sampling point");
    out[i] = 1.0 / w[i];
  }
  return out;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw PreconditionError("regularization parameter alpha must be positive");
  }
}

}  // namespace

IndicatorMap fm_indicator_map(const FarFieldMatrix& f, const SamplingGrid& grid, double alpha) {
  check_alpha(alpha);
  if (f.kernel.isZero(0.0)) throw PreconditionError("no scattering data");
  const OperatorSpectrum spec = eig_general(f.weighted());
  const auto w = damped_picard_sums(spec, test_functions(f, grid), alpha, PicardExponent::One);
  return {grid, normalize_to_max(reciprocals(w)), alpha};
}

IndicatorMap msharp_indicator_map(const FarFieldMatrix& f1, const ContrastField& q2,
                                  const SamplingGrid& grid, double alpha,
                                  const ForwardConfig& config) {
  check_alpha(alpha);
  const FarFieldMatrix f2 = far_field_matrix(f1.ctx, q2, f1.dirs, config);
  const Eigen::MatrixXcd m = comparison_matrix(f1, f2);
  if (m.isZero(0.0)) throw PreconditionError("no scattering data");
  // synthesized data carries the Krylov tolerance, so the clipping floor follows it
  const Eigen::MatrixXcd sharp = msharp_matrix(m, std::max(1e-12, config.tolerance));
  const HermitianSpectrum spec = eig_hermitian(sharp);

  const Eigen::MatrixXcd s2 = scattering_matrix(f2).s;
  const Eigen::MatrixXcd g = green_far_fields(f1.ctx, q2, grid.points(), f1.dirs, config);
  const Eigen::MatrixXcd rhs = s2.adjoint() * g;
  const auto w = damped_picard_sums(spec, rhs, alpha, PicardExponent::Half);
  return {grid, normalize_to_max(reciprocals(w)), alpha};
}

}  // namespace scatterbound
