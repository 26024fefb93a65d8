#pragma once

#include <vector>

#include "scatterbound/far_field_matrix.hpp"
#include "scatterbound/forward.hpp"

namespace scatterbound {

/// resolution x resolution sampling points on a rectangle, row-major with x fastest.
class SamplingGrid {
 public:
  SamplingGrid(Box box, int resolution);

  const Box& box() const noexcept { return box_; }
  int resolution() const noexcept { return resolution_; }
  const std::vector<Point2>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }

 private:
  Box box_;
  int resolution_;
  std::vector<Point2> points_;
};

/// Indicator values in [0, 1] with maximum exactly 1.
struct IndicatorMap {
  SamplingGrid grid;
  std::vector<double> values;
  double alpha = 0.0;
};

/// Rescales so the maximum is 1. Throws NumericalError for all-zero or non-finite input.
std::vector<double> normalize_to_max(std::vector<double> values);

/// value(z) = 1 / sum_j |<phi_z, psi_j>_w|^2 / (|lambda_j| + alpha) over the
/// eigensystem of F_w, phi_z(xhat) = exp(-i k xhat . z).
IndicatorMap fm_indicator_map(const FarFieldMatrix& f, const SamplingGrid& grid, double alpha = 1e-8);

/// Perturbation of a known background q2: M = S_2^H (F1 - F2), rhs S_2^H G_inf(., z),
/// square-root Picard test over the eigensystem of M-sharp.
IndicatorMap msharp_indicator_map(const FarFieldMatrix& f1, const ContrastField& q2,
                                  const SamplingGrid& grid, double alpha = 1e-8,
                                  const ForwardConfig& config = {});

}  // namespace scatterbound
