#pragma once

#include <optional>

#include <Eigen/Dense>

#include "scatterbound/model.hpp"

namespace scatterbound {

/// Discrete far field operator: kernel U(i, j) = u_inf(xhat_i, theta_j).
/// Downstream algebra always uses the weighted matrix (2 pi / n) * U.
struct FarFieldMatrix {
  WaveContext ctx;
  DirectionSet dirs;
  Eigen::MatrixXcd kernel;
  std::optional<ContrastField> contrast;

  FarFieldMatrix(WaveContext c, DirectionSet d, Eigen::MatrixXcd u,
                 std::optional<ContrastField> q = std::nullopt);

  int size() const noexcept { return dirs.size(); }
  Eigen::MatrixXcd weighted() const { return dirs.weight() * kernel; }
  std::string contrast_tag() const { return contrast ? contrast->tag() : "unknown"; }
};

}  // namespace scatterbound
