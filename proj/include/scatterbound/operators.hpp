#pragma once

#include <Eigen/Dense>

#include "scatterbound/far_field_matrix.hpp"

namespace scatterbound {

struct ScatteringMatrix {
  Eigen::MatrixXcd s;
};

/// S = I + 2 i k |gamma_2|^2 F_w = I + (i / 4 pi) F_w.
ScatteringMatrix scattering_matrix(const FarFieldMatrix& f);

/// A = S_2^H (F1_w - F2_w). Throws PreconditionError on mismatched k or n.
Eigen::MatrixXcd comparison_matrix(const FarFieldMatrix& f1, const FarFieldMatrix& f2);

/// |Re M| + Im M, symmetrized, with eigenvalues in [-clip_tolerance ||M||_2, 0)
/// clipped to zero. Throws NumericalError if a more negative eigenvalue remains.
Eigen::MatrixXcd msharp_matrix(const Eigen::MatrixXcd& m, double clip_tolerance = 1e-12);

struct OperatorDiagnostics {
  double unitarity = 0.0;    // ||S^H S - I||_2
  double normality = 0.0;    // ||F_w^H F_w - F_w F_w^H||_2 / ||F_w||_2^2
  double reciprocity = 0.0;  // max |U(i,j) - U(sigma(j), sigma(i))|, sigma = antipode
  double reciprocity_relative = 0.0;  // the same divided by max |U(i,j)|
};

OperatorDiagnostics operator_diagnostics(const FarFieldMatrix& f);

}  // namespace scatterbound
