#include "scatterbound/operators.hpp"

#include <algorithm>
#include <cmath>

#include "scatterbound/errors.hpp"
#include "scatterbound/spectral.hpp"

namespace scatterbound {

namespace {

double hermitian_norm2(const Eigen::MatrixXcd& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

ScatteringMatrix scattering_matrix(const FarFieldMatrix& f) {
  const int n = f.size();
  const cdouble factor(0.0, 2.0 * f.ctx.k() * f.ctx.gamma_sq());
  return {Eigen::MatrixXcd::Identity(n, n) + factor * f.weighted()};
}

Eigen::MatrixXcd comparison_matrix(const FarFieldMatrix& f1, const FarFieldMatrix& f2) {
  if (f1.ctx.k() != f2.ctx.k()) {
    throw PreconditionError("comparison_matrix: far field matrices have different wavenumbers");
  }
  if (f1.size() != f2.size()) {
    throw PreconditionError("comparison_matrix: far field matrices have different direction counts");
  }
  const Eigen::MatrixXcd s2 = scattering_matrix(f2).s;
  return s2.adjoint() * (f1.weighted() - f2.weighted());
}

Eigen::MatrixXcd msharp_matrix(const Eigen::MatrixXcd& m, double clip_tolerance) {
  if (m.rows() != m.cols()) throw PreconditionError("msharp_matrix: matrix must be square");
  const Eigen::MatrixXcd re = 0.5 * (m + m.adjoint());
  const Eigen::MatrixXcd im = cdouble(0.0, -0.5) * (m - m.adjoint());

  const HermitianSpectrum rs = eig_hermitian(re);
  const Eigen::MatrixXcd abs_re =
      rs.eigenvectors * rs.eigenvalues.cwiseAbs().asDiagonal() * rs.eigenvectors.adjoint();

  Eigen::MatrixXcd sharp = abs_re + im;
  sharp = 0.5 * (sharp + sharp.adjoint()).eval();

  const HermitianSpectrum ss = eig_hermitian(sharp);
  const double floor = -clip_tolerance * spectral_norm(m);
  Eigen::VectorXd lam = ss.eigenvalues;
  bool clipped = false;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) >= 0.0) continue;
    if (lam(i) < floor) {
      throw NumericalError("M-sharp not PSD: data inconsistent with real contrasts");
    }
    lam(i) = 0.0;
    clipped = true;
  }
  if (!clipped) return sharp;
  Eigen::MatrixXcd out = ss.eigenvectors * lam.asDiagonal() * ss.eigenvectors.adjoint();
  return 0.5 * (out + out.adjoint());
}

OperatorDiagnostics operator_diagnostics(const FarFieldMatrix& f) {
  const int n = f.size();
  OperatorDiagnostics d;
  const Eigen::MatrixXcd s = scattering_matrix(f).s;
  d.unitarity = hermitian_norm2(s.adjoint() * s - Eigen::MatrixXcd::Identity(n, n));

  const Eigen::MatrixXcd fw = f.weighted();
  const double fn = spectral_norm(fw);
  if (fn > 0.0) d.normality = hermitian_norm2(fw.adjoint() * fw - fw * fw.adjoint()) / (fn * fn);

  double umax = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      umax = std::max(umax, std::abs(f.kernel(i, j)));
      d.reciprocity = std::max(
          d.reciprocity, std::abs(f.kernel(i, j) - f.kernel(f.dirs.antipode(j), f.dirs.antipode(i))));
    }
  }
  if (umax > 0.0) d.reciprocity_relative = d.reciprocity / umax;
  return d;
}

}  // namespace scatterbound
