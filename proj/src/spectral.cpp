#include "scatterbound/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "scatterbound/errors.hpp"

namespace scatterbound {

double quadrature_weight(Eigen::Index n) { return 2.0 * std::numbers::pi / static_cast<double>(n); }

double spectral_norm(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues()(0);
}

OperatorSpectrum eig_general(const Eigen::MatrixXcd& a) {
  const Eigen::Index n = a.rows();
  if (n == 0 || a.cols() != n) throw PreconditionError("eig_general: matrix must be square");
  if (n > 512) throw PreconditionError("eig_general: matrix dimension exceeds 512");
  if (!a.allFinite()) throw PreconditionError("eig_general: non-finite matrix entries");

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a, true);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eig_general: QR iteration did not converge");
  }
  const Eigen::VectorXcd& vals = es.eigenvalues();
  const Eigen::MatrixXcd& vecs = es.eigenvectors();

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    const double ai = std::abs(vals(i)), aj = std::abs(vals(j));
    if (ai != aj) return ai > aj;
    if (vals(i).real() != vals(j).real()) return vals(i).real() > vals(j).real();
    return vals(i).imag() > vals(j).imag();
  });

  const double w = quadrature_weight(n);
  const double anorm = spectral_norm(a);
  OperatorSpectrum out;
  out.eigenvalues.resize(n);
  Eigen::MatrixXcd v(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Eigen::Index src = order[c];
    const double vn = vecs.col(src).norm();
    if (!(vn > 0.0) || !std::isfinite(vn)) throw NumericalError("eig_general: degenerate eigenvector");
    v.col(c) = vecs.col(src) / vn;
    out.eigenvalues(c) = vals(src);
  }

  // Numerically equal eigenvalues: orthonormalize the eigenvectors of the cluster.
  const double cluster_tol = kClusterTolerance * anorm;
  std::vector<Eigen::Index> root(n);
  std::iota(root.begin(), root.end(), 0);
  const auto find = [&](Eigen::Index i) {
    while (root[i] != i) i = root[i] = root[root[i]];
    return i;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(out.eigenvalues(i) - out.eigenvalues(j)) <= cluster_tol) root[find(j)] = find(i);
    }
  }
  for (Eigen::Index c = 0; c < n; ++c) {
    const Eigen::Index r = find(c);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index p = 0; p < c; ++p) {
        if (find(p) == r) v.col(c) -= v.col(p).dot(v.col(c)) * v.col(p);
      }
    }
    const double vn = v.col(c).norm();
    if (vn > 1e-8) {
      v.col(c) /= vn;
    } else {
      v.col(c) = vecs.col(order[c]).normalized();
    }
  }

  out.eigenvectors.resize(n, n);
  out.residuals.resize(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const double r = (a * v.col(c) - out.eigenvalues(c) * v.col(c)).norm();
    out.residuals[c] = anorm > 0.0 ? r / anorm : r;
    out.eigenvectors.col(c) = v.col(c) / std::sqrt(w);
  }
  out.max_residual = *std::max_element(out.residuals.begin(), out.residuals.end());

  const Eigen::MatrixXcd gram = w * (out.eigenvectors.adjoint() * out.eigenvectors);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != j) out.max_nonorthogonality = std::max(out.max_nonorthogonality, std::abs(gram(i, j)));
    }
  }
  return out;
}

HermitianSpectrum eig_hermitian(const Eigen::MatrixXcd& h) {
  const Eigen::Index n = h.rows();
  if (n == 0 || h.cols() != n) throw PreconditionError("eig_hermitian: matrix must be square");
  if (!h.allFinite()) throw PreconditionError("eig_hermitian: non-finite matrix entries");
  const double hn = h.norm();
  if ((h - h.adjoint()).norm() > 1e-12 * hn) {
    throw PreconditionError("eig_hermitian: matrix is not Hermitian");
  }
  const Eigen::MatrixXcd sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eig_hermitian: iteration did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

namespace {

std::vector<double> picard_core(const Eigen::VectorXcd& lambda, const Eigen::MatrixXcd& coeff,
                                double alpha, PicardExponent exponent) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw PreconditionError("damped_picard_sum: alpha must be finite and nonnegative");
  }
  const Eigen::Index n = lambda.size();
  std::vector<double> denom(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double mag = std::abs(lambda(j));
    denom[j] = (exponent == PicardExponent::One ? mag : std::sqrt(mag)) + alpha;
    if (denom[j] == 0.0) {
      throw NumericalError("damped_picard_sum: zero eigenvalue with alpha = 0");
    }
  }
  std::vector<double> out(coeff.cols(), 0.0);
  for (Eigen::Index c = 0; c < coeff.cols(); ++c) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) acc += std::norm(coeff(j, c)) / denom[j];
    out[c] = acc;
  }
  return out;
}

void check_rhs(Eigen::Index n, const Eigen::MatrixXcd& rhs) {
  if (rhs.rows() != n) throw PreconditionError("damped_picard_sum: rhs length mismatch");
}

}  // namespace

std::vector<double> damped_picard_sums(const OperatorSpectrum& spec, const Eigen::MatrixXcd& rhs,
                                       double alpha, PicardExponent exponent) {
  const Eigen::Index n = spec.eigenvectors.rows();
  check_rhs(n, rhs);
  // <rhs, psi>_w = w * psi^H rhs (conjugated; only the modulus enters)
  const Eigen::MatrixXcd coeff = quadrature_weight(n) * (spec.eigenvectors.adjoint() * rhs);
  return picard_core(spec.eigenvalues, coeff, alpha, exponent);
}

std::vector<double> damped_picard_sums(const HermitianSpectrum& spec, const Eigen::MatrixXcd& rhs,
                                       double alpha, PicardExponent exponent) {
  const Eigen::Index n = spec.eigenvectors.rows();
  check_rhs(n, rhs);
  // unit Euclidean vectors v give weighted-normalized psi = v / sqrt(w)
  const Eigen::MatrixXcd coeff =
      std::sqrt(quadrature_weight(n)) * (spec.eigenvectors.adjoint() * rhs);
  return picard_core(spec.eigenvalues.cast<std::complex<double>>(), coeff, alpha, exponent);
}

double damped_picard_sum(const OperatorSpectrum& spec, const Eigen::VectorXcd& rhs, double alpha,
                         PicardExponent exponent) {
  return damped_picard_sums(spec, Eigen::MatrixXcd(rhs), alpha, exponent).front();
}

double damped_picard_sum(const HermitianSpectrum& spec, const Eigen::VectorXcd& rhs, double alpha,
                         PicardExponent exponent) {
  return damped_picard_sums(spec, Eigen::MatrixXcd(rhs), alpha, exponent).front();
}

}  // namespace scatterbound
