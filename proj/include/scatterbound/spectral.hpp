#pragma once

#include <vector>

#include <Eigen/Dense>

namespace scatterbound {

/// Eigenpairs of a general square matrix, sorted by decreasing |lambda|.
/// Eigenvectors are columns normalized in the weighted norm
/// ||v||_w^2 = (2 pi / n) sum |v_i|^2.
struct OperatorSpectrum {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
  std::vector<double> residuals;  // ||A v - lambda v|| / (||A||_2 ||v||)
  double max_residual = 0.0;
  double max_nonorthogonality = 0.0;  // max_{i != j} |<v_i, v_j>_w|
};

/// Real spectrum (ascending) and unitary eigenvector matrix of a Hermitian matrix.
struct HermitianSpectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
};

enum class PicardExponent { One, Half };

double quadrature_weight(Eigen::Index n);

/// Largest singular value.
double spectral_norm(const Eigen::MatrixXcd& a);

/// Eigenvalues closer than this times ||A||_2 form one cluster whose
/// eigenvectors are orthonormalized in the weighted inner product.
inline constexpr double kClusterTolerance = 1e-10;

OperatorSpectrum eig_general(const Eigen::MatrixXcd& a);

/// Throws PreconditionError when ||H - H^H||_F > 1e-12 ||H||_F.
HermitianSpectrum eig_hermitian(const Eigen::MatrixXcd& h);

/// W = sum_j |<rhs, psi_j>_w|^2 / (|lambda_j|^e + alpha), psi_j weighted-normalized.
double damped_picard_sum(const OperatorSpectrum& spec, const Eigen::VectorXcd& rhs, double alpha,
                         PicardExponent exponent);
double damped_picard_sum(const HermitianSpectrum& spec, const Eigen::VectorXcd& rhs, double alpha,
                         PicardExponent exponent);

/// Same sum for every column of `rhs`, using one matrix product for all coefficients.
std::vector<double> damped_picard_sums(const OperatorSpectrum& spec, const Eigen::MatrixXcd& rhs,
                                       double alpha, PicardExponent exponent);
std::vector<double> damped_picard_sums(const HermitianSpectrum& spec, const Eigen::MatrixXcd& rhs,
                                       double alpha, PicardExponent exponent);

}  // namespace scatterbound
