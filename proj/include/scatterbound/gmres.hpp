#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace scatterbound {

struct GmresOptions {
  int restart = 50;
  int max_iterations = 1000;
  double tolerance = 1e-8;
};

struct GmresResult {
  int iterations = 0;
  double relative_residual = 0.0;  // true residual ||b - A x|| / ||b||
  bool converged = false;
};

using LinearOperator =
    std::function<void(const std::vector<std::complex<double>>&, std::vector<std::complex<double>>&)>;

/// Restarted GMRES with Givens rotations. `x` holds the initial guess on entry
/// and the iterate on exit. Does not throw on non-convergence.
GmresResult gmres(const LinearOperator& apply, const std::vector<std::complex<double>>& b,
                  std::vector<std::complex<double>>& x, const GmresOptions& options);

}  // namespace scatterbound
