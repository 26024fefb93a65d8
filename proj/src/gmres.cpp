#include "scatterbound/gmres.hpp"

#include <cmath>

namespace scatterbound {

namespace {

using cvec = std::vector<std::complex<double>>;

double norm2(const cvec& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

std::complex<double> inner(const cvec& a, const cvec& b) {  // a^H b
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double residual_norm(const LinearOperator& apply, const cvec& b, const cvec& x, cvec& r) {
  apply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return norm2(r);
}

}  // namespace

GmresResult gmres(const LinearOperator& apply, const cvec& b, cvec& x,
                  const GmresOptions& options) {
  const std::size_t n = b.size();
  GmresResult result;
  x.resize(n);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    result.converged = true;
    return result;
  }
  const int restart = std::max(1, options.restart);
  cvec r(n);
  double rnorm = residual_norm(apply, b, x, r);
  result.relative_residual = rnorm / bnorm;
  if (result.relative_residual <= options.tolerance) {
    result.converged = true;
    return result;
  }

  std::vector<cvec> basis(restart + 1, cvec(n));
  // Hessenberg matrix stored column-wise, (restart+1) x restart
  std::vector<std::complex<double>> hess((restart + 1) * restart);
  auto H = [&](int i, int j) -> std::complex<double>& { return hess[j * (restart + 1) + i]; };
  std::vector<double> cs(restart);
  std::vector<std::complex<double>> sn(restart), g(restart + 1);
  cvec w(n);

  while (result.iterations < options.max_iterations) {
    for (std::size_t i = 0; i < n; ++i) basis[0][i] = r[i] / rnorm;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = rnorm;
    int j = 0;
    for (; j < restart && result.iterations < options.max_iterations; ++j) {
      ++result.iterations;
      apply(basis[j], w);
      // modified Gram-Schmidt
      for (int i = 0; i <= j; ++i) {
        const auto hij = inner(basis[i], w);
        H(i, j) = hij;
        for (std::size_t t = 0; t < n; ++t) w[t] -= hij * basis[i][t];
      }
      const double hnext = norm2(w);
      H(j + 1, j) = hnext;
      if (hnext > 0.0) {
        for (std::size_t t = 0; t < n; ++t) basis[j + 1][t] = w[t] / hnext;
      }
      for (int i = 0; i < j; ++i) {
        const auto a = H(i, j), c = H(i + 1, j);
        H(i, j) = cs[i] * a + sn[i] * c;
        H(i + 1, j) = -std::conj(sn[i]) * a + cs[i] * c;
      }
      const auto a = H(j, j), c = H(j + 1, j);
      const double denom = std::sqrt(std::norm(a) + std::norm(c));
      if (denom == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else if (std::abs(a) == 0.0) {
        cs[j] = 0.0;
        sn[j] = std::conj(c) / denom;
      } else {
        cs[j] = std::abs(a) / denom;
        sn[j] = (a / std::abs(a)) * std::conj(c) / denom;
      }
      H(j, j) = cs[j] * a + sn[j] * c;
      H(j + 1, j) = 0.0;
      g[j + 1] = -std::conj(sn[j]) * g[j];
      g[j] = cs[j] * g[j];
      if (std::abs(g[j + 1]) / bnorm <= options.tolerance || hnext == 0.0) {
        ++j;
        break;
      }
    }
    // back substitution on the j x j triangle
    std::vector<std::complex<double>> y(j);
    for (int i = j - 1; i >= 0; --i) {
      auto s = g[i];
      for (int t = i + 1; t < j; ++t) s -= H(i, t) * y[t];
      y[i] = s / H(i, i);
    }
    for (int i = 0; i < j; ++i) {
      for (std::size_t t = 0; t < n; ++t) x[t] += y[i] * basis[i][t];
    }
    rnorm = residual_norm(apply, b, x, r);
    result.relative_residual = rnorm / bnorm;
    if (result.relative_residual <= options.tolerance) {
      result.converged = true;
      return result;
    }
  }
  return result;
}

}  // namespace scatterbound
