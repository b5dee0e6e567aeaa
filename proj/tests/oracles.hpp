#pragma once

// Test-only reference implementations, deliberately independent of the
// library's computational paths.  Slow and simple on purpose.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracle {

// Elementary symmetric polynomial by brute-force subset enumeration over
// bitmasks.  O(2^n * n), usable for n <= 20.
inline double sigma_subset_enum(std::span<const double> lam, int j) {
  const int n = static_cast<int>(lam.size());
  if (j == 0) return 1.0;
  if (j < 0 || j > n) return 0.0;
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != j) continue;
    double prod = 1.0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) prod *= lam[i];
    total += prod;
  }
  return total;
}

// Central-difference gradient of a scalar function of a vector.
inline std::vector<double> fd_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double rel_step = 1e-6) {
  std::vector<double> grad(x.size());
  std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
  for (size_t i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    grad[i] = (f(xp) - f(xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return grad;
}

// Generalized eigenvalues of the pencil (S, g) via the characteristic
// polynomial det(S - mu g): coefficients are recovered by interpolation at
// integer nodes, roots via the companion matrix.  Independent of any
// Cholesky-based reduction.  Requires S symmetric, g SPD.
inline std::vector<double> charpoly_generalized_eigs(const Eigen::MatrixXd& g,
                                                     const Eigen::MatrixXd& S) {
  const int n = static_cast<int>(g.rows());
  // det(S - mu g) is a degree-n polynomial; sample at n+1 nodes.
  Eigen::MatrixXd V(n + 1, n + 1);
  Eigen::VectorXd d(n + 1);
  for (int s = 0; s <= n; ++s) {
    const double mu = s - n / 2.0;
    d(s) = (S - mu * g).determinant();
    double p = 1.0;
    for (int c = 0; c <= n; ++c) {
      V(s, c) = p;
      p *= mu;
    }
  }
  Eigen::VectorXd coeff = V.fullPivLu().solve(d);  // coeff[c] multiplies mu^c
  // Companion matrix of the monic polynomial.
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) C(i, n - 1) = -coeff(i) / coeff(n);
  Eigen::EigenSolver<Eigen::MatrixXd> es(C);
  std::vector<double> roots(n);
  for (int i = 0; i < n; ++i) {
    if (std::abs(es.eigenvalues()(i).imag()) > 1e-7)
      throw std::runtime_error("charpoly oracle: complex root encountered");
    roots[static_cast<size_t>(i)] = es.eigenvalues()(i).real();
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace oracle
