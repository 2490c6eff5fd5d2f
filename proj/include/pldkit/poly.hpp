#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <complex>
#include <stdexcept>
#include <vector>

namespace pldkit {

// Polynomials are dense Eigen vectors of coefficients in ascending powers:
// p(x) = c[0] + c[1]*x + ... + c[n]*x^n.

/// Horner evaluation; works for real or complex abscissae.
template <typename Derived, typename Scalar>
auto polyval(const Eigen::MatrixBase<Derived>& coeffs, const Scalar& x)
    -> decltype(typename Derived::Scalar{} * x) {
  using Result = decltype(typename Derived::Scalar{} * x);
  if (coeffs.size() == 0) return Result{};
  Result acc = Result{} + coeffs[coeffs.size() - 1];
  for (Eigen::Index i = coeffs.size() - 2; i >= 0; --i) {
    acc = acc * x + coeffs[i];
  }
  return acc;
}

inline Eigen::VectorXd polymul(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() == 0 || q.size() == 0) return Eigen::VectorXd{};
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p.size() + q.size() - 1);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    for (Eigen::Index j = 0; j < q.size(); ++j) {
      out[i + j] += p[i] * q[j];
    }
  }
  return out;
}

inline Eigen::VectorXd polyadd(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(std::max(p.size(), q.size()));
  out.head(p.size()) += p;
  out.head(q.size()) += q;
  return out;
}

/// Index of the highest nonzero coefficient, or -1 for the zero polynomial.
inline Eigen::Index poly_degree(const Eigen::VectorXd& p) {
  for (Eigen::Index i = p.size() - 1; i >= 0; --i) {
    if (p[i] != 0.0) return i;
  }
  return -1;
}

/// Drops exactly-zero high-order coefficients, always keeping one entry.
inline Eigen::VectorXd poly_strip(const Eigen::VectorXd& p) {
  const Eigen::Index deg = poly_degree(p);
  if (deg < 0) return Eigen::VectorXd::Zero(1);
  return p.head(deg + 1);
}

/// Roots via the companion matrix. Exact-zero leading (low-order)
/// coefficients contribute roots at the origin.
inline std::vector<std::complex<double>> poly_roots(const Eigen::VectorXd& poly) {
  Eigen::VectorXd p = poly_strip(poly);
  const Eigen::Index deg = poly_degree(p);
  if (deg <= 0) return {};

  std::vector<std::complex<double>> roots;
  Eigen::Index low = 0;
  while (low < deg && p[low] == 0.0) {
    roots.emplace_back(0.0, 0.0);
    ++low;
  }
  const Eigen::Index n = deg - low;
  if (n == 0) return roots;

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) companion(i, n - 1) = -p[low + i] / p[deg];

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("poly_roots: eigenvalue iteration failed");
  }
  for (Eigen::Index i = 0; i < n; ++i) roots.push_back(solver.eigenvalues()[i]);
  return roots;
}

/// max_i |p(root_i)|, used to certify a root set.
inline double poly_root_residual(const Eigen::VectorXd& p,
                                 const std::vector<std::complex<double>>& roots) {
  double worst = 0.0;
  for (const auto& r : roots) worst = std::max(worst, std::abs(polyval(p, r)));
  return worst;
}

}  // namespace pldkit
