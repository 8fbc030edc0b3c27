#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ffp/errors.hpp"
#include "ffp/polynomial.hpp"

namespace ffp {

namespace detail {

// Parlett-Reinsch balancing with radix-2 scale factors (exact in floating
// point). Companion matrices of modest-degree monic polynomials are the only
// inputs, but wide coefficient ranges still benefit.
inline void balance_in_place(Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  bool converged = false;
  while (!converged) {
    converged = true;
    for (int i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      double s = c + r;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c >= r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if (c + r < 0.95 * s) {
        converged = false;
        a.col(i) *= f;
        a.row(i) /= f;
      }
    }
  }
}

inline double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (double cj : c) acc = acc * x + cj;
  return acc;
}

inline double horner_derivative(const std::vector<double>& c, double x) {
  double acc = 0.0;
  int deg = static_cast<int>(c.size()) - 1;
  for (int j = 0; j < deg; ++j) acc = acc * x + c[static_cast<std::size_t>(j)] * static_cast<double>(deg - j);
  return acc;
}

}  // namespace detail

// Roots of a monic real-rooted polynomial, sorted non-increasing (Weyl
// chamber order). Input is the signed coefficient list [1, c_1, ..., c_n].
// Method: strip exact zero roots, companion matrix with balancing, dense
// eigensolve, one Newton polish per root. Throws numerical_error when the
// eigenvalues carry imaginary parts above tau_im = 1e-6 * (1 + max |c_j|),
// which signals a non-real-rooted input or solver breakdown.
inline std::vector<double> real_roots_sorted(const std::vector<double>& signed_coeffs) {
  if (signed_coeffs.size() < 2 || signed_coeffs[0] != 1.0)
    throw std::invalid_argument("real_roots_sorted: monic coefficient list required");
  std::vector<double> c = signed_coeffs;
  std::vector<double> roots;
  roots.reserve(c.size() - 1);
  while (c.size() > 1 && c.back() == 0.0) {
    roots.push_back(0.0);
    c.pop_back();
  }
  const int n = static_cast<int>(c.size()) - 1;
  if (n == 1) {
    roots.push_back(-c[1]);
  } else if (n >= 2) {
    double max_abs = 0.0;
    for (double cj : c) max_abs = std::max(max_abs, std::abs(cj));
    const double tau_im = 1e-6 * (1.0 + max_abs);

    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[static_cast<std::size_t>(n - i)];
    detail::balance_in_place(comp);

    Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw numerical_error("real_roots_sorted: eigensolver failed");
    const auto& ev = solver.eigenvalues();
    for (int i = 0; i < n; ++i) {
      if (std::abs(ev(i).imag()) > tau_im)
        throw numerical_error("real_roots_sorted: imaginary residue above tolerance");
      double z = ev(i).real();
      double dp = detail::horner_derivative(c, z);
      if (std::abs(dp) > 1e-300) z -= detail::horner(c, z) / dp;
      roots.push_back(z);
    }
  }
  std::sort(roots.begin(), roots.end(), std::greater<double>());
  return roots;
}

inline std::vector<double> real_roots_sorted(const Polynomial& p) {
  if (p.has_roots()) return p.roots();
  return real_roots_sorted(signed_coefficients(p));
}

}  // namespace ffp
