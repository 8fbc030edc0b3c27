#pragma once

#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "ffp/polynomial.hpp"
#include "ffp/rational.hpp"
#include "ffp/roots.hpp"
#include "ffp/series.hpp"
#include "ffp/transforms.hpp"

namespace ffp {

// Probabilists' Hermite He_k, signed coefficients [1, c_1, ..., c_k] from the
// closed-form sum He_k(x) = sum_j k! (-1)^j / (j! (k-2j)! 2^j) x^(k-2j).
template <class S>
std::vector<S> hermite_signed_coefficients(int k) {
  if (k < 0) throw std::invalid_argument("hermite: negative degree");
  std::vector<Rational> c(static_cast<std::size_t>(k) + 1, Rational(0));
  Rational kfact(factorial(k));
  for (int j = 0; 2 * j <= k; ++j) {
    Rational term = kfact / Rational(factorial(j) * factorial(k - 2 * j) * scalar_pow(BigInt(2), j));
    if (j % 2 != 0) term = -term;
    c[static_cast<std::size_t>(2 * j)] = term;  // coefficient of x^(k-2j)
  }
  std::vector<S> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = scalar_from<S>(c[i]);
  return out;
}

inline Polynomial hermite(int k) {
  if (k < 1) throw std::invalid_argument("hermite: Polynomial form needs degree >= 1");
  return from_signed_coefficients(hermite_signed_coefficients<double>(k));
}

// Roots z_{1,ell} > ... > z_{ell,ell} of He_ell, cached per degree.
inline const std::vector<double>& hermite_roots(int ell) {
  if (ell < 1) throw std::invalid_argument("hermite_roots: degree must be positive");
  static std::map<int, std::vector<double>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(ell);
  if (it != cache.end()) return it->second;
  auto roots = real_roots_sorted(hermite_signed_coefficients<double>(ell));
  return cache.emplace(ell, std::move(roots)).first->second;
}

// Coefficients of the generalized Laguerre polynomial L_n^(alpha) in
// ascending powers: L_n^(alpha)(x) = sum_i (-1)^i binom(n+alpha, n-i) x^i / i!.
template <class S>
std::vector<S> laguerre_ascending_coefficients(int n, const S& alpha) {
  if (n < 0) throw std::invalid_argument("laguerre: negative degree");
  std::vector<S> c(static_cast<std::size_t>(n) + 1, S(0));
  for (int i = 0; i <= n; ++i) {
    // binom(n+alpha, n-i) = prod_{t=0}^{n-i-1} (n+alpha-t) / (n-i)!
    S binom(1);
    for (int t = 0; t < n - i; ++t) binom *= (S(n) + alpha - S(t)) / S(n - i - t);
    S term = binom / scalar_from<S>(Rational(factorial(i)));
    if (i % 2 != 0) term = -term;
    c[static_cast<std::size_t>(i)] = term;
  }
  return c;
}

// Monic rescaling n! (-1)^n L_n^(alpha), signed coefficients highest first:
// c_j = (-1)^j n! binom(n+alpha, j) / (n-j)!.
template <class S>
std::vector<S> laguerre_monic_signed_coefficients(int n, const S& alpha) {
  if (n < 0) throw std::invalid_argument("laguerre: negative degree");
  std::vector<S> c(static_cast<std::size_t>(n) + 1, S(0));
  for (int j = 0; j <= n; ++j) {
    S binom(1);
    for (int t = 0; t < j; ++t) binom *= (S(n) + alpha - S(t)) / S(j - t);
    S term = scalar_from<S>(Rational(factorial(n), factorial(n - j))) * binom;
    if (j % 2 != 0) term = -term;
    c[static_cast<std::size_t>(j)] = term;
  }
  return c;
}

inline Polynomial laguerre(int n, double alpha) {
  if (n < 1) throw std::invalid_argument("laguerre: Polynomial form needs degree >= 1");
  return from_signed_coefficients(laguerre_monic_signed_coefficients<double>(n, alpha));
}

// Appell polynomial A_ell = f(d/dx) x^ell for a series with f_0 = 1.
inline Polynomial appell_from_series(const TruncatedSeries<double>& f, int ell) {
  return series_apply(f, ell);
}

template <class S>
std::vector<S> appell_prefix_from_series(const TruncatedSeries<S>& f, int ell) {
  return series_apply_prefix(f, ell);
}

}  // namespace ffp
