#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ffp/partitions.hpp"
#include "ffp/polynomial.hpp"
#include "ffp/rational.hpp"
#include "ffp/series.hpp"

namespace ffp {

inline constexpr int kMaxCumulantOrder = kMaxPartitionOrder;

struct CumulantVector {
  int degree = 0;              // ambient degree N defining kappa_j^N
  std::vector<double> values;  // kappa_1..kappa_ell

  CumulantVector() = default;
  CumulantVector(int deg, std::vector<double> v) : degree(deg), values(std::move(v)) {
    if (values.empty()) throw std::invalid_argument("CumulantVector: needs at least kappa_1");
    if (degree < static_cast<int>(values.size()))
      throw std::invalid_argument("CumulantVector: degree smaller than length");
  }

  int length() const { return static_cast<int>(values.size()); }
  double kappa(int j) const { return values.at(static_cast<std::size_t>(j) - 1); }
};

namespace detail {

template <class S>
struct WeightedShape {
  S weight;
  std::array<std::uint8_t, kMaxPartitionOrder> sizes;
  std::uint8_t nblocks;
};

template <class S>
std::array<std::uint8_t, kMaxPartitionOrder> block_sizes_of(const Rgs& labels, int j, int nb) {
  std::array<std::uint8_t, kMaxPartitionOrder> sizes{};
  for (int i = 0; i < j; ++i) ++sizes[labels[i]];
  (void)nb;
  return sizes;
}

// Weighted partition shapes of [k] for the implicit cumulant relation,
// memoized per (k, N) up to order 10. Orders 11 and 12 are streamed on
// demand instead of pinning multi-million-entry tables.
template <class S>
const std::vector<WeightedShape<S>>& cumulant_weight_table(int k, long long n) {
  static std::map<std::pair<int, long long>, std::vector<WeightedShape<S>>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(k, n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<WeightedShape<S>> table;
  for_each_set_partition(k, [&](const Rgs& labels, int j, int nb) {
    auto sizes = block_sizes_of<S>(labels, j, nb);
    table.push_back({scalar_from<S>(partition_weight_from_counts(sizes, nb, n, k)), sizes,
                     static_cast<std::uint8_t>(nb)});
  });
  return cache.emplace(key, std::move(table)).first->second;
}

// kappa_pi = prod over blocks of kappa_{|V|}; kappa is 0-indexed by order-1.
template <class S>
S kappa_product(const std::array<std::uint8_t, kMaxPartitionOrder>& sizes, int nblocks,
                const std::vector<S>& kappa) {
  S acc(1);
  for (int b = 0; b < nblocks; ++b) acc *= kappa[static_cast<std::size_t>(sizes[b]) - 1];
  return acc;
}

// Sum over P(k) (optionally excluding the one-block partition) of
// weight(pi) * kappa_pi.
template <class S>
S cumulant_partition_sum(int k, long long n, const std::vector<S>& kappa, bool exclude_full_block) {
  S acc(0);
  auto add = [&](const std::array<std::uint8_t, kMaxPartitionOrder>& sizes, int nb, const S& w) {
    if (exclude_full_block && nb == 1) return;
    acc += w * kappa_product(sizes, nb, kappa);
  };
  if (k <= 10) {
    for (const auto& shape : cumulant_weight_table<S>(k, n)) add(shape.sizes, shape.nblocks, shape.weight);
  } else {
    for_each_set_partition(k, [&](const Rgs& labels, int j, int nb) {
      auto sizes = block_sizes_of<S>(labels, j, nb);
      add(sizes, nb, scalar_from<S>(partition_weight_from_counts(sizes, nb, n, k)));
    });
  }
  return acc;
}

// (N)_k / (N^k k!)
inline Rational cumulant_prefactor(long long n, int k) {
  BigInt den = factorial(k);
  for (int i = 0; i < k; ++i) den *= n;
  return Rational(falling_factorial(n, k), den);
}

// Block-size lists of the non-crossing partitions of [j] other than 1_j.
inline const std::vector<std::pair<std::array<std::uint8_t, kMaxPartitionOrder>, std::uint8_t>>&
proper_noncrossing_shapes(int j) {
  static std::map<int, std::vector<std::pair<std::array<std::uint8_t, kMaxPartitionOrder>, std::uint8_t>>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(j);
  if (it != cache.end()) return it->second;
  std::vector<std::pair<std::array<std::uint8_t, kMaxPartitionOrder>, std::uint8_t>> shapes;
  for_each_noncrossing_partition(j, [&](const Rgs& labels, int n, int nb) {
    if (nb == 1) return;
    shapes.emplace_back(block_sizes_of<double>(labels, n, nb), static_cast<std::uint8_t>(nb));
  });
  return cache.emplace(j, std::move(shapes)).first->second;
}

template <class S>
void check_cumulant_order(int k) {
  if (k < 1 || k > kMaxCumulantOrder)
    throw std::invalid_argument("cumulant order must be in [1, 12]");
}

}  // namespace detail

// Coefficient prefix a_1..a_k from finite free cumulants via the implicit
// set-partition relation, with exact weights.
template <class S>
std::vector<S> cumulants_to_coeffs(const std::vector<S>& kappa, long long n, int k) {
  detail::check_cumulant_order<S>(k);
  if (static_cast<int>(kappa.size()) < k)
    throw std::invalid_argument("cumulants_to_coeffs: fewer cumulants than requested order");
  if (n < k) throw std::invalid_argument("cumulants_to_coeffs: requires N >= k");
  std::vector<S> a(static_cast<std::size_t>(k));
  for (int order = 1; order <= k; ++order) {
    S sum = detail::cumulant_partition_sum(order, n, kappa, /*exclude_full_block=*/false);
    a[static_cast<std::size_t>(order) - 1] = scalar_from<S>(detail::cumulant_prefactor(n, order)) * sum;
  }
  return a;
}

// Triangular inversion, order by order; the one-block coefficient
// (-1)^(k-1) N (k-1)! is the pivot and is never zero.
template <class S>
std::vector<S> coeffs_to_cumulants(const std::vector<S>& a, long long n) {
  int k = static_cast<int>(a.size());
  detail::check_cumulant_order<S>(k);
  if (n < k) throw std::invalid_argument("coeffs_to_cumulants: requires N >= prefix length");
  std::vector<S> kappa(a.size(), S(0));
  for (int order = 1; order <= k; ++order) {
    S rest = detail::cumulant_partition_sum(order, n, kappa, /*exclude_full_block=*/true);
    S target = a[static_cast<std::size_t>(order) - 1] / scalar_from<S>(detail::cumulant_prefactor(n, order));
    Rational pivot(falling_factorial(n, 1) * factorial(order - 1));
    if (order % 2 == 0) pivot = -pivot;
    kappa[static_cast<std::size_t>(order) - 1] = (target - rest) / scalar_from<S>(pivot);
  }
  return kappa;
}

// P with P(d/dx) x^N = p, truncated at order m: P_j = (-1)^j a_j / (N)_j.
template <class S>
TruncatedSeries<S> fourier_series_of(const std::vector<S>& a, long long n, int m) {
  if (m < 0 || m > n) throw std::invalid_argument("fourier_series_of: order out of range");
  if (m > static_cast<int>(a.size()))
    throw std::invalid_argument("fourier_series_of: coefficient prefix shorter than order");
  TruncatedSeries<S> p(m);
  p[0] = S(1);
  S fall(1);
  for (int j = 1; j <= m; ++j) {
    fall *= S(n - j + 1);
    S v = a[static_cast<std::size_t>(j) - 1] / fall;
    p[j] = (j % 2 == 0) ? v : -v;
  }
  return p;
}

// R_p(s) = -P'(Ns)/P(Ns) mod s^m; coefficient of s^(j-1) is kappa_j^N(p).
template <class S>
TruncatedSeries<S> finite_R_transform(const std::vector<S>& a, long long n, int m) {
  if (m < 1 || m > n) throw std::invalid_argument("finite_R_transform: order out of range");
  auto p = fourier_series_of(a, n, m);
  TruncatedSeries<S> scaled_p(m - 1);   // P(Ns) mod s^m, one order beyond the output
  TruncatedSeries<S> scaled_dp(m - 1);  // P'(Ns)
  S npow(1);
  for (int j = 0; j <= m - 1; ++j) {
    scaled_p[j] = p[j] * npow;
    scaled_dp[j] = S(j + 1) * p[j + 1] * npow;
    npow *= S(n);
  }
  return -(scaled_dp * reciprocal(scaled_p));
}

// kappa_1..kappa_k read off the finite R-transform (independent of the
// partition inversion; Lemma-level identity checked by the tests).
template <class S>
std::vector<S> cumulants_via_r_transform(const std::vector<S>& a, long long n, int k) {
  auto r = finite_R_transform(a, n, k);
  std::vector<S> kappa(static_cast<std::size_t>(k));
  for (int j = 1; j <= k; ++j) kappa[static_cast<std::size_t>(j) - 1] = r[j - 1];
  return kappa;
}

// Inverse of the R read-off: rebuild the coefficient prefix from cumulants by
// solving g' = -N R g with g(s) = P(Ns). Second route for cumulants_to_coeffs.
template <class S>
std::vector<S> coeffs_via_r_series(const std::vector<S>& kappa, long long n, int k) {
  detail::check_cumulant_order<S>(k);
  TruncatedSeries<S> g(k);
  g[0] = S(1);
  for (int order = 1; order <= k; ++order) {
    S acc(0);
    for (int i = 0; i < order; ++i) acc += kappa[static_cast<std::size_t>(i)] * g[order - 1 - i];
    g[order] = -S(n) * acc / S(order);
  }
  std::vector<S> a(static_cast<std::size_t>(k));
  S npow(1), fall(1);
  for (int j = 1; j <= k; ++j) {
    npow *= S(n);
    fall *= S(n - j + 1);
    S pj = g[j] / npow;
    a[static_cast<std::size_t>(j) - 1] = (j % 2 == 0 ? pj : -pj) * fall;
  }
  return a;
}

// q = f(d/dx) x^ell for a series with f_0 = 1; returns the prefix of the monic
// degree-ell output, a_j = (-1)^j f_j (ell)_j.
template <class S>
std::vector<S> series_apply_prefix(const TruncatedSeries<S>& f, int ell) {
  if (f[0] != S(1)) throw std::invalid_argument("series_apply: constant term must be 1 for a monic output");
  if (f.order() < ell) throw std::invalid_argument("series_apply: series truncated below the requested degree");
  std::vector<S> a(static_cast<std::size_t>(ell));
  S fall(1);
  for (int j = 1; j <= ell; ++j) {
    fall *= S(ell - j + 1);
    S v = f[j] * fall;
    a[static_cast<std::size_t>(j) - 1] = (j % 2 == 0) ? v : -v;
  }
  return a;
}

// Finite free additive convolution on coefficient prefixes:
// c_k = sum_{i+j=k} a_i b_j (N-j)_i / (N)_i, with a_0 = b_0 = 1.
template <class S>
std::vector<S> convolve_prefix(const std::vector<S>& a, const std::vector<S>& b, long long n, int kmax) {
  if (kmax < 1 || kmax > n) throw std::invalid_argument("convolve_prefix: order out of range");
  if (static_cast<int>(a.size()) < kmax || static_cast<int>(b.size()) < kmax)
    throw std::invalid_argument("convolve_prefix: prefixes shorter than requested order");
  std::vector<S> c(static_cast<std::size_t>(kmax), S(0));
  for (int k = 1; k <= kmax; ++k) {
    S acc(0);
    for (int i = 0; i <= k; ++i) {
      int j = k - i;
      S w(1);
      for (int t = 0; t < i; ++t) w *= S(n - j - t) / S(n - t);
      S ai = (i == 0) ? S(1) : a[static_cast<std::size_t>(i) - 1];
      S bj = (j == 0) ? S(1) : b[static_cast<std::size_t>(j) - 1];
      acc += w * ai * bj;
    }
    c[static_cast<std::size_t>(k) - 1] = acc;
  }
  return c;
}

// Free cumulants from moments via the non-crossing recursion
// kappa_j = m_j - sum over proper sigma in NC(j) of kappa_sigma.
template <class S>
std::vector<S> free_cumulants_from_moments(const std::vector<S>& m) {
  int ell = static_cast<int>(m.size());
  detail::check_cumulant_order<S>(ell);
  std::vector<S> kappa(m.size(), S(0));
  for (int j = 1; j <= ell; ++j) {
    S acc = m[static_cast<std::size_t>(j) - 1];
    for (const auto& [sizes, nb] : detail::proper_noncrossing_shapes(j))
      acc -= detail::kappa_product(sizes, nb, kappa);
    kappa[static_cast<std::size_t>(j) - 1] = acc;
  }
  return kappa;
}

// kappa_j^k(d_{k|N} p) = (k/N)^(j-1) kappa_j^N(p), truncated to min(k, length).
template <class S>
std::vector<S> derivative_cumulant_map(const std::vector<S>& kappa, long long n, int k) {
  if (k < 1) throw std::invalid_argument("derivative_cumulant_map: k must be positive");
  std::size_t len = std::min<std::size_t>(kappa.size(), static_cast<std::size_t>(k));
  std::vector<S> out(len);
  S ratio = S(k) / S(n);
  S factor(1);
  for (std::size_t j = 0; j < len; ++j) {
    out[j] = factor * kappa[j];
    factor *= ratio;
  }
  return out;
}

// ---- Polynomial-level wrappers (double precision) ----

inline CumulantVector finite_free_cumulants(const Polynomial& p, int ell) {
  auto a = top_coefficients(p, ell);
  return CumulantVector(p.degree(), coeffs_to_cumulants(a, p.degree()));
}

inline CumulantVector derivative_cumulant_map(const CumulantVector& kappa, int k) {
  return CumulantVector(k, derivative_cumulant_map(kappa.values, kappa.degree, k));
}

inline Polynomial finite_free_convolve(const Polynomial& p, const Polynomial& q) {
  if (p.degree() != q.degree()) throw std::invalid_argument("finite_free_convolve: degree mismatch");
  int n = p.degree();
  auto c = convolve_prefix(top_coefficients(p, n), top_coefficients(q, n), n, n);
  return Polynomial::with_coeff_prefix(n, std::move(c));
}

inline TruncatedSeries<double> fourier_series_of(const Polynomial& p, int m) {
  return fourier_series_of(top_coefficients(p, std::max(m, 1)), p.degree(), m);
}

inline TruncatedSeries<double> finite_R_transform(const Polynomial& p, int m) {
  return finite_R_transform(top_coefficients(p, m), p.degree(), m);
}

inline Polynomial series_apply(const TruncatedSeries<double>& f, int ell) {
  return Polynomial::with_coeff_prefix(ell, series_apply_prefix(f, ell));
}

inline std::vector<double> free_cumulants_from_moments(const MomentVector& m) {
  return free_cumulants_from_moments(m.values);
}

}  // namespace ffp
