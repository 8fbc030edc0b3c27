#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ffp {

// Coefficient convention used throughout: a monic degree-N polynomial is
// stored through the prefix (a_1..a_k) of p(x) = x^N + sum_j (-1)^j a_j x^(N-j),
// so a_j is the j-th elementary symmetric function of the roots. Signed
// coefficient vectors [1, c_1, ..., c_N] with c_j = (-1)^j a_j appear only at
// the I/O boundary.

// Newton's identities, e_1..e_k from power sums p_1..p_k. Templated so the
// exact-rational oracles share the one implementation.
template <class S>
std::vector<S> elementary_from_power_sums(const std::vector<S>& p) {
  std::vector<S> e(p.size() + 1, S(0));
  e[0] = S(1);
  for (std::size_t j = 1; j <= p.size(); ++j) {
    S acc(0);
    for (std::size_t i = 1; i <= j; ++i) {
      S term = e[j - i] * p[i - 1];
      if (i % 2 == 0) acc -= term;
      else acc += term;
    }
    e[j] = acc / S(static_cast<long long>(j));
  }
  return std::vector<S>(e.begin() + 1, e.end());
}

// Inverse direction: p_1..p_k from e_1..e_k (k <= N assumed by the caller).
template <class S>
std::vector<S> power_sums_from_elementary(const std::vector<S>& e) {
  std::vector<S> p(e.size(), S(0));
  for (std::size_t j = 1; j <= e.size(); ++j) {
    S acc = (j % 2 == 0 ? S(-1) : S(1)) * S(static_cast<long long>(j)) * e[j - 1];
    for (std::size_t i = 1; i < j; ++i) {
      S term = e[i - 1] * p[j - i - 1];
      if (i % 2 == 0) acc -= term;
      else acc += term;
    }
    p[j - 1] = acc;
  }
  return p;
}

// Direct DP over the roots; the independent route used by test oracles.
template <class S>
std::vector<S> elementary_symmetric_prefix(const std::vector<S>& roots, int k) {
  if (k < 0 || static_cast<std::size_t>(k) > roots.size())
    throw std::invalid_argument("elementary_symmetric_prefix: k out of range");
  std::vector<S> e(static_cast<std::size_t>(k) + 1, S(0));
  e[0] = S(1);
  std::size_t used = 0;
  for (const S& r : roots) {
    ++used;
    std::size_t top = used < static_cast<std::size_t>(k) ? used : static_cast<std::size_t>(k);
    for (std::size_t j = top; j >= 1; --j) e[j] += r * e[j - 1];
  }
  return std::vector<S>(e.begin() + 1, e.end());
}

struct MomentVector {
  int degree = 0;                // ambient polynomial degree N
  std::vector<double> values;    // m_1..m_ell

  MomentVector() = default;
  MomentVector(int deg, std::vector<double> v) : degree(deg), values(std::move(v)) {
    if (values.empty()) throw std::invalid_argument("MomentVector: needs at least m_1");
    if (values.size() >= 2) {
      double slack = 1e-9 * (1.0 + std::abs(values[1]) + values[0] * values[0]);
      if (values[1] + slack < values[0] * values[0])
        throw std::invalid_argument("MomentVector: m_2 < m_1^2 (not an empirical root measure)");
    }
  }

  int length() const { return static_cast<int>(values.size()); }
  double m(int j) const { return values.at(static_cast<std::size_t>(j) - 1); }
};

// a_1..a_k of the monic polynomial with the given roots, by Newton's
// identities on compensated power sums.
inline std::vector<double> top_coefficients_from_roots(const std::vector<double>& roots, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > roots.size())
    throw std::invalid_argument("top_coefficients: k out of range");
  std::vector<double> pow_sums(static_cast<std::size_t>(k), 0.0);
  for (int j = 1; j <= k; ++j) {
    double acc = 0.0, comp = 0.0;
    for (double r : roots) {
      double term = 1.0;
      for (int t = 0; t < j; ++t) term *= r;
      double y = term - comp;
      double s = acc + y;
      comp = (s - acc) - y;
      acc = s;
    }
    pow_sums[static_cast<std::size_t>(j) - 1] = acc;
  }
  return elementary_from_power_sums(pow_sums);
}

class Polynomial {
 public:
  static Polynomial with_roots(std::vector<double> roots) {
    if (roots.empty()) throw std::invalid_argument("Polynomial: empty root list");
    std::sort(roots.begin(), roots.end(), std::greater<double>());
    Polynomial p;
    p.n_ = static_cast<int>(roots.size());
    p.roots_ = std::move(roots);
    return p;
  }

  static Polynomial with_coeff_prefix(int degree, std::vector<double> prefix) {
    if (degree < 1) throw std::invalid_argument("Polynomial: degree must be positive");
    if (prefix.empty() || static_cast<int>(prefix.size()) > degree)
      throw std::invalid_argument("Polynomial: prefix length must be in [1, degree]");
    Polynomial p;
    p.n_ = degree;
    p.prefix_ = std::move(prefix);
    return p;
  }

  // Dual representation; the prefix must agree with the elementary symmetric
  // functions of the roots to within the conversion tolerance.
  static Polynomial with_roots_and_prefix(std::vector<double> roots, std::vector<double> prefix) {
    Polynomial p = with_roots(std::move(roots));
    if (prefix.empty() || static_cast<int>(prefix.size()) > p.n_)
      throw std::invalid_argument("Polynomial: prefix length must be in [1, degree]");
    auto derived = top_coefficients_from_roots(p.roots(), static_cast<int>(prefix.size()));
    for (std::size_t j = 0; j < prefix.size(); ++j) {
      double scale = 1.0 + std::abs(derived[j]) + std::abs(prefix[j]);
      if (std::abs(derived[j] - prefix[j]) > 1e-8 * scale)
        throw std::invalid_argument("Polynomial: stored prefix disagrees with the roots");
    }
    p.prefix_ = std::move(prefix);
    return p;
  }

  int degree() const { return n_; }
  bool has_roots() const { return roots_.has_value(); }
  const std::vector<double>& roots() const {
    if (!roots_) throw std::invalid_argument("Polynomial: roots not available");
    return *roots_;
  }
  // May be shorter than the degree; empty when only roots are stored.
  const std::vector<double>& stored_prefix() const { return prefix_; }

 private:
  Polynomial() = default;
  int n_ = 0;
  std::optional<std::vector<double>> roots_;
  std::vector<double> prefix_;  // a_1..a_k
};

inline Polynomial from_roots(std::vector<double> roots) { return Polynomial::with_roots(std::move(roots)); }

// a_1..a_k from power sums of the stored roots, or straight from the stored
// prefix. Per the module contract this never expands the full degree-N product.
inline std::vector<double> top_coefficients(const Polynomial& p, int k) {
  if (k < 1 || k > p.degree()) throw std::invalid_argument("top_coefficients: k out of range");
  if (!p.has_roots()) {
    if (static_cast<int>(p.stored_prefix().size()) < k)
      throw std::invalid_argument("top_coefficients: prefix shorter than k and roots absent");
    return std::vector<double>(p.stored_prefix().begin(), p.stored_prefix().begin() + k);
  }
  if (static_cast<int>(p.stored_prefix().size()) >= k)
    return std::vector<double>(p.stored_prefix().begin(), p.stored_prefix().begin() + k);
  return top_coefficients_from_roots(p.roots(), k);
}

inline MomentVector moments(const Polynomial& p, int ell) {
  if (ell < 1 || ell > p.degree()) throw std::invalid_argument("moments: order out of range");
  double n = static_cast<double>(p.degree());
  std::vector<double> m(static_cast<std::size_t>(ell), 0.0);
  if (p.has_roots()) {
    for (int j = 1; j <= ell; ++j) {
      double acc = 0.0;
      for (double r : p.roots()) acc += std::pow(r, j);
      m[static_cast<std::size_t>(j) - 1] = acc / n;
    }
    return MomentVector(p.degree(), std::move(m));
  }
  if (static_cast<int>(p.stored_prefix().size()) < ell)
    throw std::invalid_argument("moments: order exceeds stored coefficient prefix");
  std::vector<double> e(p.stored_prefix().begin(), p.stored_prefix().begin() + ell);
  auto pow_sums = power_sums_from_elementary(e);
  for (int j = 0; j < ell; ++j) m[static_cast<std::size_t>(j)] = pow_sums[static_cast<std::size_t>(j)] / n;
  return MomentVector(p.degree(), std::move(m));
}

inline Polynomial dilate(const Polynomial& p, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("dilate: factor must be positive");
  if (p.has_roots()) {
    std::vector<double> r = p.roots();
    for (double& x : r) x *= a;
    return Polynomial::with_roots(std::move(r));
  }
  std::vector<double> pre = p.stored_prefix();
  double pw = 1.0;
  for (auto& v : pre) {
    pw *= a;
    v *= pw;
  }
  return Polynomial::with_coeff_prefix(p.degree(), std::move(pre));
}

inline Polynomial shift_roots(const Polynomial& p, double c) {
  if (p.has_roots()) {
    std::vector<double> r = p.roots();
    for (double& x : r) x += c;
    return Polynomial::with_roots(std::move(r));
  }
  // p(x - c) in prefix form: a'_m = sum_{j<=m} binom(N-j, m-j) c^(m-j) a_j.
  const auto& a = p.stored_prefix();
  int k = static_cast<int>(a.size());
  long long n = p.degree();
  std::vector<double> out(a.size(), 0.0);
  for (int m = 1; m <= k; ++m) {
    double acc = 0.0;
    for (int j = 0; j <= m; ++j) {
      double binom = 1.0;
      for (int t = 0; t < m - j; ++t) binom *= static_cast<double>(n - j - t) / static_cast<double>(m - j - t);
      double aj = (j == 0) ? 1.0 : a[static_cast<std::size_t>(j) - 1];
      acc += binom * std::pow(c, m - j) * aj;
    }
    out[static_cast<std::size_t>(m) - 1] = acc;
  }
  return Polynomial::with_coeff_prefix(p.degree(), std::move(out));
}

// Templated prefix of the monic normalized derivative: b_j = a_j (k)_j / (N)_j.
// Depends only on a_1..a_k by construction.
template <class S>
std::vector<S> normalized_derivative_prefix(const std::vector<S>& a, long long n, int k) {
  if (k < 1 || k > n) throw std::invalid_argument("normalized_derivative: k out of range");
  if (static_cast<int>(a.size()) < k)
    throw std::invalid_argument("normalized_derivative: coefficient prefix shorter than k");
  std::vector<S> b(static_cast<std::size_t>(k));
  S ratio(1);
  for (int j = 1; j <= k; ++j) {
    ratio *= S(k - j + 1);
    ratio /= S(n - j + 1);
    b[static_cast<std::size_t>(j) - 1] = a[static_cast<std::size_t>(j) - 1] * ratio;
  }
  return b;
}

// Monic rescaling of the (N-k)-th derivative; the root set is what matters
// downstream, and cumulants and moments are defined for monic polynomials.
inline Polynomial normalized_derivative(const Polynomial& p, int k) {
  if (k < 1 || k > p.degree()) throw std::invalid_argument("normalized_derivative: k out of range");
  auto a = top_coefficients(p, k);
  auto b = normalized_derivative_prefix(a, p.degree(), k);
  return Polynomial::with_coeff_prefix(k, std::move(b));
}

// Full signed coefficient list [1, c_1, ..., c_N], highest degree first.
inline std::vector<double> signed_coefficients(const Polynomial& p) {
  auto a = top_coefficients(p, p.degree());
  std::vector<double> c(a.size() + 1);
  c[0] = 1.0;
  for (std::size_t j = 1; j <= a.size(); ++j) c[j] = (j % 2 == 0 ? a[j - 1] : -a[j - 1]);
  return c;
}

inline std::vector<double> prefix_from_signed(const std::vector<double>& c) {
  if (c.size() < 2) throw std::invalid_argument("prefix_from_signed: need degree >= 1");
  if (c[0] != 1.0) throw std::invalid_argument("prefix_from_signed: polynomial must be monic");
  std::vector<double> a(c.size() - 1);
  for (std::size_t j = 1; j < c.size(); ++j) a[j - 1] = (j % 2 == 0 ? c[j] : -c[j]);
  return a;
}

inline Polynomial from_signed_coefficients(const std::vector<double>& c) {
  auto a = prefix_from_signed(c);
  int degree = static_cast<int>(a.size());
  return Polynomial::with_coeff_prefix(degree, std::move(a));
}

inline double evaluate(const Polynomial& p, double x) {
  if (p.has_roots()) {
    double acc = 1.0;
    for (double r : p.roots()) acc *= (x - r);
    return acc;
  }
  if (static_cast<int>(p.stored_prefix().size()) != p.degree())
    throw std::invalid_argument("evaluate: full coefficient list required");
  auto c = signed_coefficients(p);
  double acc = 0.0;
  for (double cj : c) acc = acc * x + cj;
  return acc;
}

}  // namespace ffp
