#pragma once

#include <stdexcept>
#include <vector>

namespace ffp {

// Formal power series c_0 + c_1 s + ... + c_m s^m, all arithmetic mod s^(m+1).
// S is double for the Monte Carlo paths and Rational for identity testing.
template <class S>
class TruncatedSeries {
 public:
  explicit TruncatedSeries(int order) : c_(static_cast<std::size_t>(order) + 1, S(0)) {
    if (order < 0) throw std::invalid_argument("TruncatedSeries: negative order");
  }

  TruncatedSeries(std::vector<S> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw std::invalid_argument("TruncatedSeries: empty coefficient list");
  }

  static TruncatedSeries one(int order) {
    TruncatedSeries f(order);
    f.c_[0] = S(1);
    return f;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<S>& coefficients() const { return c_; }
  const S& operator[](int j) const { return c_[static_cast<std::size_t>(j)]; }
  S& operator[](int j) { return c_[static_cast<std::size_t>(j)]; }

  TruncatedSeries truncated(int new_order) const {
    if (new_order < 0) throw std::invalid_argument("truncated: negative order");
    TruncatedSeries out(new_order);
    int m = new_order < order() ? new_order : order();
    for (int j = 0; j <= m; ++j) out.c_[static_cast<std::size_t>(j)] = c_[static_cast<std::size_t>(j)];
    return out;
  }

  TruncatedSeries& operator+=(const TruncatedSeries& o) {
    check_order(o);
    for (std::size_t j = 0; j < c_.size(); ++j) c_[j] += o.c_[j];
    return *this;
  }

  TruncatedSeries& operator-=(const TruncatedSeries& o) {
    check_order(o);
    for (std::size_t j = 0; j < c_.size(); ++j) c_[j] -= o.c_[j];
    return *this;
  }

  friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
  friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }

  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    a.check_order(b);
    TruncatedSeries out(a.order());
    for (int i = 0; i <= a.order(); ++i) {
      if (a[i] == S(0)) continue;
      for (int j = 0; i + j <= a.order(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
  }

  TruncatedSeries operator-() const {
    TruncatedSeries out = *this;
    for (auto& v : out.c_) v = -v;
    return out;
  }

  friend TruncatedSeries operator*(const S& s, TruncatedSeries a) {
    for (auto& v : a.c_) v *= s;
    return a;
  }

  // s -> a*s, i.e. c_j -> a^j c_j.
  TruncatedSeries with_scaled_argument(const S& a) const {
    TruncatedSeries out = *this;
    S pw(1);
    for (int j = 1; j <= order(); ++j) {
      pw *= a;
      out[j] *= pw;
    }
    return out;
  }

  TruncatedSeries derivative() const {
    if (order() == 0) return TruncatedSeries(0);
    TruncatedSeries out(order() - 1);
    for (int j = 1; j <= order(); ++j) out[j - 1] = S(j) * c_[static_cast<std::size_t>(j)];
    return out;
  }

  // Antiderivative with zero constant term; gains one order.
  TruncatedSeries antiderivative() const {
    TruncatedSeries out(order() + 1);
    for (int j = 0; j <= order(); ++j) out[j + 1] = c_[static_cast<std::size_t>(j)] / S(j + 1);
    return out;
  }

 private:
  void check_order(const TruncatedSeries& o) const {
    if (o.order() != order()) throw std::invalid_argument("TruncatedSeries: order mismatch");
  }

  std::vector<S> c_;
};

template <class S>
TruncatedSeries<S> reciprocal(const TruncatedSeries<S>& f) {
  if (f[0] == S(0)) throw std::invalid_argument("reciprocal: constant term is zero");
  TruncatedSeries<S> r(f.order());
  r[0] = S(1) / f[0];
  for (int k = 1; k <= f.order(); ++k) {
    S acc(0);
    for (int i = 1; i <= k; ++i) acc += f[i] * r[k - i];
    r[k] = -acc / f[0];
  }
  return r;
}

// exp of a series with zero constant term, via g' = f' g.
template <class S>
TruncatedSeries<S> exp_series(const TruncatedSeries<S>& f) {
  if (f[0] != S(0)) throw std::invalid_argument("exp_series: constant term must be zero");
  TruncatedSeries<S> g(f.order());
  g[0] = S(1);
  for (int k = 1; k <= f.order(); ++k) {
    S acc(0);
    for (int i = 1; i <= k; ++i) acc += S(i) * f[i] * g[k - i];
    g[k] = acc / S(k);
  }
  return g;
}

// log of a series with unit constant term.
template <class S>
TruncatedSeries<S> log_series(const TruncatedSeries<S>& f) {
  if (f[0] != S(1)) throw std::invalid_argument("log_series: constant term must be one");
  TruncatedSeries<S> h(f.order());
  for (int k = 1; k <= f.order(); ++k) {
    S acc(0);
    for (int i = 1; i < k; ++i) acc += S(i) * h[i] * f[k - i];
    h[k] = f[k] - acc / S(k);
  }
  return h;
}

}  // namespace ffp
