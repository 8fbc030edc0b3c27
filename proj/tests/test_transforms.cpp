#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "ffp/families.hpp"
#include "ffp/polynomial.hpp"
#include "ffp/rng.hpp"
#include "ffp/roots.hpp"
#include "ffp/transforms.hpp"

using namespace ffp;

namespace {

Rational binom(long long n, int k) { return Rational(falling_factorial(n, k), factorial(k)); }

std::vector<Rational> random_integer_prefix(int n, RngStream& rng, std::vector<Rational>* roots_out = nullptr) {
  std::vector<Rational> roots(static_cast<std::size_t>(n));
  for (auto& r : roots) r = Rational(static_cast<long long>(rng.next_u64() % 13) - 6);
  if (roots_out) *roots_out = roots;
  return elementary_symmetric_prefix(roots, n);
}

std::vector<Rational> hermite_prefix(int ell) {
  auto c = hermite_signed_coefficients<Rational>(ell);
  std::vector<Rational> a(c.size() - 1);
  for (std::size_t j = 1; j < c.size(); ++j) a[j - 1] = (j % 2 == 0 ? c[j] : -c[j]);
  return a;
}

// p(x - c) on an exact prefix: a'_m = sum_j binom(N-j, m-j) c^(m-j) a_j.
std::vector<Rational> shifted_prefix(const std::vector<Rational>& a, long long n, const Rational& c) {
  std::vector<Rational> out(a.size());
  for (std::size_t m = 1; m <= a.size(); ++m) {
    Rational acc(0);
    for (std::size_t j = 0; j <= m; ++j) {
      Rational aj = (j == 0) ? Rational(1) : a[j - 1];
      acc += binom(n - static_cast<long long>(j), static_cast<int>(m - j)) *
             scalar_pow(c, static_cast<int>(m - j)) * aj;
    }
    out[m - 1] = acc;
  }
  return out;
}

}  // namespace

TEST_CASE("cumulants to coefficients", "[transforms]") {
  // kappa = (a, 0, ..., 0) is the point mass (x-a)^N
  std::vector<Rational> point(5, Rational(0));
  point[0] = Rational(3);
  auto a = cumulants_to_coeffs(point, 7, 5);
  for (int k = 1; k <= 5; ++k) REQUIRE(a[static_cast<std::size_t>(k) - 1] == binom(7, k) * scalar_pow(Rational(3), k));

  // kappa = (0, ell, 0, ..., 0) at N = ell are the Hermite coefficients
  for (int ell = 2; ell <= 8; ++ell) {
    std::vector<Rational> kappa(static_cast<std::size_t>(ell), Rational(0));
    kappa[1] = Rational(ell);
    REQUIRE(cumulants_to_coeffs(kappa, ell, ell) == hermite_prefix(ell));
  }

  std::vector<Rational> zero(4, Rational(0));
  for (const auto& v : cumulants_to_coeffs(zero, 9, 4)) REQUIRE(v == Rational(0));

  CHECK_THROWS_AS(cumulants_to_coeffs(zero, 3, 4), std::invalid_argument);
  CHECK_THROWS_AS(cumulants_to_coeffs(std::vector<Rational>(13, Rational(0)), 20, 13), std::invalid_argument);
}

TEST_CASE("coefficients to cumulants", "[transforms]") {
  // (x-a)^N
  std::vector<Rational> a(6);
  for (int k = 1; k <= 6; ++k) a[static_cast<std::size_t>(k) - 1] = binom(6, k) * scalar_pow(Rational(-2), k);
  auto kappa = coeffs_to_cumulants(a, 6);
  REQUIRE(kappa[0] == Rational(-2));
  for (int j = 2; j <= 6; ++j) REQUIRE(kappa[static_cast<std::size_t>(j) - 1] == Rational(0));

  // He_4 -> (0, 4, 0, 0)
  auto he4 = coeffs_to_cumulants(hermite_prefix(4), 4);
  REQUIRE(he4 == std::vector<Rational>{Rational(0), Rational(4), Rational(0), Rational(0)});

  std::vector<Rational> zero(5, Rational(0));
  for (const auto& v : coeffs_to_cumulants(zero, 8)) REQUIRE(v == Rational(0));
}

TEST_CASE("differential-operator series of a polynomial", "[transforms]") {
  // (x-a)^N gives the truncated exponential e^(-au)
  std::vector<Rational> a(5);
  for (int k = 1; k <= 5; ++k) a[static_cast<std::size_t>(k) - 1] = binom(9, k) * scalar_pow(Rational(2), k);
  auto p = fourier_series_of(a, 9, 5);
  REQUIRE(p[0] == Rational(1));
  for (int j = 1; j <= 5; ++j)
    REQUIRE(p[j] == scalar_pow(Rational(-2), j) / Rational(factorial(j)));

  // x^N -> 1
  std::vector<Rational> zero(4, Rational(0));
  auto one = fourier_series_of(zero, 4, 4);
  REQUIRE(one[0] == Rational(1));
  for (int j = 1; j <= 4; ++j) REQUIRE(one[j] == Rational(0));

  // He_2 -> 1 - u^2/2
  auto he2 = fourier_series_of(hermite_prefix(2), 2, 2);
  REQUIRE(he2[1] == Rational(0));
  REQUIRE(he2[2] == Rational(-1, 2));

  CHECK_THROWS_AS(fourier_series_of(zero, 4, 5), std::invalid_argument);
}

TEST_CASE("finite R-transform reads off the cumulants", "[transforms]") {
  // (x-a)^N -> constant a
  std::vector<Rational> a(4);
  for (int k = 1; k <= 4; ++k) a[static_cast<std::size_t>(k) - 1] = binom(6, k) * scalar_pow(Rational(5), k);
  auto r = finite_R_transform(a, 6, 4);
  REQUIRE(r[0] == Rational(5));
  for (int j = 1; j <= 3; ++j) REQUIRE(r[j] == Rational(0));

  // He_ell -> ell * s
  for (int ell = 2; ell <= 6; ++ell) {
    auto rh = finite_R_transform(hermite_prefix(ell), ell, ell);
    REQUIRE(rh[0] == Rational(0));
    REQUIRE(rh[1] == Rational(ell));
    for (int j = 2; j < ell; ++j) REQUIRE(rh[j] == Rational(0));
  }

  // x^N -> 0
  std::vector<Rational> zero(5, Rational(0));
  auto rz = finite_R_transform(zero, 5, 5);
  for (int j = 0; j <= 4; ++j) REQUIRE(rz[j] == Rational(0));
}

TEST_CASE("series_apply produces monic Appell images", "[transforms]") {
  TruncatedSeries<Rational> one = TruncatedSeries<Rational>::one(4);
  auto xell = series_apply_prefix(one, 4);
  for (const auto& v : xell) REQUIRE(v == Rational(0));

  TruncatedSeries<Rational> gauss(2);
  gauss[0] = Rational(1);
  gauss[2] = Rational(-1, 2);
  auto he2 = series_apply_prefix(gauss, 2);
  REQUIRE(he2 == hermite_prefix(2));

  TruncatedSeries<Rational> sq(3);
  sq[0] = Rational(1);
  sq[1] = Rational(-2);
  sq[2] = Rational(1);
  auto lag = series_apply_prefix(sq, 3);  // (1-d/dx)^2 x^3 = x^3 - 6x^2 + 6x
  REQUIRE(lag == std::vector<Rational>{Rational(6), Rational(6), Rational(0)});

  TruncatedSeries<Rational> bad(3);
  bad[0] = Rational(2);
  CHECK_THROWS_AS(series_apply_prefix(bad, 3), std::invalid_argument);
  CHECK_THROWS_AS(series_apply_prefix(gauss, 3), std::invalid_argument);
}

TEST_CASE("finite free convolution against hand values", "[transforms]") {
  // p boxplus x^N = p
  std::vector<Rational> a{Rational(2), Rational(1)};
  std::vector<Rational> zero(2, Rational(0));
  REQUIRE(convolve_prefix(a, zero, 2, 2) == a);

  // (x-1)^2 boxplus (x^2-1) = x^2 - 2x
  std::vector<Rational> b{Rational(0), Rational(-1)};
  auto c = convolve_prefix(a, b, 2, 2);
  REQUIRE(c == std::vector<Rational>{Rational(2), Rational(0)});

  CHECK_THROWS_AS(finite_free_convolve(hermite(2), hermite(3)), std::invalid_argument);

  // He_ell boxplus He_ell carries cumulants (0, 2 ell, 0, ...)
  for (int ell : {3, 5}) {
    auto he = hermite_prefix(ell);
    auto kappa = coeffs_to_cumulants(convolve_prefix(he, he, ell, ell), ell);
    REQUIRE(kappa[1] == Rational(2 * ell));
    for (int j = 1; j <= ell; ++j)
      if (j != 2) REQUIRE(kappa[static_cast<std::size_t>(j) - 1] == Rational(0));
  }
}

TEST_CASE("free cumulants from moments via the non-crossing recursion", "[transforms]") {
  std::vector<Rational> point{Rational(3), Rational(9), Rational(27)};
  REQUIRE(free_cumulants_from_moments(point) ==
          std::vector<Rational>{Rational(3), Rational(0), Rational(0)});

  std::vector<Rational> semicircle{Rational(0), Rational(1), Rational(0), Rational(2)};
  REQUIRE(free_cumulants_from_moments(semicircle) ==
          std::vector<Rational>{Rational(0), Rational(1), Rational(0), Rational(0)});

  std::vector<Rational> m{Rational(0), Rational(1), Rational(0), Rational(7)};
  auto k = free_cumulants_from_moments(m);
  REQUIRE(k[3] == Rational(5));  // kappa_4 = m_4 - 2
}

TEST_CASE("derivative cumulant map", "[transforms]") {
  std::vector<Rational> kappa{Rational(5), Rational(1), Rational(2), Rational(3)};
  auto mapped = derivative_cumulant_map(kappa, 8, 4);
  REQUIRE(mapped[0] == Rational(5));  // j=1 entry always unchanged
  REQUIRE(mapped[1] == Rational(1) * Rational(4, 8));
  REQUIRE(mapped[2] == Rational(2) * Rational(1, 4));

  // k = N is the identity
  REQUIRE(derivative_cumulant_map(kappa, 4, 4) == kappa);

  // semicircle-type example at k = N/2
  std::vector<Rational> semi{Rational(0), Rational(1), Rational(0)};
  auto half = derivative_cumulant_map(semi, 8, 4);
  REQUIRE(half[1] == Rational(1, 2));

  CHECK_THROWS_AS(derivative_cumulant_map(kappa, 8, 0), std::invalid_argument);

  CumulantVector cv(8, {0.0, 1.0, 0.5});
  auto cv2 = derivative_cumulant_map(cv, 4);
  CHECK(cv2.degree == 4);
  CHECK(cv2.kappa(2) == Approx(0.5));
}

TEST_CASE("cumulant routes agree exactly on random integer-rooted polynomials", "[transforms]") {
  RngStream rng(12345, 0);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 2 + static_cast<int>(rng.next_u64() % 9);  // N <= 10
    auto a = random_integer_prefix(n, rng);
    auto inversion = coeffs_to_cumulants(a, n);
    auto read_off = cumulants_via_r_transform(a, n, n);
    REQUIRE(inversion == read_off);

    // and both directions are mutually inverse, through both builders
    REQUIRE(cumulants_to_coeffs(inversion, n, n) == a);
    REQUIRE(coeffs_via_r_series(inversion, n, n) == a);
  }
}

TEST_CASE("convolution routes agree exactly", "[transforms]") {
  RngStream rng(777, 0);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 2 + static_cast<int>(rng.next_u64() % 9);
    auto a = random_integer_prefix(n, rng);
    auto b = random_integer_prefix(n, rng);
    auto direct = convolve_prefix(a, b, n, n);

    auto pq = fourier_series_of(a, n, n) * fourier_series_of(b, n, n);
    auto via_series = series_apply_prefix(pq, n);
    REQUIRE(direct == via_series);

    // additivity of finite free cumulants
    auto ka = coeffs_to_cumulants(a, n);
    auto kb = coeffs_to_cumulants(b, n);
    auto kc = coeffs_to_cumulants(direct, n);
    for (std::size_t j = 0; j < ka.size(); ++j) REQUIRE(kc[j] == ka[j] + kb[j]);
  }
}

TEST_CASE("convolving with a point mass shifts the roots", "[transforms]") {
  RngStream rng(4242, 0);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 2 + static_cast<int>(rng.next_u64() % 7);
    auto q = random_integer_prefix(n, rng);
    Rational shift(static_cast<long long>(rng.next_u64() % 9) - 4);
    std::vector<Rational> point(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) point[static_cast<std::size_t>(k) - 1] = binom(n, k) * scalar_pow(shift, k);
    // exact route: prefix of q(x - shift)
    REQUIRE(convolve_prefix(point, q, n, n) == shifted_prefix(q, n, shift));
  }
}

TEST_CASE("derivative map matches the actual derivative, exactly", "[transforms]") {
  RngStream rng(2718, 0);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 2 + static_cast<int>(rng.next_u64() % 7);  // N <= 8
    auto a = random_integer_prefix(n, rng);
    auto kappa_n = coeffs_to_cumulants(a, n);
    for (int k = 1; k <= n; ++k) {
      auto derived = coeffs_to_cumulants(normalized_derivative_prefix(a, n, k), k);
      auto mapped = derivative_cumulant_map(kappa_n, n, k);
      REQUIRE(derived == mapped);
    }
  }
}

TEST_CASE("cumulants are homogeneous under dilation, exactly", "[transforms]") {
  RngStream rng(1618, 0);
  for (int trial = 0; trial < 15; ++trial) {
    int n = 2 + static_cast<int>(rng.next_u64() % 7);
    auto a = random_integer_prefix(n, rng);
    Rational lam(1 + static_cast<long long>(rng.next_u64() % 5), 1 + static_cast<long long>(rng.next_u64() % 3));
    std::vector<Rational> dilated(a.size());
    Rational pw(1);
    for (std::size_t j = 0; j < a.size(); ++j) {
      pw *= lam;
      dilated[j] = pw * a[j];
    }
    auto k0 = coeffs_to_cumulants(a, n);
    auto k1 = coeffs_to_cumulants(dilated, n);
    Rational expect(1);
    for (std::size_t j = 0; j < k0.size(); ++j) {
      expect *= lam;
      REQUIRE(k1[j] == expect * k0[j]);
    }
  }
}

TEST_CASE("finite and free cumulants drift apart at rate 1/N", "[transforms]") {
  // Same empirical moments, two cumulant notions; the gap halves when N
  // doubles. Rademacher roots keep every quantity O(1).
  auto gap = [](long long n, std::uint64_t seed) {
    RngStream rng(seed, 0);
    double total = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> roots(static_cast<std::size_t>(n));
      for (auto& r : roots) r = rng.next_bool(0.5) ? 1.0 : -1.0;
      auto p = from_roots(roots);
      auto finite = coeffs_to_cumulants(top_coefficients(p, 4), n);
      auto free = free_cumulants_from_moments(moments(p, 4).values);
      double d = 0.0;
      for (int j = 2; j <= 4; ++j)
        d += std::abs(finite[static_cast<std::size_t>(j) - 1] - free[static_cast<std::size_t>(j) - 1]);
      total += d;
    }
    return total / 100.0;
  };
  double at_n = gap(100, 555);
  double at_2n = gap(200, 556);
  REQUIRE(at_n / at_2n >= 1.5);
}

TEST_CASE("golden coefficient fixture from hand evaluation", "[transforms]") {
  // kappa = (1/2, 1/3, 1/4) at N = 5, coefficients worked out by hand from
  // the partition sum; fixtures in numerator/denominator form.
  std::vector<Rational> kappa{rational_from_string("1/2"), rational_from_string("1/3"),
                              rational_from_string("1/4")};
  auto a = cumulants_to_coeffs(kappa, 5, 3);
  const char* expected[] = {"5/2", "11/6", "9/20"};
  for (int k = 0; k < 3; ++k) REQUIRE(rational_to_string(a[static_cast<std::size_t>(k)]) == expected[k]);
  // and the inverse returns the fixture cumulants
  auto back = coeffs_to_cumulants(a, 5);
  REQUIRE(rational_to_string(back[0]) == "1/2");
  REQUIRE(rational_to_string(back[1]) == "1/3");
  REQUIRE(rational_to_string(back[2]) == "1/4");
}

TEST_CASE("cumulant vector invariants", "[transforms]") {
  CHECK_THROWS_AS(CumulantVector(2, {0.0, 1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(CumulantVector(4, {}), std::invalid_argument);
  auto he4 = finite_free_cumulants(hermite(4), 4);
  CHECK(he4.degree == 4);
  CHECK(he4.kappa(2) == Approx(4.0));
}
