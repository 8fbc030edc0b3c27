#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "ffp/distributions.hpp"
#include "ffp/experiments.hpp"
#include "ffp/families.hpp"
#include "ffp/point_process.hpp"
#include "ffp/rng.hpp"
#include "ffp/statistics.hpp"
#include "ffp/transforms.hpp"

using namespace ffp;

TEST_CASE("streams are deterministic and order-independent", "[randgen]") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());

  RngStream c(42, 8);
  bool differs = false;
  RngStream a2(42, 7);
  for (int i = 0; i < 10; ++i) differs = differs || (a2.next_u64() != c.next_u64());
  CHECK(differs);

  // draws of one stream do not perturb another
  RngStream s1(9, 1), s2(9, 2);
  double first = s2.next_unit();
  RngStream s1b(9, 1), s2b(9, 2);
  for (int i = 0; i < 5; ++i) s1b.next_unit();
  CHECK(s2b.next_unit() == first);

  auto r1 = sample_iid_roots(GaussianSpec{}, 50, a);
  RngStream a3(42, 7);
  for (int i = 0; i < 100; ++i) a3.next_u64();
  auto r2 = sample_iid_roots(GaussianSpec{}, 50, a3);
  CHECK(r1 == r2);
}

TEST_CASE("rademacher draws are signs with unit second moment", "[randgen]") {
  RngStream rng(1, 0);
  auto roots = sample_iid_roots(RademacherSpec{}, 400, rng);
  double m2 = 0.0;
  for (double r : roots) {
    REQUIRE((r == 1.0 || r == -1.0));
    m2 += r * r;
  }
  CHECK(m2 / 400.0 == 1.0);
}

TEST_CASE("scaled Bernoulli counts have Poisson-like mean and variance", "[randgen]") {
  RngStream rng(3, 0);
  const long long n = 1000;
  const int reps = 4000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < reps; ++i) {
    auto roots = sample_iid_roots(BernoulliScaledSpec{1.0}, n, rng);
    double count = 0.0;
    for (double r : roots) count += r;
    sum += count;
    sumsq += count * count;
  }
  double mean = sum / reps;
  double var = sumsq / reps - mean * mean;
  CHECK(mean == Approx(1.0).margin(0.06));
  CHECK(var == Approx(1.0).margin(0.12));

  // binomial shortcut agrees in law (TV over small counts)
  std::vector<double> direct, shortcut;
  for (int i = 0; i < 4000; ++i) {
    RngStream r1(55, static_cast<std::uint64_t>(i));
    auto roots = sample_iid_roots(BernoulliScaledSpec{1.0}, n, r1);
    double count = 0.0;
    for (double r : roots) count += r;
    direct.push_back(count);
    RngStream r2(56, static_cast<std::uint64_t>(i));
    shortcut.push_back(static_cast<double>(sample_bernoulli_count(BernoulliScaledSpec{1.0}, n, r2)));
  }
  std::vector<double> pmf(8, 0.0);
  for (double v : shortcut)
    if (v >= 0 && v <= 7) pmf[static_cast<std::size_t>(v)] += 1.0 / shortcut.size();
  CHECK(tv_on_integer_range(direct, pmf) < 0.05);
}

TEST_CASE("stable tails are calibrated", "[randgen]") {
  RngStream rng(8, 0);
  StableDomainSpec spec{1.5, 0.5, 1.0};
  const long long n = 100000;
  auto x = sample_iid_roots(spec, n, rng);
  for (double t : {2.0, 5.0, 10.0}) {
    double count = 0.0;
    for (double v : x)
      if (std::abs(v) >= t) count += 1.0;
    double expected = static_cast<double>(n) * std::pow(t, -1.5);
    CHECK(count / expected == Approx(1.0).margin(0.1));
  }
  // positivity fraction among large values approaches theta
  double pos = 0.0, tot = 0.0;
  for (double v : x)
    if (std::abs(v) >= 2.0) {
      tot += 1.0;
      if (v > 0) pos += 1.0;
    }
  CHECK(pos / tot == Approx(0.5).margin(0.02));
}

TEST_CASE("distribution validation names its bounds", "[randgen]") {
  CHECK_THROWS_WITH(validate(DistSpec{StableDomainSpec{2.5, 0.5, 1.0}}),
                    Catch::Contains("(0,2)"));
  CHECK_THROWS_AS(validate(DistSpec{StableDomainSpec{1.5, 1.5, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(DistSpec{UniformSpec{1.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(DistSpec{BernoulliScaledSpec{-1.0}}), std::invalid_argument);
  RngStream rng(1, 1);
  CHECK_THROWS_AS(sample_iid_roots(GaussianSpec{}, 0, rng), std::invalid_argument);
}

TEST_CASE("standardization", "[randgen]") {
  auto g = standardized(DistSpec{GaussianSpec{3.0, 4.0}});
  CHECK(std::get<GaussianSpec>(g).mean == 0.0);
  CHECK(std::get<GaussianSpec>(g).variance == 1.0);

  auto u = standardized(DistSpec{UniformSpec{0.0, 1.0}});
  const auto& us = std::get<UniformSpec>(u);
  CHECK(dist_mean(u) == Approx(0.0).margin(1e-15));
  CHECK(dist_variance(u) == Approx(1.0).epsilon(1e-12));
  CHECK(us.b > us.a);

  CHECK_THROWS_AS(standardized(DistSpec{StableDomainSpec{}}), std::invalid_argument);
  CHECK(standardized_fourth_moment(DistSpec{GaussianSpec{}}) == 3.0);
  CHECK(standardized_fourth_moment(DistSpec{RademacherSpec{}}) == 1.0);
  CHECK(standardized_fourth_moment(DistSpec{UniformSpec{}}) == Approx(1.8));
}

TEST_CASE("dist specs round trip through their tagged record", "[randgen]") {
  std::vector<DistSpec> specs{GaussianSpec{0.0, 1.0}, RademacherSpec{}, UniformSpec{-0.5, 2.0},
                              BernoulliScaledSpec{0.75}, StableDomainSpec{1.25, 0.3, 2.0}};
  for (const auto& s : specs) REQUIRE(dist_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(dist_from_string("cauchy(1)"), std::invalid_argument);
  CHECK_THROWS_AS(dist_from_string("stable(1.5)"), std::invalid_argument);
}

TEST_CASE("stable ladder magnitudes decrease and signs follow theta", "[randgen]") {
  RngStream rng(10, 0);
  auto pts = sample_stable_points(StableTail{1.5, 0.5, 1.0}, 2000, rng);
  for (std::size_t i = 0; i + 1 < pts.positive.size(); ++i) REQUIRE(pts.positive[i] >= pts.positive[i + 1]);
  for (std::size_t i = 0; i + 1 < pts.negative.size(); ++i) REQUIRE(pts.negative[i] <= pts.negative[i + 1]);
  CHECK(pts.positive.size() + pts.negative.size() == 2000);

  RngStream rng2(10, 1);
  auto all_pos = sample_stable_points(StableTail{1.5, 1.0, 1.0}, 500, rng2);
  CHECK(all_pos.negative.empty());
  CHECK(all_pos.positive.size() == 500);
}

TEST_CASE("stable point counts match the intensity", "[randgen]") {
  // E #{|pt| >= t} = t^(-alpha) for c = 1
  const double alpha = 1.5;
  for (double t : {0.5, 1.0, 2.0}) {
    double total = 0.0;
    const int reps = 10000;
    for (int i = 0; i < reps; ++i) {
      RngStream rng(600, static_cast<std::uint64_t>(i));
      auto pts = sample_stable_points(StableTail{alpha, 0.5, 1.0}, 64, rng);
      for (double v : pts.positive) total += (v >= t) ? 1.0 : 0.0;
      for (double v : pts.negative) total += (-v >= t) ? 1.0 : 0.0;
    }
    double expected = std::pow(t, -alpha);
    CHECK(total / reps == Approx(expected).margin(4.0 * std::sqrt(expected / reps) + 0.002));
  }
}

TEST_CASE("doubling the truncation moves Y and S_2 by less than the reported bounds", "[randgen]") {
  // |X_J - X_2J| <= |X_J - X| + |X - X_2J| <= bound_J + bound_2J, both
  // truncations riding the same ladder prefix.
  for (int i = 0; i < 20; ++i) {
    StableTail tail{1.5, 0.5, 1.0};
    LevyTriple triple{0.0, 0.0, tail};
    RngStream r1(700, static_cast<std::uint64_t>(i));
    auto p1 = sample_stable_points(tail, 4000, r1);
    RngStream r2(700, static_cast<std::uint64_t>(i));  // same stream: first 4000 points identical
    auto p2 = sample_stable_points(tail, 8000, r2);
    REQUIRE(p2.positive.size() + p2.negative.size() == 8000);

    RngStream g1(701, static_cast<std::uint64_t>(i)), g2(701, static_cast<std::uint64_t>(i));
    double y1 = assemble_Y(triple, p1, g1);
    double y2 = assemble_Y(triple, p2, g2);
    REQUIRE(std::abs(y2 - y1) <= p1.tail_bound_y + p2.tail_bound_y);
    REQUIRE(std::abs(p2.power_sum(2) - p1.power_sum(2)) <= p1.tail_bound_s[0] + p2.tail_bound_s[0]);
  }
}

TEST_CASE("atomic sampler realizes independent Poisson counts", "[randgen]") {
  std::vector<double> counts;
  for (int i = 0; i < 5000; ++i) {
    RngStream rng(800, static_cast<std::uint64_t>(i));
    auto pts = sample_atomic_points(AtomicMeasure{{{1.0, 1.0}}}, rng);
    for (double v : pts.positive) REQUIRE(v == 1.0);
    counts.push_back(static_cast<double>(pts.positive.size()));
  }
  CHECK(tv_on_integer_range(counts, poisson_pmf(1.0, 8)) < 0.03);

  RngStream rng(801, 0);
  auto none = sample_atomic_points(AtomicMeasure{}, rng);
  CHECK(none.positive.empty());
  CHECK(none.negative.empty());

  // two opposite atoms: S_2 = K_+ + K_-
  RngStream rng2(802, 0);
  auto two = sample_atomic_points(AtomicMeasure{{{1.0, 1.0}, {-1.0, 1.0}}}, rng2);
  CHECK(two.power_sum(2) == Approx(static_cast<double>(two.positive.size() + two.negative.size())));
}

TEST_CASE("compensators: atomic step function and totals", "[randgen]") {
  AtomicMeasure nu{{{1.0, 1.0}}};
  CHECK(compensator(nu, 1) == Approx(0.5));
  CHECK(compensator(nu, 2) == Approx(0.0));
  CHECK(compensator(nu, -1) == Approx(0.0));

  AtomicMeasure multi{{{2.0, 0.5}, {1.0, 1.25}, {-3.0, 0.75}}};
  double total_pos = 0.0, total_neg = 0.0;
  for (int j = 1; j <= 4; ++j) {
    total_pos += compensator(multi, j);
    total_neg += compensator(multi, -j);
  }
  CHECK(total_pos == Approx(0.5 * 2.0 / 5.0 + 1.25 * 0.5));
  CHECK(total_neg == Approx(-0.75 * 3.0 / 10.0));

  // stable side: adaptive quadrature vs a direct fine Riemann sum
  double c1 = stable_side_compensator(0.5, 1.5, 1);
  double riemann = 0.0;
  const int steps = 400000;
  for (int i = 0; i < steps; ++i) {
    double t = (i + 0.5) / steps;
    double u = std::pow(0.5 / t, 1.0 / 1.5);
    riemann += u / (1.0 + u * u) / steps;
  }
  CHECK(c1 == Approx(riemann).margin(1e-6));
}

TEST_CASE("assemble_Y: pure Gaussian triple returns the Gaussian part", "[randgen]") {
  LevyTriple triple{0.0, 1.0, AtomicMeasure{}};
  std::vector<double> ys;
  for (int i = 0; i < 2000; ++i) {
    RngStream rng(900, static_cast<std::uint64_t>(i));
    auto pts = sample_atomic_points(AtomicMeasure{}, rng);
    double y = assemble_Y(triple, pts, rng);
    REQUIRE(y == pts.gaussian_part);
    ys.push_back(y);
  }
  CHECK(sample_skewness(ys) == Approx(0.0).margin(0.2));
  CHECK(excess_kurtosis(ys) == Approx(0.0).margin(0.4));
}

TEST_CASE("assemble_Y: Poisson triple", "[randgen]") {
  // nu = lambda delta_1 with drift lambda/2 makes Y exactly the point count
  const double lambda = 2.0;
  LevyTriple triple{lambda / 2.0, 0.0, AtomicMeasure{{{1.0, lambda}}}};
  double mean = 0.0;
  const int reps = 10000;
  for (int i = 0; i < reps; ++i) {
    RngStream rng(901, static_cast<std::uint64_t>(i));
    auto pts = sample_atomic_points(std::get<AtomicMeasure>(triple.nu), rng);
    double y = assemble_Y(triple, pts, rng);
    REQUIRE(y == Approx(static_cast<double>(pts.positive.size())).margin(1e-12));
    mean += y;
  }
  mean /= reps;
  CHECK(mean == Approx(lambda).margin(3.0 * std::sqrt(lambda / reps)));
}

TEST_CASE("levy triples round trip and validate", "[randgen]") {
  LevyTriple atomic{0.5, 0.25, AtomicMeasure{{{1.0, 1.0}, {-2.0, 0.5}}}};
  REQUIRE(levy_triple_from_string(to_string(atomic)) == atomic);
  LevyTriple stable{0.0, 0.0, StableTail{1.5, 0.5, 1.0}};
  REQUIRE(levy_triple_from_string(to_string(stable)) == stable);

  CHECK_THROWS_AS(levy_triple_from_string("atomic(c=0,sigma2=0,atoms=[(0,1)])"), std::invalid_argument);
  CHECK_THROWS_AS(levy_triple_from_string("stable(c=0,sigma2=0,alpha=2.5,theta=0.5,scale=1)"),
                  std::invalid_argument);
  CHECK_THROWS_AS(levy_triple_from_string("stable(c=0,sigma2=-1,alpha=1.5,theta=0.5,scale=1)"),
                  std::invalid_argument);
}

TEST_CASE("log-derivative series of the random entire function", "[randgen]") {
  // no points, sigma = 1, Y = 0: f = exp(-s^2/2) and A_ell = He_ell
  auto r = f_log_derivative_series(0.0, 1.0, {0.0, 0.0, 0.0});
  auto f = exp_series(-r.antiderivative());
  for (int ell = 1; ell <= 4; ++ell) {
    auto a = series_apply_prefix(f.truncated(ell), ell);
    auto he = hermite_signed_coefficients<double>(ell);
    for (int j = 1; j <= ell; ++j)
      REQUIRE(a[static_cast<std::size_t>(j) - 1] ==
              Approx((j % 2 == 0 ? 1.0 : -1.0) * he[static_cast<std::size_t>(j)]).margin(1e-12));
  }

  // single unit point, sigma = 0, Y = 1: f = 1 - s, A_ell = x^ell - ell x^(ell-1)
  auto r2 = f_log_derivative_series(1.0, 0.0, {1.0, 1.0, 1.0});
  auto f2 = exp_series(-r2.antiderivative());
  CHECK(f2[0] == Approx(1.0));
  CHECK(f2[1] == Approx(-1.0));
  for (int j = 2; j <= 4; ++j) CHECK(f2[j] == Approx(0.0).margin(1e-12));
  auto a2 = series_apply_prefix(f2.truncated(3), 3);
  CHECK(a2[0] == Approx(3.0));
  CHECK(a2[1] == Approx(0.0).margin(1e-12));
  CHECK(a2[2] == Approx(0.0).margin(1e-12));

  // everything zero: f = 1, A_ell = x^ell
  auto r3 = f_log_derivative_series(0.0, 0.0, {0.0, 0.0});
  auto f3 = exp_series(-r3.antiderivative());
  for (int j = 0; j <= 3; ++j) CHECK(f3[j] == (j == 0 ? 1.0 : 0.0));
}

TEST_CASE("sparse Bernoulli second moments approach the atomic point process", "[randgen]") {
  // N m_2(q_N) for bernoulli_scaled(lambda) vs S_2 of the atomic sampler
  const double lambda = 1.0;
  const long long n = 2000;
  std::vector<double> nm2, s2;
  for (int i = 0; i < 5000; ++i) {
    RngStream r1(1100, static_cast<std::uint64_t>(i));
    auto roots = sample_iid_roots(BernoulliScaledSpec{lambda}, n, r1);
    double m2 = 0.0;
    for (double r : roots) m2 += r * r;
    nm2.push_back(m2);
    RngStream r2(1101, static_cast<std::uint64_t>(i));
    auto pts = sample_atomic_points(AtomicMeasure{{{1.0, lambda}}}, r2);
    s2.push_back(pts.power_sum(2));
  }
  CHECK(ks_two_sample(nm2, s2) < 0.05);
}

TEST_CASE("assembled Y matches iid partial sums at reduced scale", "[randgen]") {
  StableDomainSpec dist{1.5, 0.5, 1.0};
  LevyTriple triple{0.0, 0.0, StableTail{1.5, 0.5, 1.0}};
  auto yc = y_cross_validation(triple, dist, /*n_iid=*/20000, /*draws=*/2000, /*truncation=*/4000,
                               1200, /*jobs=*/0);
  CHECK(yc.ks < 0.06);
}

TEST_CASE("sampler precondition errors", "[randgen]") {
  RngStream rng(1, 2);
  CHECK_THROWS_AS(sample_iid_roots(BernoulliScaledSpec{10.0}, 5, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_stable_points(StableTail{1.5, 0.5, 1.0}, 0, rng), std::invalid_argument);
  CHECK_THROWS_AS(compensator(LevyMeasure{AtomicMeasure{{{1.0, 1.0}}}}, 0), std::invalid_argument);
}

TEST_CASE("appell series cumulants match the point process", "[randgen]") {
  // kappa_k^ell(A_ell) = Y, ell (sigma^2 + S_2), ell^(k-1) S_k
  RngStream rng(950, 0);
  auto pts = sample_stable_points(StableTail{1.2, 0.6, 1.0}, 3000, rng);
  LevyTriple triple{0.0, 0.0, StableTail{1.2, 0.6, 1.0}};
  double y = assemble_Y(triple, pts, rng);
  const int ell = 5;
  auto f = appell_series(y, triple.sigma2, pts.power_sums(ell));
  auto kappa = coeffs_to_cumulants(series_apply_prefix(f, ell), static_cast<long long>(ell));
  CHECK(kappa[0] == Approx(y).epsilon(1e-9));
  CHECK(kappa[1] == Approx(ell * pts.power_sum(2)).epsilon(1e-9));
  for (int k = 3; k <= ell; ++k)
    CHECK(kappa[static_cast<std::size_t>(k) - 1] ==
          Approx(std::pow(ell, k - 1) * pts.power_sum(k)).epsilon(1e-7).margin(1e-9));
}
