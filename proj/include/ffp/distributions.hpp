#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ffp/format.hpp"
#include "ffp/rng.hpp"

namespace ffp {

struct GaussianSpec {
  double mean = 0.0;
  double variance = 1.0;
  bool operator==(const GaussianSpec&) const = default;
};

struct RademacherSpec {
  bool operator==(const RademacherSpec&) const = default;
};

struct UniformSpec {
  double a = -1.7320508075688772;  // standardized: mean 0, variance 1
  double b = 1.7320508075688772;
  bool operator==(const UniformSpec&) const = default;
};

// Success value 1 with probability lambda/N; the root law of the sparse
// Bernoulli polynomials.
struct BernoulliScaledSpec {
  double lambda = 1.0;
  bool operator==(const BernoulliScaledSpec&) const = default;
};

// Two-sided pure Pareto tails: P(|X| >= t) = min(1, scale * t^-alpha),
// P(X > 0 | large) = theta. Exactly in the stable domain of attraction with
// the plain N^(-1/alpha) dilation.
struct StableDomainSpec {
  double alpha = 1.5;
  double theta = 0.5;
  double scale = 1.0;
  bool operator==(const StableDomainSpec&) const = default;
};

using DistSpec = std::variant<GaussianSpec, RademacherSpec, UniformSpec, BernoulliScaledSpec, StableDomainSpec>;

inline void validate(const DistSpec& spec) {
  if (const auto* g = std::get_if<GaussianSpec>(&spec)) {
    if (!(g->variance >= 0.0)) throw std::invalid_argument("gaussian: variance must be >= 0");
  } else if (const auto* u = std::get_if<UniformSpec>(&spec)) {
    if (!(u->a < u->b)) throw std::invalid_argument("uniform: requires a < b");
  } else if (const auto* be = std::get_if<BernoulliScaledSpec>(&spec)) {
    if (!(be->lambda > 0.0)) throw std::invalid_argument("bernoulli_scaled: lambda must be > 0");
  } else if (const auto* st = std::get_if<StableDomainSpec>(&spec)) {
    if (!(st->alpha > 0.0 && st->alpha < 2.0))
      throw std::invalid_argument("stable: alpha must lie in (0,2)");
    if (!(st->theta >= 0.0 && st->theta <= 1.0))
      throw std::invalid_argument("stable: theta must lie in [0,1]");
    if (!(st->scale > 0.0)) throw std::invalid_argument("stable: scale must be > 0");
  }
}

// True for laws with finite moments of all orders and N-free parameters;
// the CLT pipelines accept only these.
inline bool has_standard_moments(const DistSpec& spec) {
  return std::holds_alternative<GaussianSpec>(spec) || std::holds_alternative<RademacherSpec>(spec) ||
         std::holds_alternative<UniformSpec>(spec);
}

inline double dist_mean(const DistSpec& spec) {
  if (const auto* g = std::get_if<GaussianSpec>(&spec)) return g->mean;
  if (std::holds_alternative<RademacherSpec>(spec)) return 0.0;
  if (const auto* u = std::get_if<UniformSpec>(&spec)) return 0.5 * (u->a + u->b);
  throw std::invalid_argument("dist_mean: law has no N-free finite mean here");
}

inline double dist_variance(const DistSpec& spec) {
  if (const auto* g = std::get_if<GaussianSpec>(&spec)) return g->variance;
  if (std::holds_alternative<RademacherSpec>(spec)) return 1.0;
  if (const auto* u = std::get_if<UniformSpec>(&spec)) {
    double w = u->b - u->a;
    return w * w / 12.0;
  }
  throw std::invalid_argument("dist_variance: law has no N-free finite variance here");
}

// Affine standardization to mean 0, variance 1 (for the CLT pipelines).
inline DistSpec standardized(const DistSpec& spec) {
  validate(spec);
  if (!has_standard_moments(spec)) throw std::invalid_argument("standardized: law not usable by CLT experiments");
  if (std::holds_alternative<RademacherSpec>(spec)) return spec;
  double mu = dist_mean(spec);
  double sd = std::sqrt(dist_variance(spec));
  if (!(sd > 0.0)) throw std::invalid_argument("standardized: degenerate law (zero variance)");
  if (std::holds_alternative<GaussianSpec>(spec)) return GaussianSpec{0.0, 1.0};
  const auto& u = std::get<UniformSpec>(spec);
  return UniformSpec{(u.a - mu) / sd, (u.b - mu) / sd};
}

// Fourth moment of the standardized law; drives every CLT covariance target.
inline double standardized_fourth_moment(const DistSpec& spec) {
  if (std::holds_alternative<GaussianSpec>(spec)) return 3.0;
  if (std::holds_alternative<RademacherSpec>(spec)) return 1.0;
  if (std::holds_alternative<UniformSpec>(spec)) return 1.8;
  throw std::invalid_argument("standardized_fourth_moment: law not usable by CLT experiments");
}

inline double sample_one(const DistSpec& spec, long long n, RngStream& rng) {
  if (const auto* g = std::get_if<GaussianSpec>(&spec)) return g->mean + std::sqrt(g->variance) * rng.next_gaussian();
  if (std::holds_alternative<RademacherSpec>(spec)) return rng.next_bool(0.5) ? 1.0 : -1.0;
  if (const auto* u = std::get_if<UniformSpec>(&spec)) return rng.next_uniform(u->a, u->b);
  if (const auto* be = std::get_if<BernoulliScaledSpec>(&spec)) {
    double p = be->lambda / static_cast<double>(n);
    if (p > 1.0) throw std::invalid_argument("bernoulli_scaled: lambda exceeds N");
    return rng.next_bool(p) ? 1.0 : 0.0;
  }
  const auto& st = std::get<StableDomainSpec>(spec);
  double sign = rng.next_bool(st.theta) ? 1.0 : -1.0;
  double u01 = rng.next_unit();
  return sign * std::pow(st.scale / u01, 1.0 / st.alpha);
}

inline std::vector<double> sample_iid_roots(const DistSpec& spec, long long n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_iid_roots: N must be >= 1");
  validate(spec);
  std::vector<double> roots(static_cast<std::size_t>(n));
  for (auto& r : roots) r = sample_one(spec, n, rng);
  return roots;
}

// Equivalent fast path for bernoulli_scaled: draw the count of ones directly.
// Same law as sample_iid_roots, not the same stream consumption.
inline long long sample_bernoulli_count(const BernoulliScaledSpec& spec, long long n, RngStream& rng) {
  double p = spec.lambda / static_cast<double>(n);
  if (p > 1.0) throw std::invalid_argument("bernoulli_scaled: lambda exceeds N");
  return rng.next_binomial(n, p);
}

// Tagged-record forms used by config files and report echoes, e.g.
// "gaussian(0,1)", "rademacher", "stable(1.5,0.5,1)".
inline std::string to_string(const DistSpec& spec) {
  if (const auto* g = std::get_if<GaussianSpec>(&spec))
    return "gaussian(" + fmt_double(g->mean) + "," + fmt_double(g->variance) + ")";
  if (std::holds_alternative<RademacherSpec>(spec)) return "rademacher";
  if (const auto* u = std::get_if<UniformSpec>(&spec))
    return "uniform(" + fmt_double(u->a) + "," + fmt_double(u->b) + ")";
  if (const auto* be = std::get_if<BernoulliScaledSpec>(&spec))
    return "bernoulli_scaled(" + fmt_double(be->lambda) + ")";
  const auto& st = std::get<StableDomainSpec>(spec);
  return "stable(" + fmt_double(st.alpha) + "," + fmt_double(st.theta) + "," + fmt_double(st.scale) + ")";
}

inline DistSpec dist_from_string(std::string_view text) {
  detail::TextCursor cur{text};
  std::string name = cur.identifier();
  std::vector<double> args;
  if (cur.consume('(')) {
    if (!cur.peek(')')) {
      args.push_back(cur.number());
      while (cur.consume(',')) args.push_back(cur.number());
    }
    cur.expect(')');
  }
  if (!cur.done()) throw std::invalid_argument("dist: trailing text in '" + std::string(text) + "'");

  auto want = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi)
      throw std::invalid_argument("dist " + name + ": wrong number of arguments");
  };
  DistSpec spec;
  if (name == "gaussian") {
    want(0, 2);
    GaussianSpec g;
    if (args.size() >= 1) g.mean = args[0];
    if (args.size() >= 2) g.variance = args[1];
    spec = g;
  } else if (name == "rademacher") {
    want(0, 0);
    spec = RademacherSpec{};
  } else if (name == "uniform") {
    want(0, 2);
    UniformSpec u;
    if (args.size() == 2) {
      u.a = args[0];
      u.b = args[1];
    } else {
      want(0, 0);
    }
    spec = u;
  } else if (name == "bernoulli_scaled" || name == "bernoulli") {
    want(1, 1);
    spec = BernoulliScaledSpec{args[0]};
  } else if (name == "stable") {
    want(2, 3);
    StableDomainSpec st;
    st.alpha = args[0];
    st.theta = args[1];
    st.scale = args.size() == 3 ? args[2] : 1.0;
    spec = st;
  } else {
    throw std::invalid_argument("dist: unknown law '" + name + "'");
  }
  validate(spec);
  return spec;
}

}  // namespace ffp
