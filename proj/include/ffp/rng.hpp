#pragma once

#include <cmath>
#include <cstdint>

namespace ffp {

// Counter-based splittable generator. Stream k of seed s produces the fixed
// sequence out_i = mix(init(s, k) + i * GAMMA), so draws depend only on
// (seed, stream, index) and never on scheduling. Each experiment trial owns
// stream (master_seed, trial_index).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) {
    state_ = mix(mix(seed + kGamma) ^ mix(stream + 0x8000000000000001ULL));
  }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform on (0,1]; never returns 0 so logs are safe.
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double next_uniform(double a, double b) { return a + (b - a) * next_unit(); }

  bool next_bool(double p_true) { return next_unit() <= p_true; }

  // Box-Muller; the second deviate of each pair is cached.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_unit();
    double u2 = next_unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double next_exponential() { return -std::log(next_unit()); }

  // Knuth product-of-uniforms; fine for the small intensities used here.
  long long next_poisson(double lambda) {
    double limit = std::exp(-lambda);
    long long k = 0;
    double prod = next_unit();
    while (prod > limit) {
      ++k;
      prod *= next_unit();
    }
    return k;
  }

  // Inversion walk from k = 0; O(np) expected steps.
  long long next_binomial(long long n, double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return n;
    double q = std::exp(static_cast<double>(n) * std::log1p(-p));
    double cdf = q;
    double pmf = q;
    double u = next_unit();
    long long k = 0;
    while (u > cdf && k < n) {
      pmf *= static_cast<double>(n - k) / static_cast<double>(k + 1) * (p / (1.0 - p));
      cdf += pmf;
      ++k;
    }
    return k;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ffp
