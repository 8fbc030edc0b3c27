#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ffp/errors.hpp"
#include "ffp/format.hpp"
#include "ffp/rng.hpp"
#include "ffp/series.hpp"

namespace ffp {

// Atomic Lévy measure nu = sum_i lambda_i delta_{x_i}, x_i != 0, lambda_i > 0.
struct AtomicMeasure {
  std::vector<std::pair<double, double>> atoms;  // (location, intensity)
  bool operator==(const AtomicMeasure&) const = default;
};

// nu with two-sided stable tails: nu([t,inf)) = scale*theta*t^-alpha,
// nu((-inf,-t]) = scale*(1-theta)*t^-alpha.
struct StableTail {
  double alpha = 1.5;
  double theta = 0.5;
  double scale = 1.0;
  bool operator==(const StableTail&) const = default;
};

using LevyMeasure = std::variant<AtomicMeasure, StableTail>;

struct LevyTriple {
  double drift = 0.0;   // c
  double sigma2 = 0.0;  // Gaussian component
  LevyMeasure nu = AtomicMeasure{};
  bool operator==(const LevyTriple&) const = default;
};

inline void validate(const LevyTriple& triple) {
  if (!(triple.sigma2 >= 0.0)) throw std::invalid_argument("LevyTriple: sigma2 must be >= 0");
  if (const auto* atomic = std::get_if<AtomicMeasure>(&triple.nu)) {
    for (const auto& [x, lam] : atomic->atoms) {
      if (x == 0.0) throw std::invalid_argument("LevyTriple: atoms must avoid 0");
      if (!(lam > 0.0)) throw std::invalid_argument("LevyTriple: atom intensities must be > 0");
    }
  } else {
    const auto& st = std::get<StableTail>(triple.nu);
    if (!(st.alpha > 0.0 && st.alpha < 2.0)) throw std::invalid_argument("LevyTriple: alpha must lie in (0,2)");
    if (!(st.theta >= 0.0 && st.theta <= 1.0)) throw std::invalid_argument("LevyTriple: theta must lie in [0,1]");
    if (!(st.scale > 0.0)) throw std::invalid_argument("LevyTriple: scale must be > 0");
  }
}

// One realization of the point process, positive points descending and
// negative points most-negative first (decreasing magnitude on each side).
//
// Stable-tail truncation policy: the k = 1 compensated series receives a
// deterministic analytic mean correction when Y is assembled; the absolutely
// convergent power sums S_k, k >= 2, stay raw, with the mean of the dropped
// tail and a residual bound reported alongside the sample.
struct PointProcessSample {
  std::vector<double> positive;
  std::vector<double> negative;
  std::size_t truncation_index = 0;  // ladder length J (stable) or point count (atomic)

  double tail_correction_y = 0.0;    // deterministic mean of the dropped compensated series
  double tail_bound_y = 0.0;         // bound on the residual (mean-zero) truncation error of Y
  std::vector<double> tail_mean_s;   // index k-2: mean of the dropped S_k tail (reported, not added)
  std::vector<double> tail_bound_s;  // index k-2: bound on the S_k truncation error

  double gaussian_part = 0.0;
  double compensated_sum = 0.0;
  double y_value = 0.0;

  double power_sum(int k) const {
    if (k < 2) throw std::invalid_argument("power_sum: defined for k >= 2");
    double acc = 0.0;
    for (double a : positive) acc += std::pow(a, k);
    for (double a : negative) acc += std::pow(a, k);
    return acc;
  }

  // S_2..S_ell
  std::vector<double> power_sums(int ell) const {
    std::vector<double> s;
    for (int k = 2; k <= ell; ++k) s.push_back(power_sum(k));
    return s;
  }
};

namespace detail {

inline double simpson_panel(double a, double fa, double fm, double b, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double fa, double b, double fb,
                                   double m, double fm, double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson_panel(a, fa, flm, m, fm);
  double right = simpson_panel(m, fm, frm, b, fb);
  double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) throw numerical_error("adaptive quadrature failed to reach tolerance");
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
  double whole = simpson_panel(a, fa, fm, b, fb);
  return adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

// x / (1 + x^2), the Lévy-Khintchine taming map.
inline double tamed(double x) { return x / (1.0 + x * x); }

}  // namespace detail

// Compensator c_j for the stable side with tail strength s (= scale*theta
// for the positive side): c_j = int_{j-1}^{j} h(t) dt, h(t) = u/(1+u^2),
// u(t) = (s/t)^(1/alpha). Positive value; the negative side negates.
inline double stable_side_compensator(double s, double alpha, int j) {
  if (j < 1) throw std::invalid_argument("stable_side_compensator: j must be >= 1");
  if (s <= 0.0) return 0.0;
  auto h = [s, alpha](double t) {
    if (t <= 0.0) return 0.0;
    double u = std::pow(s / t, 1.0 / alpha);
    return detail::tamed(u);
  };
  return detail::adaptive_simpson(h, static_cast<double>(j - 1), static_cast<double>(j), 1e-9);
}

// Step-function compensator for one side of an atomic measure. magnitudes and
// intensities describe that side's atoms ordered by decreasing magnitude.
inline double atomic_side_compensator(const std::vector<std::pair<double, double>>& side, int j) {
  if (j < 1) throw std::invalid_argument("atomic_side_compensator: j must be >= 1");
  double lo = static_cast<double>(j - 1), hi = static_cast<double>(j);
  double acc = 0.0, cum = 0.0;
  for (const auto& [mag, lam] : side) {
    double seg_lo = cum, seg_hi = cum + lam;
    double overlap = std::min(hi, seg_hi) - std::max(lo, seg_lo);
    if (overlap > 0.0) acc += overlap * detail::tamed(mag);
    cum = seg_hi;
    if (cum >= hi) break;
  }
  return acc;
}

namespace detail {

inline std::vector<std::pair<double, double>> atomic_side(const AtomicMeasure& nu, bool positive) {
  std::vector<std::pair<double, double>> side;  // (magnitude, intensity)
  for (const auto& [x, lam] : nu.atoms)
    if ((x > 0.0) == positive && x != 0.0) side.emplace_back(std::abs(x), lam);
  std::sort(side.begin(), side.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  return side;
}

}  // namespace detail

// Signed compensator c_j, j in Z \ {0}, for either supported measure.
inline double compensator(const LevyMeasure& nu, int j) {
  if (j == 0) throw std::invalid_argument("compensator: index 0 is undefined");
  bool positive = j > 0;
  int idx = positive ? j : -j;
  if (const auto* atomic = std::get_if<AtomicMeasure>(&nu)) {
    double c = atomic_side_compensator(detail::atomic_side(*atomic, positive), idx);
    return positive ? c : -c;
  }
  const auto& st = std::get<StableTail>(nu);
  double s = st.scale * (positive ? st.theta : 1.0 - st.theta);
  double c = stable_side_compensator(s, st.alpha, idx);
  return positive ? c : -c;
}

// Marked-ladder realization of the stable point process: Gamma_k partial sums
// of unit exponentials, point_k = sign_k * (scale/Gamma_k)^(1/alpha),
// sign_k = +1 with probability theta. Magnitudes are non-increasing in k.
inline PointProcessSample sample_stable_points(const StableTail& st, std::size_t truncation, RngStream& rng) {
  if (truncation < 1) throw std::invalid_argument("sample_stable_points: truncation must be >= 1");
  if (!(st.alpha > 0.0 && st.alpha < 2.0)) throw std::invalid_argument("sample_stable_points: alpha in (0,2)");
  PointProcessSample out;
  out.truncation_index = truncation;
  double gamma = 0.0;
  const double alpha = st.alpha;
  const double inv_alpha = 1.0 / alpha;
  for (std::size_t k = 0; k < truncation; ++k) {
    gamma += rng.next_exponential();
    double mag = std::pow(st.scale / gamma, inv_alpha);
    if (rng.next_bool(st.theta)) out.positive.push_back(mag);
    else out.negative.push_back(-mag);
  }

  // Truncation diagnostics. Beyond the ladder a side of strength s behaves
  // like the Poisson process of u(t) = (s/t)^(1/alpha) values past tau =
  // theta_side * J, so the moments of the dropped sums are intensity
  // integrals:
  //   E sum u^k   = int_tau^inf u^k dt,
  //   Var sum u^k = int_tau^inf u^2k dt,
  // and the mean of the dropped compensated k = 1 series is the taming
  // residue int u^3/(1+u^2) plus an O(1/J)-mean index mismatch whose
  // fluctuation (the sqrt(J) u(J) ladder-drift term) enters the bound.
  const double jd = static_cast<double>(truncation);
  struct Side {
    double s = 0.0;
    double tau = 0.0;
  };
  Side pos{st.scale * st.theta, st.theta * jd};
  Side neg{st.scale * (1.0 - st.theta), (1.0 - st.theta) * jd};

  // int_a^inf (s/t)^(k/alpha) dt, requires k/alpha > 1
  auto tail_integral = [&](double s, double a, double k) {
    if (s <= 0.0) return 0.0;
    double e = k * inv_alpha;
    return std::pow(s, e) * std::pow(a, 1.0 - e) / (e - 1.0);
  };
  auto u_at = [&](const Side& side) {
    return side.s <= 0.0 ? 0.0 : std::pow(side.s / side.tau, inv_alpha);
  };

  out.tail_correction_y = tail_integral(pos.s, pos.tau, 3.0) - tail_integral(neg.s, neg.tau, 3.0);
  double var_y = tail_integral(pos.s, pos.tau, 2.0) + tail_integral(neg.s, neg.tau, 2.0) +
                 pos.tau * u_at(pos) * u_at(pos) + neg.tau * u_at(neg) * u_at(neg);
  out.tail_bound_y = 3.5 * std::sqrt(var_y) + 0.05 * std::abs(out.tail_correction_y);

  for (int k = 2; k <= 12; ++k) {
    double mp = tail_integral(pos.s, pos.tau, static_cast<double>(k));
    double mn = tail_integral(neg.s, neg.tau, static_cast<double>(k));
    double mean_k = (k % 2 == 0) ? mp + mn : mp - mn;  // odd powers of negative points subtract
    double var_k = tail_integral(pos.s, pos.tau, 2.0 * k) + tail_integral(neg.s, neg.tau, 2.0 * k) +
                   pos.tau * std::pow(u_at(pos), 2.0 * k) + neg.tau * std::pow(u_at(neg), 2.0 * k);
    out.tail_mean_s.push_back(mean_k);
    out.tail_bound_s.push_back(std::abs(mean_k) + 3.5 * std::sqrt(var_k));
  }
  return out;
}

// Independent Poisson(lambda_i) copies of each atom.
inline PointProcessSample sample_atomic_points(const AtomicMeasure& nu, RngStream& rng) {
  PointProcessSample out;
  for (const auto& [x, lam] : nu.atoms) {
    if (x == 0.0) throw std::invalid_argument("sample_atomic_points: atoms must avoid 0");
    if (!(lam > 0.0)) throw std::invalid_argument("sample_atomic_points: intensities must be > 0");
    long long count = rng.next_poisson(lam);
    for (long long c = 0; c < count; ++c) {
      if (x > 0.0) out.positive.push_back(x);
      else out.negative.push_back(x);
    }
  }
  std::sort(out.positive.begin(), out.positive.end(), std::greater<double>());
  std::sort(out.negative.begin(), out.negative.end());
  out.truncation_index = out.positive.size() + out.negative.size();
  return out;
}

inline PointProcessSample sample_points(const LevyTriple& triple, std::size_t truncation, RngStream& rng) {
  validate(triple);
  if (const auto* atomic = std::get_if<AtomicMeasure>(&triple.nu)) return sample_atomic_points(*atomic, rng);
  return sample_stable_points(std::get<StableTail>(triple.nu), truncation, rng);
}

// Y = c + sigma Z + sum_j (alpha_j - c_j), the compensated-series realization
// of the infinitely divisible law. The sample is updated in place with the
// Gaussian part and the assembled value. For atomic measures the full
// compensator sum collapses to sum_i lambda_i x_i/(1+x_i^2) exactly; for
// stable tails the dropped compensated series is replaced by its
// deterministic analytic mean.
inline double assemble_Y(const LevyTriple& triple, PointProcessSample& pts, RngStream& rng) {
  validate(triple);
  double z = rng.next_gaussian();
  double compensated = 0.0;
  if (const auto* atomic = std::get_if<AtomicMeasure>(&triple.nu)) {
    for (double a : pts.positive) compensated += a;
    for (double a : pts.negative) compensated += a;
    for (const auto& [x, lam] : atomic->atoms) compensated -= lam * detail::tamed(x);
  } else {
    const auto& st = std::get<StableTail>(triple.nu);
    for (std::size_t j = 0; j < pts.positive.size(); ++j)
      compensated += pts.positive[j] - stable_side_compensator(st.scale * st.theta, st.alpha, static_cast<int>(j) + 1);
    for (std::size_t j = 0; j < pts.negative.size(); ++j)
      compensated +=
          pts.negative[j] + stable_side_compensator(st.scale * (1.0 - st.theta), st.alpha, static_cast<int>(j) + 1);
    compensated += pts.tail_correction_y;
  }
  pts.gaussian_part = z;
  pts.compensated_sum = compensated;
  pts.y_value = triple.drift + std::sqrt(triple.sigma2) * z + compensated;
  return pts.y_value;
}

// -f'/f for the random entire function, before the ell-rescaling:
// R_A(s) = Y + (sigma^2 + S_2) s + sum_{k>=3} S_k s^(k-1).
inline TruncatedSeries<double> f_log_derivative_series(double y, double sigma2,
                                                       const std::vector<double>& power_sums) {
  TruncatedSeries<double> r(static_cast<int>(power_sums.size()));
  r[0] = y;
  if (!power_sums.empty()) {
    r[1] = sigma2 + power_sums[0];
    for (std::size_t k = 1; k < power_sums.size(); ++k) r[static_cast<int>(k) + 1] = power_sums[k];
  }
  return r;
}

// Truncation of f = exp(-Ys - sigma^2 s^2/2) prod (1-alpha_j s) e^(alpha_j s)
// to order ell, i.e. exp(-int R_A).
inline TruncatedSeries<double> appell_series(double y, double sigma2, const std::vector<double>& power_sums) {
  auto r = f_log_derivative_series(y, sigma2, power_sums);
  return exp_series(-r.antiderivative());
}

// Tagged-record forms:
//   atomic(c=0.5, sigma2=0, atoms=[(1,1),(-2,0.5)])
//   stable(c=0, sigma2=0, alpha=1.5, theta=0.5, scale=1)
inline std::string to_string(const LevyTriple& triple) {
  std::string head = "c=" + fmt_double(triple.drift) + ",sigma2=" + fmt_double(triple.sigma2);
  if (const auto* atomic = std::get_if<AtomicMeasure>(&triple.nu)) {
    std::string atoms = "[";
    for (std::size_t i = 0; i < atomic->atoms.size(); ++i) {
      if (i) atoms += ",";
      atoms += "(" + fmt_double(atomic->atoms[i].first) + "," + fmt_double(atomic->atoms[i].second) + ")";
    }
    atoms += "]";
    return "atomic(" + head + ",atoms=" + atoms + ")";
  }
  const auto& st = std::get<StableTail>(triple.nu);
  return "stable(" + head + ",alpha=" + fmt_double(st.alpha) + ",theta=" + fmt_double(st.theta) +
         ",scale=" + fmt_double(st.scale) + ")";
}

inline LevyTriple levy_triple_from_string(std::string_view text) {
  detail::TextCursor cur{text};
  std::string kind = cur.identifier();
  if (kind != "atomic" && kind != "stable")
    throw std::invalid_argument("levy: unknown measure kind '" + kind + "'");
  LevyTriple triple;
  AtomicMeasure atomic;
  StableTail tail;
  bool have_alpha = false;
  cur.expect('(');
  if (!cur.peek(')')) {
    do {
      std::string key = cur.identifier();
      cur.expect('=');
      if (key == "atoms") {
        cur.expect('[');
        if (!cur.peek(']')) {
          do {
            cur.expect('(');
            double x = cur.number();
            cur.expect(',');
            double lam = cur.number();
            cur.expect(')');
            atomic.atoms.emplace_back(x, lam);
          } while (cur.consume(','));
        }
        cur.expect(']');
      } else {
        double v = cur.number();
        if (key == "c") triple.drift = v;
        else if (key == "sigma2") triple.sigma2 = v;
        else if (key == "alpha") { tail.alpha = v; have_alpha = true; }
        else if (key == "theta") tail.theta = v;
        else if (key == "scale") tail.scale = v;
        else throw std::invalid_argument("levy: unknown key '" + key + "'");
      }
    } while (cur.consume(','));
  }
  cur.expect(')');
  if (!cur.done()) throw std::invalid_argument("levy: trailing text in '" + std::string(text) + "'");
  if (kind == "atomic") {
    triple.nu = atomic;
  } else {
    if (!have_alpha) throw std::invalid_argument("levy: stable measure needs alpha");
    triple.nu = tail;
  }
  validate(triple);
  return triple;
}

// Precomputes the per-index compensators of a triple so repeated draws avoid
// requadrature; the workhorse behind the Monte Carlo reference ensembles.
class LevySampler {
 public:
  LevySampler(LevyTriple triple, std::size_t truncation) : triple_(std::move(triple)), truncation_(truncation) {
    validate(triple_);
    if (const auto* st = std::get_if<StableTail>(&triple_.nu)) {
      cpos_.resize(truncation_ + 1, 0.0);
      cneg_.resize(truncation_ + 1, 0.0);
      for (std::size_t j = 1; j <= truncation_; ++j) {
        cpos_[j] = stable_side_compensator(st->scale * st->theta, st->alpha, static_cast<int>(j));
        cneg_[j] = stable_side_compensator(st->scale * (1.0 - st->theta), st->alpha, static_cast<int>(j));
      }
    } else {
      const auto& atomic = std::get<AtomicMeasure>(triple_.nu);
      for (const auto& [x, lam] : atomic.atoms) total_compensator_ += lam * detail::tamed(x);
    }
  }

  const LevyTriple& triple() const { return triple_; }

  PointProcessSample draw(RngStream& rng) const {
    PointProcessSample pts = sample_points(triple_, truncation_, rng);
    double z = rng.next_gaussian();
    double compensated = 0.0;
    if (std::holds_alternative<StableTail>(triple_.nu)) {
      for (std::size_t j = 0; j < pts.positive.size(); ++j) compensated += pts.positive[j] - cpos_[j + 1];
      for (std::size_t j = 0; j < pts.negative.size(); ++j) compensated += pts.negative[j] + cneg_[j + 1];
      compensated += pts.tail_correction_y;
    } else {
      for (double a : pts.positive) compensated += a;
      for (double a : pts.negative) compensated += a;
      compensated -= total_compensator_;
    }
    pts.gaussian_part = z;
    pts.compensated_sum = compensated;
    pts.y_value = triple_.drift + std::sqrt(triple_.sigma2) * z + compensated;
    return pts;
  }

 private:
  LevyTriple triple_;
  std::size_t truncation_;
  std::vector<double> cpos_, cneg_;
  double total_compensator_ = 0.0;
};

}  // namespace ffp
