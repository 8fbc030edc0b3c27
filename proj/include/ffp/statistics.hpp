#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ffp {

// Compensated summation; merges reproduce a plain sequence of adds.
class KahanSum {
 public:
  void add(double x) {
    double y = x - comp_;
    double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  void merge(const KahanSum& o) {
    add(o.sum_);
    add(-o.comp_);
  }
  double value() const { return sum_ - comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Mergeable accumulator of the first four power sums of a scalar statistic.
class MomentAccumulator {
 public:
  void add(double x) {
    n_ += 1;
    s_[0].add(x);
    s_[1].add(x * x);
    s_[2].add(x * x * x);
    s_[3].add(x * x * x * x);
  }
  void merge(const MomentAccumulator& o) {
    n_ += o.n_;
    for (int i = 0; i < 4; ++i) s_[i].merge(o.s_[i]);
  }
  long long count() const { return n_; }
  double power_sum(int k) const { return s_[k - 1].value(); }
  double mean() const { return s_[0].value() / static_cast<double>(n_); }

 private:
  long long n_ = 0;
  KahanSum s_[4];
};

struct CovarianceEstimate {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;      // unbiased
  Eigen::MatrixXd standard_error;  // leave-one-out jackknife, per entry
};

// Unbiased covariance of row vectors with jackknife standard errors. The
// leave-one-out entries reduce to (S_ij - d_ki d_kj M/(M-1))/(M-2) once the
// rows are centered, so the whole estimate is O(M d^2).
inline CovarianceEstimate empirical_covariance(const std::vector<std::vector<double>>& samples) {
  const std::size_t m = samples.size();
  if (m < 2) throw std::invalid_argument("empirical_covariance: needs at least 2 samples");
  const std::size_t d = samples[0].size();
  for (const auto& row : samples)
    if (row.size() != d) throw std::invalid_argument("empirical_covariance: ragged samples");

  CovarianceEstimate out;
  out.mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  for (const auto& row : samples)
    for (std::size_t i = 0; i < d; ++i) out.mean(static_cast<Eigen::Index>(i)) += row[i];
  out.mean /= static_cast<double>(m);

  Eigen::MatrixXd centered(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < d; ++i)
      centered(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
          samples[k][i] - out.mean(static_cast<Eigen::Index>(i));

  Eigen::MatrixXd s = centered.transpose() * centered;
  out.covariance = s / static_cast<double>(m - 1);

  out.standard_error = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  if (m > 2) {
    double mm = static_cast<double>(m);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) {
        Eigen::Index ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
        double sij = s(ii, jj);
        double msum = 0.0, msq = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          Eigen::Index kk = static_cast<Eigen::Index>(k);
          double loo = (sij - centered(kk, ii) * centered(kk, jj) * mm / (mm - 1.0)) / (mm - 2.0);
          msum += loo;
          msq += loo * loo;
        }
        double var = (mm - 1.0) / mm * (msq - msum * msum / mm);
        double se = std::sqrt(std::max(var, 0.0));
        out.standard_error(ii, jj) = se;
        out.standard_error(jj, ii) = se;
      }
    }
  }
  return out;
}

inline double sample_skewness(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) throw std::invalid_argument("sample_skewness: needs at least 2 samples");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0;
  for (double v : x) {
    double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  return m3 / std::pow(m2, 1.5);
}

inline double excess_kurtosis(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) throw std::invalid_argument("excess_kurtosis: needs at least 2 samples");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  return m4 / (m2 * m2) - 3.0;
}

// Two-sample Kolmogorov-Smirnov distance, ties handled by advancing both
// empirical CDFs past each distinct value.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

// Total variation between the empirical law of values rounded to integers and
// a reference pmf on {0, ..., pmf.size()-1}; mass outside the range ignored.
inline double tv_on_integer_range(const std::vector<double>& samples, const std::vector<double>& pmf) {
  if (samples.empty()) throw std::invalid_argument("tv_on_integer_range: empty sample");
  std::vector<double> counts(pmf.size(), 0.0);
  for (double v : samples) {
    long long k = std::llround(v);
    if (k >= 0 && k < static_cast<long long>(pmf.size())) counts[static_cast<std::size_t>(k)] += 1.0;
  }
  double tv = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k)
    tv += std::abs(counts[k] / static_cast<double>(samples.size()) - pmf[k]);
  return 0.5 * tv;
}

inline std::vector<double> poisson_pmf(double lambda, int kmax) {
  std::vector<double> pmf(static_cast<std::size_t>(kmax) + 1);
  double p = std::exp(-lambda);
  for (int k = 0; k <= kmax; ++k) {
    pmf[static_cast<std::size_t>(k)] = p;
    p *= lambda / static_cast<double>(k + 1);
  }
  return pmf;
}

struct Histogram {
  std::vector<double> edges;      // ascending, size bins+1
  std::vector<long long> counts;  // size bins
  long long underflow = 0;
  long long overflow = 0;
};

inline Histogram histogram(const std::vector<double>& samples, std::vector<double> edges) {
  if (edges.size() < 2) throw std::invalid_argument("histogram: needs at least one bin");
  Histogram h;
  h.edges = std::move(edges);
  h.counts.assign(h.edges.size() - 1, 0);
  for (double v : samples) {
    if (v < h.edges.front()) {
      ++h.underflow;
      continue;
    }
    if (v >= h.edges.back()) {
      ++h.overflow;
      continue;
    }
    auto it = std::upper_bound(h.edges.begin(), h.edges.end(), v);
    ++h.counts[static_cast<std::size_t>(it - h.edges.begin()) - 1];
  }
  return h;
}

inline std::vector<double> uniform_edges(double lo, double hi, int bins) {
  if (!(lo < hi) || bins < 1) throw std::invalid_argument("uniform_edges: bad range");
  std::vector<double> e(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i)
    e[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  return e;
}

}  // namespace ffp
