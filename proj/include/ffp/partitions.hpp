#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ffp/rational.hpp"

namespace ffp {

// Hard cap on partition orders. Bell(12) = 4,213,597 is the largest
// enumeration the cumulant machinery may ever request.
inline constexpr int kMaxPartitionOrder = 12;

// Restricted-growth string of a partition of [j]: labels[i] is the block
// index of element i+1, blocks numbered by first appearance.
using Rgs = std::array<std::uint8_t, kMaxPartitionOrder>;

struct SetPartition {
  std::vector<std::vector<int>> blocks;  // canonical: sorted by minimum element

  int size() const {
    int n = 0;
    for (const auto& b : blocks) n += static_cast<int>(b.size());
    return n;
  }
  int block_count() const { return static_cast<int>(blocks.size()); }

  std::string rgs_string() const {
    std::string s(static_cast<std::size_t>(size()), '0');
    for (std::size_t b = 0; b < blocks.size(); ++b)
      for (int e : blocks[b]) s[static_cast<std::size_t>(e - 1)] = static_cast<char>('0' + b);
    return s;
  }

  static SetPartition from_rgs(std::string_view rgs) {
    SetPartition p;
    for (std::size_t i = 0; i < rgs.size(); ++i) {
      auto b = static_cast<std::size_t>(rgs[i] - '0');
      if (b > i || b > p.blocks.size()) throw std::invalid_argument("from_rgs: not a restricted-growth string");
      if (b == p.blocks.size()) p.blocks.emplace_back();
      p.blocks[b].push_back(static_cast<int>(i) + 1);
    }
    return p;
  }

  bool operator==(const SetPartition& o) const { return blocks == o.blocks; }
};

namespace detail {

inline void check_partition_order(int j) {
  if (j < 1 || j > kMaxPartitionOrder) throw std::invalid_argument("partition order must be in [1, 12]");
}

// Odometer over restricted-growth strings in lexicographic order.
// fn(labels, j, num_blocks) is invoked once per partition of [j].
// Position i may grow while s[i] <= max(s[0..i-1]); maxp caches that prefix max.
template <class F>
void scan_rgs(int j, F&& fn) {
  check_partition_order(j);
  Rgs s{};
  Rgs maxp{};  // maxp[i] = max(s[0..i-1]), with maxp[0] = 0 (s[0] is pinned to 0)
  for (;;) {
    int last = j - 1;
    int nb = static_cast<int>(s[last] > maxp[last] ? s[last] : maxp[last]) + 1;
    fn(static_cast<const Rgs&>(s), j, nb);
    int i = j - 1;
    while (i > 0 && s[i] > maxp[i]) --i;
    if (i == 0) return;
    ++s[i];
    for (int t = i + 1; t < j; ++t) {
      s[t] = 0;
      maxp[t] = s[t - 1] > maxp[t - 1] ? s[t - 1] : maxp[t - 1];
    }
  }
}

// Non-crossing test on labels: for consecutive elements a < c of one block,
// every block met strictly inside (a, c) must be contained in (a, c).
inline bool noncrossing_labels(const std::uint8_t* s, int j) {
  std::array<int, kMaxPartitionOrder> last_seen;
  last_seen.fill(-1);
  std::array<int, kMaxPartitionOrder> block_min, block_max;
  block_min.fill(-1);
  block_max.fill(-1);
  for (int i = 0; i < j; ++i) {
    int b = s[i];
    if (block_min[b] < 0) block_min[b] = i;
    block_max[b] = i;
  }
  for (int i = 0; i < j; ++i) {
    int b = s[i];
    int prev = last_seen[b];
    if (prev >= 0) {
      for (int m = prev + 1; m < i; ++m) {
        int inner = s[m];
        if (inner == b) continue;
        if (block_min[inner] <= prev || block_max[inner] >= i) return false;
      }
    }
    last_seen[b] = i;
  }
  return true;
}

inline SetPartition partition_from_labels(const Rgs& s, int j) {
  SetPartition p;
  for (int i = 0; i < j; ++i) {
    auto b = static_cast<std::size_t>(s[i]);
    if (b == p.blocks.size()) p.blocks.emplace_back();
    p.blocks[b].push_back(i + 1);
  }
  return p;
}

}  // namespace detail

// Streams every partition of [j] exactly once in restricted-growth order.
// fn receives (labels, j, num_blocks).
template <class F>
void for_each_set_partition(int j, F&& fn) {
  detail::scan_rgs(j, fn);
}

template <class F>
void for_each_noncrossing_partition(int j, F&& fn) {
  detail::scan_rgs(j, [&](const Rgs& s, int n, int nb) {
    if (detail::noncrossing_labels(s.data(), n)) fn(s, n, nb);
  });
}

inline bool is_noncrossing(const SetPartition& p) {
  int j = p.size();
  detail::check_partition_order(j);
  Rgs s{};
  for (std::size_t b = 0; b < p.blocks.size(); ++b)
    for (int e : p.blocks[b]) s[static_cast<std::size_t>(e - 1)] = static_cast<std::uint8_t>(b);
  return detail::noncrossing_labels(s.data(), j);
}

// Materialized enumerations. Memory grows like Bell(j); callers above
// j = 10 should stream instead.
inline std::vector<SetPartition> set_partitions(int j) {
  detail::check_partition_order(j);
  std::vector<SetPartition> out;
  for_each_set_partition(j, [&](const Rgs& s, int n, int) { out.push_back(detail::partition_from_labels(s, n)); });
  return out;
}

inline std::vector<SetPartition> noncrossing_partitions(int j) {
  detail::check_partition_order(j);
  std::vector<SetPartition> out;
  for_each_noncrossing_partition(j, [&](const Rgs& s, int n, int) { out.push_back(detail::partition_from_labels(s, n)); });
  return out;
}

inline BigInt falling_factorial(long long n, int k) {
  if (k < 0 || k > n) throw std::invalid_argument("falling_factorial requires 0 <= k <= n");
  BigInt acc = 1;
  for (int i = 0; i < k; ++i) acc *= BigInt(n - i);
  return acc;
}

inline BigInt factorial(int n) {
  BigInt acc = 1;
  for (int i = 2; i <= n; ++i) acc *= i;
  return acc;
}

// Weight attached to kappa_pi in the implicit cumulant relation:
// (-1)^(k-|pi|) N^|pi| prod_{V in pi} (|V|-1)!.
inline Rational partition_weight(const SetPartition& p, long long n, int k) {
  if (p.size() != k) throw std::invalid_argument("partition_weight: partition must cover [k]");
  if (n < k) throw std::invalid_argument("partition_weight: requires N >= k");
  BigInt w = 1;
  for (const auto& block : p.blocks) w *= factorial(static_cast<int>(block.size()) - 1);
  BigInt npow = 1;
  for (int i = 0; i < p.block_count(); ++i) npow *= n;
  w *= npow;
  if ((k - p.block_count()) % 2 != 0) w = -w;
  return Rational(w);
}

namespace detail {

inline Rational partition_weight_from_counts(const std::array<std::uint8_t, kMaxPartitionOrder>& sizes, int nblocks,
                                             long long n, int k) {
  BigInt w = 1;
  for (int b = 0; b < nblocks; ++b) w *= factorial(sizes[b] - 1);
  for (int b = 0; b < nblocks; ++b) w *= n;
  if ((k - nblocks) % 2 != 0) w = -w;
  return Rational(w);
}

}  // namespace detail

}  // namespace ffp
