#pragma once

// Hard-partition validity metrics and partition comparison.

#include "fuzzyburst/core.hpp"
#include "fuzzyburst/fanny.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace fuzzyburst {

/// Labels in [1..K]; clusters may be empty.
class HardPartition {
public:
  HardPartition() = default;
  HardPartition(std::vector<int> labels, int k)
      : labels_(std::move(labels)), k_(k) {
    if (k_ < 1)
      throw Error("hard partition: k must be at least 1");
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] < 1 || labels_[i] > k_)
        throw Error("hard partition: label " + std::to_string(labels_[i]) +
                    " at object " + std::to_string(i) + " outside [1.." +
                    std::to_string(k_) + "]");
  }

  std::size_t n() const noexcept { return labels_.size(); }
  int k() const noexcept { return k_; }
  int operator[](std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const noexcept { return labels_; }

  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> s(static_cast<std::size_t>(k_), 0);
    for (int l : labels_)
      ++s[static_cast<std::size_t>(l - 1)];
    return s;
  }

private:
  std::vector<int> labels_;
  int k_ = 0;
};

/// Connectivity index with L nearest neighbours: each object pays 1/j when its
/// j-th nearest neighbour sits in another cluster. Neighbour ties go to the
/// lower object index. Lower is better.
inline double connectivity_index(const HardPartition& partition,
                                 const DistanceMatrix& d, std::size_t L) {
  const std::size_t n = d.size();
  if (partition.n() != n)
    throw Error("dimension mismatch between partition and distance matrix");
  if (L < 1 || L + 1 > n)
    throw Error("connectivity neighbour count L=" + std::to_string(L) +
                " outside [1.." + std::to_string(n == 0 ? 0 : n - 1) + "]");

  std::vector<double> drow(n);
  std::vector<std::size_t> order(n - 1);
  double conn = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d.fill_row(i, drow);
    std::size_t pos = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i)
        order[pos++] = j;
    std::partial_sort(order.begin(), order.begin() + static_cast<long>(L),
                      order.end(), [&](std::size_t a, std::size_t b) {
                        return drow[a] < drow[b] ||
                               (drow[a] == drow[b] && a < b);
                      });
    for (std::size_t j = 0; j < L; ++j)
      if (partition[order[j]] != partition[i])
        conn += 1.0 / static_cast<double>(j + 1);
  }
  return conn;
}

/// Dunn index: smallest between-cluster distance over the largest cluster
/// diameter. Returns +infinity when every diameter is zero but clusters are
/// separated, and 0 when nothing is separated either.
inline double dunn_index(const HardPartition& partition,
                         const DistanceMatrix& d) {
  const std::size_t n = d.size();
  if (partition.n() != n)
    throw Error("dimension mismatch between partition and distance matrix");
  if (partition.k() < 2)
    throw Error("Dunn index requires at least two clusters");
  for (std::size_t s : partition.sizes())
    if (s == 0)
      throw Error("Dunn index is undefined with an empty cluster");

  double separation = std::numeric_limits<double>::infinity();
  double diameter = 0.0;
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double dij = d(i, j);
      if (partition[i] == partition[j])
        diameter = std::max(diameter, dij);
      else
        separation = std::min(separation, dij);
    }
  if (diameter == 0.0)
    return separation > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return separation / diameter;
}

/// Contingency table of partition a (rows) against partition b (columns).
struct CrossTab {
  std::vector<std::vector<long>> counts;
  /// Per-row percentages; rows of empty clusters are all zero.
  std::vector<std::vector<double>> row_percentages;

  std::size_t rows() const { return counts.size(); }
  std::size_t cols() const { return counts.empty() ? 0 : counts[0].size(); }
};

inline CrossTab cross_tabulate(const HardPartition& a, const HardPartition& b) {
  if (a.n() != b.n())
    throw Error("cross tabulation: partitions have different lengths (" +
                std::to_string(a.n()) + " vs " + std::to_string(b.n()) + ")");
  const auto ka = static_cast<std::size_t>(a.k());
  const auto kb = static_cast<std::size_t>(b.k());
  CrossTab t;
  t.counts.assign(ka, std::vector<long>(kb, 0));
  for (std::size_t i = 0; i < a.n(); ++i)
    ++t.counts[static_cast<std::size_t>(a[i] - 1)]
              [static_cast<std::size_t>(b[i] - 1)];
  t.row_percentages.assign(ka, std::vector<double>(kb, 0.0));
  for (std::size_t x = 0; x < ka; ++x) {
    const long total =
        std::accumulate(t.counts[x].begin(), t.counts[x].end(), 0L);
    if (total == 0)
      continue;
    for (std::size_t y = 0; y < kb; ++y)
      t.row_percentages[x][y] = 100.0 * static_cast<double>(t.counts[x][y]) /
                                static_cast<double>(total);
  }
  return t;
}

struct ClusterMembershipStats {
  int cluster = 0;
  std::size_t size = 0;
  double mean = 0.0;   // of the assigned-cluster membership
  double median = 0.0;
  std::size_t below_half = 0;
};

struct MembershipReport {
  std::vector<ClusterMembershipStats> clusters;
  std::size_t n = 0;
  std::size_t below_half = 0;
  double below_half_percent = 0.0;
};

inline double median_of(std::vector<double> v) {
  if (v.empty())
    return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1)
    return upper;
  const double lower =
      *std::max_element(v.begin(), v.begin() + static_cast<long>(mid));
  return 0.5 * (lower + upper);
}

/// Per-cluster statistics of each object's membership in its assigned
/// cluster, plus the count of objects whose assigned membership is < 0.5.
inline MembershipReport membership_report(const MembershipMatrix& m,
                                          const HardPartition& labels) {
  if (m.n() != labels.n())
    throw Error("membership report: partition length does not match "
                "membership rows");
  if (static_cast<std::size_t>(labels.k()) != m.k())
    throw Error("membership report: partition k does not match membership k");

  std::vector<std::vector<double>> top(m.k());
  MembershipReport report;
  report.n = m.n();
  for (std::size_t i = 0; i < m.n(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i] - 1);
    top[c].push_back(m(i, c));
  }
  for (std::size_t c = 0; c < m.k(); ++c) {
    ClusterMembershipStats s;
    s.cluster = static_cast<int>(c) + 1;
    s.size = top[c].size();
    if (s.size > 0) {
      s.mean = std::accumulate(top[c].begin(), top[c].end(), 0.0) /
               static_cast<double>(s.size);
      s.median = median_of(top[c]);
    }
    s.below_half = static_cast<std::size_t>(
        std::count_if(top[c].begin(), top[c].end(),
                      [](double v) { return v < 0.5; }));
    report.below_half += s.below_half;
    report.clusters.push_back(s);
  }
  report.below_half_percent =
      report.n == 0 ? 0.0
                    : 100.0 * static_cast<double>(report.below_half) /
                          static_cast<double>(report.n);
  return report;
}

} // namespace fuzzyburst
