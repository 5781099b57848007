#pragma once

// FANNY fuzzy clustering on a dissimilarity matrix.
//
// Minimizes  sum_k [ sum_i sum_j m_ik^r m_jk^r d(i,j) ] / [ 2 sum_i m_ik^r ]
// over row-stochastic membership matrices M, with fuzzifier r > 1.

#include "fuzzyburst/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace fuzzyburst {

/// N x K row-stochastic matrix of fuzzy memberships, row-major.
class MembershipMatrix {
public:
  static constexpr double kRowSumTolerance = 1e-12;

  MembershipMatrix() = default;

  /// Validates nonnegativity and unit row sums.
  MembershipMatrix(std::vector<double> values, std::size_t n, std::size_t k)
      : values_(std::move(values)), n_(n), k_(k) {
    if (values_.size() != n_ * k_)
      throw Error("membership matrix: value count does not match n x k");
    for (std::size_t i = 0; i < n_; ++i) {
      double sum = 0.0;
      for (std::size_t c = 0; c < k_; ++c) {
        const double v = values_[i * k_ + c];
        if (!(v >= 0.0))
          throw Error("membership matrix: negative or NaN entry in row " +
                      std::to_string(i));
        sum += v;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance)
        throw Error("membership matrix: row " + std::to_string(i) +
                    " does not sum to 1");
    }
  }

  static MembershipMatrix from_rows(
      const std::vector<std::vector<double>>& rows) {
    if (rows.empty())
      throw Error("membership matrix: no rows");
    const std::size_t k = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * k);
    for (const auto& r : rows) {
      if (r.size() != k)
        throw Error("membership matrix: ragged rows");
      values.insert(values.end(), r.begin(), r.end());
    }
    return MembershipMatrix(std::move(values), rows.size(), k);
  }

  static MembershipMatrix uniform(std::size_t n, std::size_t k) {
    return MembershipMatrix(
        std::vector<double>(n * k, 1.0 / static_cast<double>(k)), n, k);
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }

  double operator()(std::size_t i, std::size_t c) const {
    return values_[i * k_ + c];
  }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * k_, k_};
  }
  const std::vector<double>& values() const noexcept { return values_; }

private:
  struct Unchecked {};
  MembershipMatrix(Unchecked, std::vector<double> values, std::size_t n,
                   std::size_t k)
      : values_(std::move(values)), n_(n), k_(k) {}

  friend class MembershipBuilder;

  std::vector<double> values_;
  std::size_t n_ = 0;
  std::size_t k_ = 0;
};

/// Internal: wraps already-normalized rows without re-validating.
class MembershipBuilder {
public:
  static MembershipMatrix adopt(std::vector<double> values, std::size_t n,
                                std::size_t k) {
    return MembershipMatrix(MembershipMatrix::Unchecked{}, std::move(values),
                            n, k);
  }
};

enum class InitMode { SeededRandom, DeterministicStripes };

inline std::string to_string(InitMode mode) {
  return mode == InitMode::SeededRandom ? "seeded-random"
                                        : "deterministic-stripes";
}

inline InitMode parse_init_mode(const std::string& s) {
  if (s == "seeded-random")
    return InitMode::SeededRandom;
  if (s == "deterministic-stripes")
    return InitMode::DeterministicStripes;
  throw Error("unknown init mode '" + s + "'");
}

struct FannyConfig {
  std::size_t k = 3;
  double r = 1.3;
  int max_iter = 500;
  double tol = 1e-9;
  InitMode init = InitMode::SeededRandom;
  std::uint64_t seed = 1;
  /// Independent starts; the lowest final objective wins. The first start
  /// uses `init`, later ones seeded-random draws.
  int starts = 10;

  void validate(std::size_t n) const {
    if (k < 2)
      throw Error("cluster count k must be at least 2");
    if (!(r > 1.0) || !std::isfinite(r))
      throw Error("fuzzifier r must be greater than 1");
    if (max_iter <= 0)
      throw Error("max_iter must be positive");
    if (!(tol > 0.0))
      throw Error("tol must be positive");
    if (starts < 1)
      throw Error("starts must be at least 1");
    if (k >= n)
      throw Error("cluster count k=" + std::to_string(k) +
                  " must be smaller than the number of objects n=" +
                  std::to_string(n));
  }
};

struct FannyResult {
  MembershipMatrix memberships;
  /// trace[0] is the objective of the initial memberships, trace[t] the
  /// objective after sweep t.
  std::vector<double> objective_trace;
  /// Closest hard clustering, labels in [1..K].
  std::vector<int> hard_labels;
  int n_iter = 0;
  bool converged = false;
  double n_dpc = 0.0;

  double objective() const { return objective_trace.back(); }
};

namespace detail {

inline void check_dims(const MembershipMatrix& m, const DistanceMatrix& d) {
  if (m.n() != d.size())
    throw Error("dimension mismatch: membership matrix has " +
                std::to_string(m.n()) + " rows, distance matrix has " +
                std::to_string(d.size()));
}

inline void check_fuzzifier(double r) {
  if (!(r > 1.0))
    throw Error("fuzzifier r must be greater than 1");
}

// Row i of the Gauss-Seidel sweep. a[v] holds the stationarity coefficients.
inline void stationary_row(std::span<const double> a, double r,
                           std::span<double> out) {
  const std::size_t k = a.size();
  std::size_t nonpositive = 0;
  for (double av : a)
    if (av <= 0.0)
      ++nonpositive;
  if (nonpositive > 0) {
    const double share = 1.0 / static_cast<double>(nonpositive);
    for (std::size_t v = 0; v < k; ++v)
      out[v] = a[v] <= 0.0 ? share : 0.0;
    return;
  }
  // m_v proportional to a_v^(-1/(r-1)), evaluated in log space.
  const double expo = 1.0 / (r - 1.0);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < k; ++v) {
    out[v] = -expo * std::log(a[v]);
    max_log = std::max(max_log, out[v]);
  }
  double sum = 0.0;
  for (std::size_t v = 0; v < k; ++v) {
    out[v] = std::exp(out[v] - max_log);
    sum += out[v];
  }
  for (std::size_t v = 0; v < k; ++v)
    out[v] /= sum;
}

// Row-major N x N copy of a distance matrix; solver passes read whole rows
// many times and the packed layout is strided for half of each row.
class DenseDistances {
public:
  explicit DenseDistances(const DistanceMatrix& d)
      : n_(d.size()), full_(d.size() * d.size()) {
    for (std::size_t i = 0; i < n_; ++i)
      d.fill_row(i, std::span<double>(full_.data() + i * n_, n_));
  }
  std::size_t size() const noexcept { return n_; }
  const double* row(std::size_t i) const noexcept {
    return full_.data() + i * n_;
  }

private:
  std::size_t n_;
  std::vector<double> full_;
};

// Objective given u = m^r, with lower(i) pointing at d(i, 0..i-1).
template <class LowerRow>
double objective_from_weights(const std::vector<double>& u, std::size_t n,
                              std::size_t k, LowerRow lower) {
  std::vector<double> weight(k, 0.0), pairs(k, 0.0), acc(k);
  for (std::size_t i = 0; i < n; ++i) {
    const double* di = lower(i);
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t j = 0; j < i; ++j) {
      const double dij = di[j];
      for (std::size_t v = 0; v < k; ++v)
        acc[v] += u[j * k + v] * dij;
    }
    for (std::size_t v = 0; v < k; ++v) {
      weight[v] += u[i * k + v];
      pairs[v] += u[i * k + v] * acc[v];
    }
  }
  // The double sum over ordered pairs is twice the sum over i > j.
  double total = 0.0;
  for (std::size_t v = 0; v < k; ++v)
    if (weight[v] > 0.0)
      total += pairs[v] / weight[v];
  return total;
}

inline std::vector<double> powered(const std::vector<double>& p, double r) {
  std::vector<double> u(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    u[i] = std::pow(p[i], r);
  return u;
}

inline double dense_objective(const std::vector<double>& p, std::size_t k,
                              const DenseDistances& d, double r) {
  return objective_from_weights(powered(p, r), d.size(), k,
                                [&](std::size_t i) { return d.row(i); });
}

// One pass over all objects. Each object's row is replaced by the
// stationarity solution given the current state of every other row; the
// per-cluster sums are updated incrementally after each object.
inline std::vector<double> gauss_seidel_sweep(const std::vector<double>& m,
                                              std::size_t k,
                                              const DenseDistances& d,
                                              double r) {
  const std::size_t n = d.size();
  std::vector<double> p = m;
  std::vector<double> u = powered(p, r);

  // weight[v] = sum_j u_jv, near[i*k+v] = sum_j u_jv d(i,j),
  // within[v] = sum_j sum_l u_jv u_lv d(j,l)
  std::vector<double> weight(k, 0.0), within(k, 0.0), near(n * k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* di = d.row(i);
    double* ni = near.data() + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double dij = di[j];
      const double* uj = u.data() + j * k;
      for (std::size_t v = 0; v < k; ++v)
        ni[v] += uj[v] * dij;
    }
    for (std::size_t v = 0; v < k; ++v) {
      weight[v] += u[i * k + v];
      within[v] += u[i * k + v] * ni[v];
    }
  }

  std::vector<double> a(k), row(k), delta(k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t v = 0; v < k; ++v) {
      const double w = weight[v];
      a[v] = w > 0.0 ? near[i * k + v] / w - within[v] / (2.0 * w * w) : 0.0;
    }
    stationary_row(a, r, row);

    bool changed = false;
    for (std::size_t v = 0; v < k; ++v) {
      const double unew = std::pow(row[v], r);
      delta[v] = unew - u[i * k + v];
      changed = changed || delta[v] != 0.0;
      p[i * k + v] = row[v];
      u[i * k + v] = unew;
      within[v] += 2.0 * delta[v] * near[i * k + v];
      weight[v] += delta[v];
    }
    if (!changed)
      continue;
    const double* di = d.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double dij = di[j];
      double* nj = near.data() + j * k;
      for (std::size_t v = 0; v < k; ++v)
        nj[v] += delta[v] * dij;
    }
  }
  return p;
}

} // namespace detail

/// Objective value of memberships m on dissimilarities d. Clusters whose
/// total weight sum_i m_ik^r is zero contribute nothing.
inline double fanny_objective(const MembershipMatrix& m,
                              const DistanceMatrix& d, double r) {
  detail::check_dims(m, d);
  detail::check_fuzzifier(r);
  const auto& packed = d.packed();
  return detail::objective_from_weights(
      detail::powered(m.values(), r), m.n(), m.k(),
      [&](std::size_t i) { return packed.data() + i * (i - 1) / 2; });
}

namespace detail {

struct Step {
  MembershipMatrix memberships;
  double objective;
};

inline Step descent_step(const MembershipMatrix& m, const DenseDistances& d,
                         double r, double before) {
  const std::vector<double> sweep = gauss_seidel_sweep(m.values(), m.k(), d, r);
  double after = dense_objective(sweep, m.k(), d, r);
  if (after <= before)
    return {MembershipBuilder::adopt(sweep, m.n(), m.k()), after};

  const auto& old = m.values();
  std::vector<double> blend(old.size());
  double step = 0.5;
  for (int attempt = 0; attempt < 50; ++attempt, step *= 0.5) {
    for (std::size_t i = 0; i < old.size(); ++i)
      blend[i] = old[i] + step * (sweep[i] - old[i]);
    after = dense_objective(blend, m.k(), d, r);
    if (after <= before)
      return {MembershipBuilder::adopt(blend, m.n(), m.k()), after};
  }
  return {m, before};
}

} // namespace detail

/// One descent step: a Gauss-Seidel stationarity sweep, accepted if it does
/// not increase the objective, otherwise blended back toward m by halving
/// until it does. Returns m itself when no blend descends.
inline MembershipMatrix fanny_iterate(const MembershipMatrix& m,
                                      const DistanceMatrix& d, double r) {
  detail::check_dims(m, d);
  detail::check_fuzzifier(r);
  const detail::DenseDistances dense(d);
  return detail::descent_step(m, dense, r, fanny_objective(m, d, r)).memberships;
}

/// Label of the largest membership in each row, in [1..K]; ties go to the
/// lowest cluster index.
inline std::vector<int> closest_hard_clustering(const MembershipMatrix& m) {
  std::vector<int> labels(m.n());
  for (std::size_t i = 0; i < m.n(); ++i) {
    const auto row = m.row(i);
    std::size_t best = 0;
    for (std::size_t v = 1; v < row.size(); ++v)
      if (row[v] > row[best])
        best = v;
    labels[i] = static_cast<int>(best) + 1;
  }
  return labels;
}

/// Normalized Dunn partition coefficient: 1 for hard partitions, 0 for the
/// uniform fuzzy partition.
inline double normalized_dunn_partition_coefficient(const MembershipMatrix& m) {
  if (m.k() < 2)
    throw Error("normalized Dunn partition coefficient is undefined for one "
                "cluster");
  double sq = 0.0;
  for (double v : m.values())
    sq += v * v;
  const auto k = static_cast<double>(m.k());
  const auto n = static_cast<double>(m.n());
  return ((k / n) * sq - 1.0) / (k - 1.0);
}

/// Starting memberships for a solve.
inline MembershipMatrix initial_memberships(std::size_t n, std::size_t k,
                                            InitMode mode,
                                            std::uint64_t seed) {
  std::vector<double> values(n * k);
  if (mode == InitMode::DeterministicStripes) {
    const double off = 0.1 / static_cast<double>(k - 1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t v = 0; v < k; ++v)
        values[i * k + v] = v == i % k ? 0.9 : off;
    return MembershipBuilder::adopt(std::move(values), n, k);
  }
  // Uniform draw from the simplex: normalized unit exponentials. Uniforms
  // come straight from the engine's bits so the stream is portable.
  std::mt19937_64 engine(seed);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t v = 0; v < k; ++v) {
      const double uni =
          (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
      values[i * k + v] = -std::log(uni);
      sum += values[i * k + v];
    }
    for (std::size_t v = 0; v < k; ++v)
      values[i * k + v] /= sum;
  }
  return MembershipBuilder::adopt(std::move(values), n, k);
}

namespace detail {

inline void check_solve_inputs(const DistanceMatrix& d,
                               const FannyConfig& config) {
  config.validate(d.size());
  if (!d.all_finite())
    throw Error("distance matrix contains non-finite values");
}

inline FannyResult solve_from(const DenseDistances& d, double initial_objective,
                              const FannyConfig& config,
                              MembershipMatrix initial) {
  FannyResult result;
  result.memberships = std::move(initial);
  double previous = initial_objective;
  result.objective_trace.push_back(previous);

  for (int it = 0; it < config.max_iter; ++it) {
    auto step = descent_step(result.memberships, d, config.r, previous);
    result.memberships = std::move(step.memberships);
    const double current = step.objective;
    result.objective_trace.push_back(current);
    result.n_iter = it + 1;
    const double change =
        std::abs(current - previous) / std::max(previous, 1e-300);
    previous = current;
    if (change < config.tol) {
      result.converged = true;
      break;
    }
  }
  result.hard_labels = closest_hard_clustering(result.memberships);
  result.n_dpc = normalized_dunn_partition_coefficient(result.memberships);
  return result;
}

} // namespace detail

/// Iterates fanny_iterate from `initial` until the relative objective change
/// drops below config.tol or config.max_iter sweeps have run.
inline FannyResult fanny_solve(const DistanceMatrix& d,
                               const FannyConfig& config,
                               MembershipMatrix initial) {
  detail::check_solve_inputs(d, config);
  if (initial.n() != d.size() || initial.k() != config.k)
    throw Error("initial memberships do not match n or k");
  const double f0 = fanny_objective(initial, d, config.r);
  return detail::solve_from(detail::DenseDistances(d), f0, config,
                            std::move(initial));
}

/// Seed of start `index` (start 0 uses the configured seed itself).
inline std::uint64_t start_seed(std::uint64_t seed, int index) {
  if (index == 0)
    return seed;
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(index);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Runs config.starts solves concurrently and keeps the one with the lowest
/// objective (earliest start on ties), so the result does not depend on
/// scheduling.
inline FannyResult fanny_solve(const DistanceMatrix& d,
                               const FannyConfig& config) {
  detail::check_solve_inputs(d, config);
  const detail::DenseDistances dense(d);
  std::vector<std::future<FannyResult>> runs;
  for (int s = 0; s < config.starts; ++s) {
    const InitMode mode = s == 0 ? config.init : InitMode::SeededRandom;
    runs.push_back(std::async(std::launch::async, [&, mode, s] {
      auto init = initial_memberships(d.size(), config.k, mode,
                                      start_seed(config.seed, s));
      const double f0 = fanny_objective(init, d, config.r);
      return detail::solve_from(dense, f0, config, std::move(init));
    }));
  }
  std::optional<FannyResult> best;
  for (auto& run : runs) {
    FannyResult r = run.get();
    if (!best || r.objective() < best->objective())
      best = std::move(r);
  }
  return std::move(*best);
}

} // namespace fuzzyburst
