#pragma once

// Principal component analysis of a membership matrix. K is small, so the
// K x K covariance is diagonalized with cyclic Jacobi rotations.

#include "fuzzyburst/core.hpp"
#include "fuzzyburst/fanny.hpp"
#include "fuzzyburst/validity.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace fuzzyburst {

/// Eigen-decomposition of a symmetric matrix. `vectors` is row-major with
/// eigenvector c stored in column c.
struct SymmetricEigen {
  std::vector<double> values;
  std::vector<double> vectors;
  std::size_t dim = 0;

  double vector(std::size_t row, std::size_t c) const {
    return vectors[row * dim + c];
  }
};

/// Cyclic Jacobi eigen-solver. Eigenvalues come back non-increasing; each
/// eigenvector is oriented so its largest-magnitude coordinate is positive.
inline SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t dim,
                                   int max_sweeps = 100) {
  if (a.size() != dim * dim)
    throw Error("jacobi_eigen: expected a dim x dim matrix");
  std::vector<double> v(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i)
    v[i * dim + i] = 1.0;
  auto at = [&](std::size_t i, std::size_t j) -> double& {
    return a[i * dim + j];
  };

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        (i == j ? scale : off) += at(i, j) * at(i, j);
    if (off <= 1e-30 * scale || off == 0.0)
      break;

    for (std::size_t p = 0; p + 1 < dim; ++p) {
      for (std::size_t q = p + 1; q < dim; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0)
          continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < dim; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < dim; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < dim; ++k) {
          const double vkp = v[k * dim + p];
          const double vkq = v[k * dim + q];
          v[k * dim + p] = c * vkp - s * vkq;
          v[k * dim + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return at(x, x) > at(y, y);
  });

  SymmetricEigen out;
  out.dim = dim;
  out.values.resize(dim);
  out.vectors.assign(dim * dim, 0.0);
  for (std::size_t c = 0; c < dim; ++c) {
    const std::size_t src = order[c];
    out.values[c] = at(src, src);
    std::size_t argmax = 0;
    for (std::size_t r = 1; r < dim; ++r)
      if (std::abs(v[r * dim + src]) > std::abs(v[argmax * dim + src]))
        argmax = r;
    const double sign = v[argmax * dim + src] < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < dim; ++r)
      out.vectors[r * dim + c] = sign * v[r * dim + src];
  }
  return out;
}

struct PcaOptions {
  bool standardize = true;
  /// When a column is constant, center only instead of failing.
  bool allow_centering_fallback = false;
};

struct PcaResult {
  std::size_t n = 0;
  std::size_t k = 0;
  /// N x K row-major component scores.
  std::vector<double> scores;
  /// K x K row-major; component c is column c.
  std::vector<double> directions;
  /// Non-increasing, floored at zero.
  std::vector<double> eigenvalues;
  /// Share of total variance over all K components.
  std::vector<double> explained_fraction;
  /// Share over the non-degenerate components only (degenerate ones get 0).
  std::vector<double> explained_fraction_nondegenerate;
  std::size_t nondegenerate = 0;
  bool standardized = false;
  bool fell_back_to_centering = false;

  double score(std::size_t i, std::size_t c) const { return scores[i * k + c]; }
  double direction(std::size_t row, std::size_t c) const {
    return directions[row * k + c];
  }
};

inline constexpr double kDegenerateEigenRatio = 1e-10;
inline constexpr double kConstantColumnSd = 1e-12;

inline PcaResult membership_pca(const MembershipMatrix& m,
                                const PcaOptions& options = {}) {
  const std::size_t n = m.n();
  const std::size_t k = m.k();
  if (k < 2)
    throw Error("membership PCA requires at least two clusters");
  if (n < 2)
    throw Error("membership PCA requires at least two objects");

  PcaResult res;
  res.n = n;
  res.k = k;
  res.standardized = options.standardize;

  std::vector<double> z(n * k);
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i)
      col[i] = m(i, c);
    auto [mean, sd] = mean_and_sd(col);
    double scale = 1.0;
    // Memberships live in [0,1]; spread below this is rounding noise.
    const bool constant = !(sd > kConstantColumnSd);
    if (options.standardize) {
      if (!constant) {
        scale = sd;
      } else if (options.allow_centering_fallback) {
        res.fell_back_to_centering = true;
      } else {
        throw Error("membership column " + std::to_string(c + 1) +
                    " is constant; cannot standardize");
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      z[i * k + c] = (col[i] - mean) / scale;
  }
  if (res.fell_back_to_centering) {
    // Mixed scaling is meaningless; redo everything centered only.
    res.standardized = false;
    for (std::size_t c = 0; c < k; ++c) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        mean += m(i, c);
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i)
        z[i * k + c] = m(i, c) - mean;
    }
  }

  std::vector<double> cov(k * k, 0.0);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        s += z[i * k + a] * z[i * k + b];
      s /= static_cast<double>(n - 1);
      cov[a * k + b] = s;
      cov[b * k + a] = s;
    }

  const SymmetricEigen eig = jacobi_eigen(cov, k);
  res.directions = eig.vectors;
  res.eigenvalues.resize(k);
  for (std::size_t c = 0; c < k; ++c)
    res.eigenvalues[c] = std::max(eig.values[c], 0.0);

  const double largest = res.eigenvalues.front();
  if (!(largest > kConstantColumnSd * kConstantColumnSd))
    throw Error("membership PCA: all memberships are constant");
  const double total =
      std::accumulate(res.eigenvalues.begin(), res.eigenvalues.end(), 0.0);
  double nondeg_total = 0.0;
  for (double ev : res.eigenvalues)
    if (ev > kDegenerateEigenRatio * largest) {
      ++res.nondegenerate;
      nondeg_total += ev;
    }
  res.explained_fraction.resize(k);
  res.explained_fraction_nondegenerate.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    const double ev = res.eigenvalues[c];
    res.explained_fraction[c] = ev / total;
    res.explained_fraction_nondegenerate[c] =
        ev > kDegenerateEigenRatio * largest ? ev / nondeg_total : 0.0;
  }

  res.scores.assign(n * k, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < k; ++c) {
      double s = 0.0;
      for (std::size_t a = 0; a < k; ++a)
        s += z[i * k + a] * res.directions[a * k + c];
      res.scores[i * k + c] = s;
    }
  return res;
}

struct ScatterPoint {
  double pc1 = 0.0;
  double pc2 = 0.0;
  int label = 0;
};

/// (PC1, PC2, label) rows for the two leading components.
inline std::vector<ScatterPoint> emit_pc_scatter(const PcaResult& p,
                                                 const HardPartition& labels) {
  if (p.nondegenerate < 2)
    throw Error("PC scatter needs at least two non-degenerate components");
  if (labels.n() != p.n)
    throw Error("PC scatter: label count does not match score rows");
  std::vector<ScatterPoint> rows(p.n);
  for (std::size_t i = 0; i < p.n; ++i)
    rows[i] = {p.score(i, 0), p.score(i, 1), labels[i]};
  return rows;
}

} // namespace fuzzyburst
