#pragma once

// Feature tables and packed symmetric distance matrices shared by the
// clustering, validity and catalog code.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fuzzyburst {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// N x p table of finite reals with column names and row identifiers.
/// Values are stored row-major.
class FeatureTable {
public:
  FeatureTable() = default;

  FeatureTable(std::vector<double> values, std::size_t rows,
               std::vector<std::string> column_names,
               std::vector<std::string> row_ids)
      : values_(std::move(values)), rows_(rows),
        cols_(column_names.size()), column_names_(std::move(column_names)),
        row_ids_(std::move(row_ids)) {
    if (rows_ == 0 || cols_ == 0)
      throw Error("empty input");
    if (values_.size() != rows_ * cols_)
      throw Error("feature table: value count does not match rows x columns");
    if (row_ids_.size() != rows_)
      throw Error("feature table: row_ids length does not match row count");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]))
        throw Error("feature table: non-finite value in row " +
                    row_ids_[i / cols_] + ", column " +
                    column_names_[i % cols_]);
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  double operator()(std::size_t i, std::size_t c) const {
    return values_[i * cols_ + c];
  }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      out[i] = values_[i * cols_ + c];
    return out;
  }

  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<std::string>& column_names() const noexcept {
    return column_names_;
  }
  const std::vector<std::string>& row_ids() const noexcept { return row_ids_; }

private:
  std::vector<double> values_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::string> column_names_;
  std::vector<std::string> row_ids_;
};

/// Symmetric N x N dissimilarity matrix with zero diagonal, stored as the
/// packed strict lower triangle. Symmetry holds by construction.
class DistanceMatrix {
public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n)
      : n_(n), packed_(n < 2 ? 0 : n * (n - 1) / 2, 0.0) {}

  /// Builds from a full row-major n x n matrix. Rejects negative or NaN
  /// entries, a nonzero diagonal and asymmetry.
  static DistanceMatrix from_full(std::span<const double> full, std::size_t n) {
    if (full.size() != n * n)
      throw Error("distance matrix: expected n*n entries");
    DistanceMatrix d(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (full[i * n + i] != 0.0)
        throw Error("distance matrix: nonzero diagonal at " +
                    std::to_string(i));
      for (std::size_t j = 0; j < i; ++j) {
        const double a = full[i * n + j];
        if (a != full[j * n + i])
          throw Error("distance matrix: not symmetric at (" +
                      std::to_string(i) + "," + std::to_string(j) + ")");
        d.set(i, j, a);
      }
    }
    return d;
  }

  std::size_t size() const noexcept { return n_; }

  double operator()(std::size_t i, std::size_t j) const {
    if (i == j)
      return 0.0;
    return i > j ? packed_[index(i, j)] : packed_[index(j, i)];
  }

  void set(std::size_t i, std::size_t j, double value) {
    if (i == j)
      throw Error("distance matrix: diagonal is fixed at zero");
    if (!(value >= 0.0))
      throw Error("distance matrix: distances must be nonnegative");
    if (i > j)
      packed_[index(i, j)] = value;
    else
      packed_[index(j, i)] = value;
  }

  /// Copies row i into out (length N), including the zero diagonal entry.
  void fill_row(std::size_t i, std::span<double> out) const {
    for (std::size_t j = 0; j < i; ++j)
      out[j] = packed_[index(i, j)];
    out[i] = 0.0;
    for (std::size_t j = i + 1; j < n_; ++j)
      out[j] = packed_[index(j, i)];
  }

  bool all_finite() const {
    for (double v : packed_)
      if (!std::isfinite(v))
        return false;
    return true;
  }

  const std::vector<double>& packed() const noexcept { return packed_; }

private:
  static std::size_t index(std::size_t i, std::size_t j) noexcept {
    return i * (i - 1) / 2 + j;
  }

  std::size_t n_ = 0;
  std::vector<double> packed_;
};

/// Pairwise Euclidean distances between the rows of a feature table.
inline DistanceMatrix euclidean_distance_matrix(const FeatureTable& features) {
  if (features.empty())
    throw Error("empty input");
  const std::size_t n = features.rows();
  DistanceMatrix d(n);
  for (std::size_t i = 1; i < n; ++i) {
    const auto xi = features.row(i);
    for (std::size_t j = 0; j < i; ++j) {
      const auto xj = features.row(j);
      double ss = 0.0;
      for (std::size_t c = 0; c < xi.size(); ++c) {
        const double diff = xi[c] - xj[c];
        ss += diff * diff;
      }
      d.set(i, j, std::sqrt(ss));
    }
  }
  return d;
}

/// Sample mean and standard deviation (denominator N-1).
inline std::pair<double, double> mean_and_sd(std::span<const double> x) {
  const auto n = static_cast<double>(x.size());
  double sum = 0.0;
  for (double v : x)
    sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : x)
    ss += (v - mean) * (v - mean);
  const double sd = x.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {mean, sd};
}

/// Centers each column and scales it to unit sample standard deviation.
inline FeatureTable standardize_columns(const FeatureTable& features) {
  if (features.empty())
    throw Error("empty input");
  const std::size_t n = features.rows();
  const std::size_t p = features.cols();
  std::vector<double> out(n * p);
  for (std::size_t c = 0; c < p; ++c) {
    const auto col = features.column(c);
    const auto [mean, sd] = mean_and_sd(col);
    if (!(sd > 0.0))
      throw Error("cannot standardize constant column '" +
                  features.column_names()[c] + "'");
    for (std::size_t i = 0; i < n; ++i)
      out[i * p + c] = (col[i] - mean) / sd;
  }
  return FeatureTable(std::move(out), n, features.column_names(),
                      features.row_ids());
}

} // namespace fuzzyburst
