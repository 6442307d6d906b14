#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace selinfl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Response vector and design matrix with stable 1-based row identities.
/// Immutable after construction.
class Dataset {
 public:
  /// Row ids default to 1..n.
  Dataset(Vector y, Matrix x);
  Dataset(Vector y, Matrix x, std::vector<int> row_ids);

  const Vector& y() const noexcept { return y_; }
  const Matrix& x() const noexcept { return x_; }
  const std::vector<int>& row_ids() const noexcept { return row_ids_; }

  std::size_t n() const noexcept { return static_cast<std::size_t>(y_.size()); }
  std::size_t p() const noexcept { return static_cast<std::size_t>(x_.cols()); }

  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  Vector y_;
  Matrix x_;
  std::vector<int> row_ids_;
};

/// Sorted, duplicate-free 0-based row positions into a dataset of size n.
class RowSubset {
 public:
  RowSubset() = default;

  /// Sorts the positions; throws invalid_subset on duplicates or positions >= n.
  RowSubset(std::vector<std::size_t> positions, std::size_t n);

  static RowSubset all(std::size_t n);

  const std::vector<std::size_t>& positions() const noexcept { return positions_; }
  std::size_t size() const noexcept { return positions_.size(); }
  bool empty() const noexcept { return positions_.empty(); }
  std::size_t universe() const noexcept { return n_; }
  bool contains(std::size_t pos) const;

  RowSubset complement() const;

  friend bool operator==(const RowSubset&, const RowSubset&) = default;

 private:
  std::vector<std::size_t> positions_;
  std::size_t n_ = 0;
};

struct StandardizationInfo {
  Vector column_means;
  Vector column_scales;  // population (divide-by-n) standard deviations
};

/// Rows in ascending position order; row ids carried over.
Dataset subset(const Dataset& data, const RowSubset& rows);

/// 0-based i. Throws invalid_subset when i is out of range or fewer than 2 rows would remain.
Dataset drop_one(const Dataset& data, std::size_t i);

/// Throws ColumnDegenerateError listing every zero-variance column.
std::pair<Dataset, StandardizationInfo> standardize_columns(const Dataset& data);

Matrix unstandardize(const Matrix& standardized, const StandardizationInfo& info);

/// Computes means and population scales without checking for degeneracy.
StandardizationInfo column_moments(const Matrix& x);

/// Indices of the zero-variance columns in `info`.
std::vector<std::size_t> degenerate_columns(const StandardizationInfo& info);

/// Positions ordered lexicographically by row content (y first, then x).
/// Any row permutation of a dataset yields the same sequence of row contents.
std::vector<std::size_t> canonical_order(const Dataset& data);

/// Rows reordered by `order` (positions into data).
Dataset reorder(const Dataset& data, const std::vector<std::size_t>& order);

/// FNV-1a over the bytes of the row contents in canonical order; row ids excluded.
std::uint64_t content_hash(const Dataset& data);

}  // namespace selinfl
