#include "selinfl/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_set>

#include "selinfl/error.hpp"
#include "selinfl/parallel.hpp"

namespace selinfl {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_subset: return "invalid-subset";
    case ErrorKind::column_degenerate: return "column-degenerate";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::invalid_spec: return "invalid-spec";
    case ErrorKind::degenerate_noise: return "degenerate-noise";
    case ErrorKind::degenerate_correlation: return "degenerate-correlation";
    case ErrorKind::degenerate_cluster: return "degenerate-cluster";
    case ErrorKind::ambiguous_embedding: return "ambiguous-embedding";
    case ErrorKind::parse: return "parse";
    case ErrorKind::missing_column: return "missing-column";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

namespace {

std::string describe_columns(const std::vector<std::size_t>& columns) {
  std::ostringstream os;
  os << "zero-variance predictor column(s):";
  for (auto c : columns) os << ' ' << (c + 1);
  return os.str();
}

}  // namespace

ColumnDegenerateError::ColumnDegenerateError(std::vector<std::size_t> columns)
    : Error(ErrorKind::column_degenerate, describe_columns(columns)), columns_(std::move(columns)) {}

unsigned default_threads() {
  if (const char* env = std::getenv("SELINFL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Dataset::Dataset(Vector y, Matrix x) : y_(std::move(y)), x_(std::move(x)) {
  row_ids_.resize(static_cast<std::size_t>(y_.size()));
  std::iota(row_ids_.begin(), row_ids_.end(), 1);
  if (x_.rows() != y_.size())
    throw Error(ErrorKind::invalid_spec, "design matrix rows do not match response length");
  if (y_.size() < 1 || x_.cols() < 1)
    throw Error(ErrorKind::invalid_spec, "dataset needs at least one row and one predictor");
}

Dataset::Dataset(Vector y, Matrix x, std::vector<int> row_ids)
    : y_(std::move(y)), x_(std::move(x)), row_ids_(std::move(row_ids)) {
  if (x_.rows() != y_.size() || static_cast<Eigen::Index>(row_ids_.size()) != y_.size())
    throw Error(ErrorKind::invalid_spec, "response, design and row ids differ in length");
  if (y_.size() < 1 || x_.cols() < 1)
    throw Error(ErrorKind::invalid_spec, "dataset needs at least one row and one predictor");
  std::unordered_set<int> seen(row_ids_.begin(), row_ids_.end());
  if (seen.size() != row_ids_.size()) throw Error(ErrorKind::invalid_spec, "row ids are not unique");
}

bool operator==(const Dataset& a, const Dataset& b) {
  return a.row_ids_ == b.row_ids_ && a.y_.size() == b.y_.size() && a.x_.rows() == b.x_.rows() &&
         a.x_.cols() == b.x_.cols() && a.y_ == b.y_ && a.x_ == b.x_;
}

RowSubset::RowSubset(std::vector<std::size_t> positions, std::size_t n)
    : positions_(std::move(positions)), n_(n) {
  std::sort(positions_.begin(), positions_.end());
  if (std::adjacent_find(positions_.begin(), positions_.end()) != positions_.end())
    throw Error(ErrorKind::invalid_subset, "duplicate row position in subset");
  if (!positions_.empty() && positions_.back() >= n)
    throw Error(ErrorKind::invalid_subset, "row position " + std::to_string(positions_.back() + 1) +
                                               " exceeds row count " + std::to_string(n));
}

RowSubset RowSubset::all(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return RowSubset(std::move(idx), n);
}

bool RowSubset::contains(std::size_t pos) const {
  return std::binary_search(positions_.begin(), positions_.end(), pos);
}

RowSubset RowSubset::complement() const {
  std::vector<std::size_t> out;
  out.reserve(n_ - positions_.size());
  auto it = positions_.begin();
  for (std::size_t i = 0; i < n_; ++i) {
    if (it != positions_.end() && *it == i) {
      ++it;
    } else {
      out.push_back(i);
    }
  }
  return RowSubset(std::move(out), n_);
}

Dataset reorder(const Dataset& data, const std::vector<std::size_t>& order) {
  const auto m = static_cast<Eigen::Index>(order.size());
  Vector y(m);
  Matrix x(m, data.x().cols());
  std::vector<int> ids(order.size());
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto src = static_cast<Eigen::Index>(order[static_cast<std::size_t>(k)]);
    y(k) = data.y()(src);
    x.row(k) = data.x().row(src);
    ids[static_cast<std::size_t>(k)] = data.row_ids()[static_cast<std::size_t>(src)];
  }
  return Dataset(std::move(y), std::move(x), std::move(ids));
}

Dataset subset(const Dataset& data, const RowSubset& rows) {
  if (rows.universe() != data.n())
    throw Error(ErrorKind::invalid_subset, "subset was built for a dataset of a different size");
  if (rows.empty()) throw Error(ErrorKind::invalid_subset, "empty row subset");
  return reorder(data, rows.positions());
}

Dataset drop_one(const Dataset& data, std::size_t i) {
  const std::size_t n = data.n();
  if (i >= n) throw Error(ErrorKind::invalid_subset, "row position out of range");
  if (n < 3) throw Error(ErrorKind::invalid_subset, "dropping a row would leave fewer than two rows");
  std::vector<std::size_t> keep;
  keep.reserve(n - 1);
  for (std::size_t k = 0; k < n; ++k)
    if (k != i) keep.push_back(k);
  return reorder(data, keep);
}

StandardizationInfo column_moments(const Matrix& x) {
  const double n = static_cast<double>(x.rows());
  StandardizationInfo info;
  info.column_means = x.colwise().mean().transpose();
  info.column_scales.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double ss = (x.col(j).array() - info.column_means(j)).square().sum();
    info.column_scales(j) = std::sqrt(ss / n);
  }
  return info;
}

std::vector<std::size_t> degenerate_columns(const StandardizationInfo& info) {
  std::vector<std::size_t> bad;
  for (Eigen::Index j = 0; j < info.column_scales.size(); ++j) {
    const double s = info.column_scales(j);
    if (!(s > 1e-13 * std::abs(info.column_means(j))) || s == 0.0)
      bad.push_back(static_cast<std::size_t>(j));
  }
  return bad;
}

std::pair<Dataset, StandardizationInfo> standardize_columns(const Dataset& data) {
  StandardizationInfo info = column_moments(data.x());
  if (auto bad = degenerate_columns(info); !bad.empty()) throw ColumnDegenerateError(std::move(bad));
  Matrix xs = (data.x().rowwise() - info.column_means.transpose()).array().rowwise() /
              info.column_scales.transpose().array();
  return {Dataset(data.y(), std::move(xs), data.row_ids()), std::move(info)};
}

Matrix unstandardize(const Matrix& standardized, const StandardizationInfo& info) {
  return (standardized.array().rowwise() * info.column_scales.transpose().array()).matrix().rowwise() +
         info.column_means.transpose();
}

std::vector<std::size_t> canonical_order(const Dataset& data) {
  std::vector<std::size_t> order(data.n());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const Vector& y = data.y();
  const Matrix& x = data.x();
  const Eigen::Index p = x.cols();
  auto less = [&](std::size_t a, std::size_t b) {
    const auto ia = static_cast<Eigen::Index>(a);
    const auto ib = static_cast<Eigen::Index>(b);
    if (y(ia) != y(ib)) return y(ia) < y(ib);
    for (Eigen::Index j = 0; j < p; ++j)
      if (x(ia, j) != x(ib, j)) return x(ia, j) < x(ib, j);
    return false;
  };
  std::stable_sort(order.begin(), order.end(), less);
  return order;
}

std::uint64_t content_hash(const Dataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](double v) {
    if (v == 0.0) v = 0.0;  // fold -0.0 onto +0.0
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  };
  for (auto r : canonical_order(data)) {
    const auto i = static_cast<Eigen::Index>(r);
    mix(data.y()(i));
    for (Eigen::Index j = 0; j < data.x().cols(); ++j) mix(data.x()(i, j));
  }
  return h;
}

}  // namespace selinfl
