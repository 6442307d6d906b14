#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace selinfl {

enum class ErrorKind {
  invalid_subset,
  column_degenerate,
  convergence,
  invalid_spec,
  degenerate_noise,
  degenerate_correlation,
  degenerate_cluster,
  ambiguous_embedding,
  parse,
  missing_column,
  config,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ColumnDegenerateError : public Error {
 public:
  explicit ColumnDegenerateError(std::vector<std::size_t> columns);

  /// 0-based predictor columns with zero variance.
  const std::vector<std::size_t>& columns() const noexcept { return columns_; }

 private:
  std::vector<std::size_t> columns_;
};

class DegenerateCorrelationError : public Error {
 public:
  /// column == npos means the response itself has zero variance.
  DegenerateCorrelationError(std::size_t column, const std::string& what)
      : Error(ErrorKind::degenerate_correlation, what), column_(column) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

/// Raised by CSV ingestion; row is 1-based in the data body, column is the header name.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::string column, const std::string& what)
      : Error(ErrorKind::parse, what), row_(row), column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

}  // namespace selinfl
