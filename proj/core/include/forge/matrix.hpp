#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace forge::model {

/// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::vector<double> column(std::size_t c) const;

  /// Rows picked by index, in the given order.
  Matrix select_rows(std::span<const std::size_t> rows) const;
  /// Columns picked by index, in the given order.
  Matrix select_cols(std::span<const std::size_t> cols) const;

  std::span<const double> data() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

std::vector<double> select(std::span<const double> values, std::span<const std::size_t> indices);

}  // namespace forge::model
