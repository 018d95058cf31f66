#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace boxdesign {

// Dense row-major matrix.
template <typename T>
class Matrix {
  public:
    using value_type = T;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) throw std::invalid_argument("Matrix: data size does not match shape");
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    T&       operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<T>       row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    [[nodiscard]] std::span<const T> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    [[nodiscard]] std::span<const T> data() const noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

  private:
    std::size_t    rows_ = 0;
    std::size_t    cols_ = 0;
    std::vector<T> data_;
};

}  // namespace boxdesign
