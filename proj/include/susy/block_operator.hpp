#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "susy/linear_operator.hpp"

namespace susy {

/// Rectangular array of equally sized square blocks; absent blocks are zero.
class BlockOperator {
 public:
  BlockOperator(std::size_t block_rows, std::size_t block_cols, Eigen::Index block_size)
      : rows_(block_rows), cols_(block_cols), size_(block_size), blocks_(block_rows * block_cols) {
    if (block_rows == 0 || block_cols == 0 || block_size <= 0) throw InvalidArgument("BlockOperator: empty shape");
  }

  static BlockOperator square(std::size_t n, Eigen::Index block_size) { return {n, n, block_size}; }

  [[nodiscard]] std::size_t block_rows() const { return rows_; }
  [[nodiscard]] std::size_t block_cols() const { return cols_; }
  [[nodiscard]] Eigen::Index block_size() const { return size_; }
  [[nodiscard]] Eigen::Index rows() const { return static_cast<Eigen::Index>(rows_) * size_; }
  [[nodiscard]] Eigen::Index cols() const { return static_cast<Eigen::Index>(cols_) * size_; }

  [[nodiscard]] const std::optional<LinearOperator>& block(std::size_t i, std::size_t j) const { return blocks_.at(i * cols_ + j); }
  [[nodiscard]] bool is_zero(std::size_t i, std::size_t j) const { return !block(i, j).has_value(); }

  void set(std::size_t i, std::size_t j, LinearOperator op) {
    if (op.rows() != size_ || op.cols() != size_) throw InvalidArgument("BlockOperator::set: block size mismatch");
    blocks_.at(i * cols_ + j) = std::move(op);
  }

  [[nodiscard]] BlockOperator adjoint() const {
    BlockOperator out(cols_, rows_, size_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (const auto& b = block(i, j)) out.set(j, i, b->adjoint());
    return out;
  }

  [[nodiscard]] Vector apply(const Vector& x) const {
    if (x.size() != cols()) throw InvalidArgument("BlockOperator::apply: size mismatch");
    Vector y = Vector::Zero(rows());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (const auto& b = block(i, j))
          y.segment(static_cast<Eigen::Index>(i) * size_, size_) +=
              b->matrix() * x.segment(static_cast<Eigen::Index>(j) * size_, size_);
    return y;
  }
  Vector operator()(const Vector& x) const { return apply(x); }

  /// One sparse matrix for the whole operator.
  [[nodiscard]] SparseMatrix flatten() const {
    std::vector<Triplet> triplets;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (const auto& b = block(i, j)) {
          const SparseMatrix& m = b->matrix();
          for (Eigen::Index r = 0; r < m.outerSize(); ++r)
            for (SparseMatrix::InnerIterator it(m, r); it; ++it)
              triplets.emplace_back(static_cast<int>(static_cast<Eigen::Index>(i) * size_ + it.row()),
                                    static_cast<int>(static_cast<Eigen::Index>(j) * size_ + it.col()), it.value());
        }
    SparseMatrix out(rows(), cols());
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
  }

  friend BlockOperator operator*(const BlockOperator& a, const BlockOperator& b) {
    if (a.cols_ != b.rows_ || a.size_ != b.size_) throw InvalidArgument("BlockOperator: composition shape mismatch");
    BlockOperator out(a.rows_, b.cols_, a.size_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < b.cols_; ++j) {
        std::optional<LinearOperator> acc;
        for (std::size_t k = 0; k < a.cols_; ++k) {
          const auto& x = a.block(i, k);
          const auto& y = b.block(k, j);
          if (!x || !y) continue;
          LinearOperator term = *x * *y;
          acc = acc ? *acc + term : std::move(term);
        }
        if (acc) out.set(i, j, std::move(*acc));
      }
    return out;
  }

  friend BlockOperator operator+(const BlockOperator& a, const BlockOperator& b) { return combine(a, b, 1.0); }
  friend BlockOperator operator-(const BlockOperator& a, const BlockOperator& b) { return combine(a, b, -1.0); }

  friend BlockOperator operator*(double s, const BlockOperator& a) {
    BlockOperator out(a.rows_, a.cols_, a.size_);
    for (std::size_t i = 0; i < a.blocks_.size(); ++i)
      if (a.blocks_[i]) out.blocks_[i] = s * *a.blocks_[i];
    return out;
  }

  /// Direct sum diag(a, b).
  static BlockOperator direct_sum(const BlockOperator& a, const BlockOperator& b) {
    if (a.size_ != b.size_) throw InvalidArgument("BlockOperator::direct_sum: block size mismatch");
    BlockOperator out(a.rows_ + b.rows_, a.cols_ + b.cols_, a.size_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j)
        if (const auto& x = a.block(i, j)) out.set(i, j, *x);
    for (std::size_t i = 0; i < b.rows_; ++i)
      for (std::size_t j = 0; j < b.cols_; ++j)
        if (const auto& x = b.block(i, j)) out.set(a.rows_ + i, a.cols_ + j, *x);
    return out;
  }

  /// [[0, 0], [c, 0]] for square c.
  static BlockOperator lower(const BlockOperator& c) {
    if (c.rows_ != c.cols_) throw InvalidArgument("BlockOperator::lower: operand must be square");
    BlockOperator out(2 * c.rows_, 2 * c.cols_, c.size_);
    for (std::size_t i = 0; i < c.rows_; ++i)
      for (std::size_t j = 0; j < c.cols_; ++j)
        if (const auto& x = c.block(i, j)) out.set(c.rows_ + i, j, *x);
    return out;
  }

  /// Sub-array of blocks starting at (i0, j0).
  [[nodiscard]] BlockOperator sub(std::size_t i0, std::size_t j0, std::size_t nrows, std::size_t ncols) const {
    if (i0 + nrows > rows_ || j0 + ncols > cols_) throw InvalidArgument("BlockOperator::sub: out of range");
    BlockOperator out(nrows, ncols, size_);
    for (std::size_t i = 0; i < nrows; ++i)
      for (std::size_t j = 0; j < ncols; ++j)
        if (const auto& x = block(i0 + i, j0 + j)) out.set(i, j, *x);
    return out;
  }

  [[nodiscard]] std::size_t nonzero_blocks() const {
    std::size_t n = 0;
    for (const auto& b : blocks_) n += b.has_value();
    return n;
  }

 private:
  static BlockOperator combine(const BlockOperator& a, const BlockOperator& b, double sign) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.size_ != b.size_) throw InvalidArgument("BlockOperator: shape mismatch");
    BlockOperator out(a.rows_, a.cols_, a.size_);
    for (std::size_t i = 0; i < a.blocks_.size(); ++i) {
      const auto& x = a.blocks_[i];
      const auto& y = b.blocks_[i];
      if (x && y)
        out.blocks_[i] = sign > 0 ? *x + *y : *x - *y;
      else if (x)
        out.blocks_[i] = *x;
      else if (y)
        out.blocks_[i] = sign * *y;
    }
    return out;
  }

  std::size_t rows_;
  std::size_t cols_;
  Eigen::Index size_;
  std::vector<std::optional<LinearOperator>> blocks_;
};

inline BlockOperator anticommutator(const BlockOperator& a, const BlockOperator& b) { return a * b + b * a; }
inline BlockOperator commutator(const BlockOperator& a, const BlockOperator& b) { return a * b - b * a; }

}  // namespace susy
