#pragma once

#include <iomanip>
#include <ostream>
#include <utility>

#include "susy/error.hpp"
#include "susy/grid.hpp"

namespace susy {

/// Immutable sparse linear map between discrete fields. The adjoint is the matrix
/// transpose, i.e. the adjoint with respect to the uniform-weight product `inner`.
class LinearOperator {
 public:
  LinearOperator() = default;
  explicit LinearOperator(SparseMatrix matrix) : matrix_(std::move(matrix)) { matrix_.makeCompressed(); }

  static LinearOperator identity(Eigen::Index n) {
    SparseMatrix m(n, n);
    m.setIdentity();
    return LinearOperator(std::move(m));
  }

  static LinearOperator zero(Eigen::Index rows, Eigen::Index cols) { return LinearOperator(SparseMatrix(rows, cols)); }

  static LinearOperator diagonal(const Vector& d) {
    SparseMatrix m(d.size(), d.size());
    m.reserve(Eigen::VectorXi::Constant(d.size(), 1));
    for (Eigen::Index i = 0; i < d.size(); ++i) m.insert(i, i) = d[i];
    return LinearOperator(std::move(m));
  }

  [[nodiscard]] Eigen::Index rows() const { return matrix_.rows(); }
  [[nodiscard]] Eigen::Index cols() const { return matrix_.cols(); }
  [[nodiscard]] const SparseMatrix& matrix() const { return matrix_; }

  [[nodiscard]] Vector apply(const Vector& x) const {
    if (x.size() != cols()) throw InvalidArgument("LinearOperator::apply: size mismatch");
    return matrix_ * x;
  }
  Vector operator()(const Vector& x) const { return apply(x); }

  template <GridType G>
  ScalarField<G> operator()(const ScalarField<G>& f) const {
    return {f.grid(), apply(f.values())};
  }

  [[nodiscard]] LinearOperator adjoint() const { return LinearOperator(SparseMatrix(matrix_.transpose())); }

  friend LinearOperator operator*(const LinearOperator& a, const LinearOperator& b) {
    if (a.cols() != b.rows()) throw InvalidArgument("LinearOperator: composition size mismatch");
    return LinearOperator(SparseMatrix(a.matrix_ * b.matrix_));
  }
  friend LinearOperator operator+(const LinearOperator& a, const LinearOperator& b) {
    check_same_shape(a, b);
    return LinearOperator(SparseMatrix(a.matrix_ + b.matrix_));
  }
  friend LinearOperator operator-(const LinearOperator& a, const LinearOperator& b) {
    check_same_shape(a, b);
    return LinearOperator(SparseMatrix(a.matrix_ - b.matrix_));
  }
  friend LinearOperator operator*(double s, const LinearOperator& a) { return LinearOperator(SparseMatrix(s * a.matrix_)); }
  friend LinearOperator operator-(const LinearOperator& a) { return -1.0 * a; }

  /// Adds s times the identity (square operators only).
  [[nodiscard]] LinearOperator shifted(double s) const {
    if (rows() != cols()) throw InvalidArgument("LinearOperator::shifted: operator is not square");
    return *this + s * identity(rows());
  }

  /// Coordinate triplets (row, col, value), one nonzero per line.
  void write_triplets_csv(std::ostream& os) const {
    os << "row,col,value\n" << std::setprecision(17);
    for (Eigen::Index r = 0; r < matrix_.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(matrix_, r); it; ++it) os << it.row() << ',' << it.col() << ',' << it.value() << '\n';
  }

 private:
  static void check_same_shape(const LinearOperator& a, const LinearOperator& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidArgument("LinearOperator: shape mismatch");
  }

  SparseMatrix matrix_;
};

}  // namespace susy
