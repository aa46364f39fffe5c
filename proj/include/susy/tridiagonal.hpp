#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "susy/error.hpp"
#include "susy/grid.hpp"

namespace susy {

/// Real symmetric tridiagonal matrix; eigenvalues by Sturm-sequence bisection,
/// eigenvectors by inverse iteration.
class SymmetricTridiagonal {
 public:
  SymmetricTridiagonal(Vector diagonal, Vector off_diagonal) : d_(std::move(diagonal)), e_(std::move(off_diagonal)) {
    if (d_.size() < 1 || e_.size() != d_.size() - 1) throw InvalidArgument("SymmetricTridiagonal: inconsistent sizes");
  }

  [[nodiscard]] Eigen::Index size() const { return d_.size(); }
  [[nodiscard]] const Vector& diagonal() const { return d_; }
  [[nodiscard]] const Vector& off_diagonal() const { return e_; }

  /// Number of eigenvalues strictly below x.
  [[nodiscard]] Eigen::Index count_below(double x) const {
    Eigen::Index count = 0;
    double q = d_[0] - x;
    const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    for (Eigen::Index i = 0;; ++i) {
      if (q == 0.0) q = -tiny;
      if (q < 0.0) ++count;
      if (i + 1 == size()) break;
      q = d_[i + 1] - x - e_[i] * e_[i] / q;
    }
    return count;
  }

  [[nodiscard]] std::pair<double, double> gershgorin_bounds() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index i = 0; i < size(); ++i) {
      const double radius = (i > 0 ? std::abs(e_[i - 1]) : 0.0) + (i + 1 < size() ? std::abs(e_[i]) : 0.0);
      lo = std::min(lo, d_[i] - radius);
      hi = std::max(hi, d_[i] + radius);
    }
    return {lo, hi};
  }

  /// k-th smallest eigenvalue (k = 0 is the lowest), to absolute tolerance tol
  /// or a few ulps of the matrix norm, whichever is larger.
  [[nodiscard]] double eigenvalue(Eigen::Index k, double tol = 1e-12) const {
    if (k < 0 || k >= size()) throw InvalidArgument("SymmetricTridiagonal: eigenvalue index out of range");
    auto [lo, hi] = gershgorin_bounds();
    const double scale = std::max(std::abs(lo), std::abs(hi));
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() * scale;
    lo -= floor;
    hi += floor;
    for (int it = 0; it < 200 && hi - lo > std::max(tol, floor); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (count_below(mid) > k)
        hi = mid;
      else
        lo = mid;
    }
    return 0.5 * (lo + hi);
  }

  [[nodiscard]] Vector apply(const Vector& x) const {
    Vector y = d_.cwiseProduct(x);
    y.head(size() - 1) += e_.cwiseProduct(x.tail(size() - 1));
    y.tail(size() - 1) += e_.cwiseProduct(x.head(size() - 1));
    return y;
  }

  /// Unit eigenvector for an (accurate) eigenvalue estimate.
  [[nodiscard]] Vector eigenvector(double lambda, int iterations = 3) const {
    const Eigen::Index n = size();
    Vector x = Vector::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] += 1e-3 * std::sin(0.7 * static_cast<double>(i));
    x.normalize();
    for (int it = 0; it < iterations; ++it) {
      x = solve_shifted(lambda, x);
      const double norm = x.norm();
      if (!std::isfinite(norm) || norm == 0.0) throw NumericalError("inverse iteration broke down");
      x /= norm;
    }
    // Fix the sign so that the largest component is positive.
    Eigen::Index imax = 0;
    x.cwiseAbs().maxCoeff(&imax);
    if (x[imax] < 0) x = -x;
    return x;
  }

 private:
  /// (T - s I) y = b by Gaussian elimination with partial pivoting.
  [[nodiscard]] Vector solve_shifted(double s, const Vector& b) const {
    const Eigen::Index n = size();
    const double tiny = std::numeric_limits<double>::epsilon() * std::max(1.0, d_.cwiseAbs().maxCoeff());
    // Row i of the factor holds up to three entries: a (diag), c (first super), f (second super).
    Vector a = d_.array() - s;
    Vector c = Vector::Zero(n);
    Vector f = Vector::Zero(n);
    Vector lower = e_;
    Vector rhs = b;
    c.head(n - 1) = e_;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (std::abs(lower[i]) > std::abs(a[i])) {
        // Swap rows i and i+1.
        const double a1 = lower[i];
        const double c1 = a[i + 1];
        const double f1 = i + 1 < n - 1 ? c[i + 1] : 0.0;
        const double a0 = a[i];
        const double c0 = c[i];
        const double f0 = f[i];
        a[i] = a1;
        c[i] = c1;
        f[i] = f1;
        std::swap(rhs[i], rhs[i + 1]);
        const double m = a0 / a1;
        a[i + 1] = c0 - m * c1;
        if (i + 1 < n - 1) c[i + 1] = f0 - m * f1;
        rhs[i + 1] -= m * rhs[i];
      } else {
        if (a[i] == 0.0) a[i] = tiny;
        const double m = lower[i] / a[i];
        a[i + 1] -= m * c[i];
        if (i + 1 < n - 1) c[i + 1] -= m * f[i];
        rhs[i + 1] -= m * rhs[i];
      }
    }
    if (a[n - 1] == 0.0) a[n - 1] = tiny;
    Vector y(n);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      double v = rhs[i];
      if (i + 1 < n) v -= c[i] * y[i + 1];
      if (i + 2 < n) v -= f[i] * y[i + 2];
      y[i] = v / a[i];
    }
    return y;
  }

  Vector d_;
  Vector e_;
};

}  // namespace susy
