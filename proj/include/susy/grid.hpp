#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "susy/error.hpp"

namespace susy {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

struct Point {
  double x = 0.0;
  double y = 0.0;

  [[nodiscard]] double radius() const { return std::hypot(x, y); }
};

namespace detail {

inline double checked_spacing(double lo, double hi, std::size_t n, const char* what) {
  if (n < 3) throw InvalidArgument(std::string(what) + ": need at least 3 points");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
    throw InvalidArgument(std::string(what) + ": need finite bounds with max > min");
  return (hi - lo) / static_cast<double>(n - 1);
}

}  // namespace detail

/// Uniform 1D grid on [x_min, x_max] including both endpoints.
class Grid1D {
 public:
  static constexpr int dimension = 1;

  Grid1D(double x_min, double x_max, std::size_t n)
      : x_min_(x_min), x_max_(x_max), n_(n), h_(detail::checked_spacing(x_min, x_max, n, "Grid1D")) {}

  [[nodiscard]] double x_min() const { return x_min_; }
  [[nodiscard]] double x_max() const { return x_max_; }
  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] double spacing(int axis = 0) const { return check_axis(axis), h_; }
  [[nodiscard]] std::size_t extent(int axis = 0) const { return check_axis(axis), n_; }
  [[nodiscard]] std::size_t stride(int axis = 0) const { return check_axis(axis), 1; }
  [[nodiscard]] double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * h_; }
  [[nodiscard]] Point point(std::size_t i) const { return {x(i), 0.0}; }
  [[nodiscard]] double cell_volume() const { return h_; }

  bool operator==(const Grid1D&) const = default;

 private:
  static int check_axis(int axis) {
    if (axis != 0) throw InvalidArgument("Grid1D: axis " + std::to_string(axis) + " out of range");
    return axis;
  }

  double x_min_;
  double x_max_;
  std::size_t n_;
  double h_;
};

/// Uniform grid in the radial coordinate; r_min > 0 keeps the origin off the grid.
class RadialGrid {
 public:
  static constexpr int dimension = 1;

  RadialGrid(double r_min, double r_max, std::size_t n)
      : r_min_(r_min), r_max_(r_max), n_(n), h_(detail::checked_spacing(r_min, r_max, n, "RadialGrid")) {
    if (!(r_min > 0.0)) throw InvalidArgument("RadialGrid: r_min must be positive");
  }

  /// n points r_i = (i + 1/2) h with h = r_max / n; a Dirichlet node sits at r = 0 and r = r_max + h/2.
  static RadialGrid staggered(double r_max, std::size_t n) {
    if (n < 3) throw InvalidArgument("RadialGrid: need at least 3 points");
    if (!(r_max > 0.0) || !std::isfinite(r_max)) throw InvalidArgument("RadialGrid: r_max must be positive");
    const double h = r_max / static_cast<double>(n);
    return {0.5 * h, r_max - 0.5 * h, n};
  }

  [[nodiscard]] double r_min() const { return r_min_; }
  [[nodiscard]] double r_max() const { return r_max_; }
  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] double spacing(int axis = 0) const { return check_axis(axis), h_; }
  [[nodiscard]] std::size_t extent(int axis = 0) const { return check_axis(axis), n_; }
  [[nodiscard]] std::size_t stride(int axis = 0) const { return check_axis(axis), 1; }
  [[nodiscard]] double r(std::size_t i) const { return r_min_ + static_cast<double>(i) * h_; }
  [[nodiscard]] Point point(std::size_t i) const { return {r(i), 0.0}; }
  [[nodiscard]] double cell_volume() const { return h_; }

  bool operator==(const RadialGrid&) const = default;

 private:
  static int check_axis(int axis) {
    if (axis != 0) throw InvalidArgument("RadialGrid: axis " + std::to_string(axis) + " out of range");
    return axis;
  }

  double r_min_;
  double r_max_;
  std::size_t n_;
  double h_;
};

/// Tensor-product grid, row-major: index = i1 * n2 + i2 with i1 along x and i2 along y.
class Grid2D {
 public:
  static constexpr int dimension = 2;

  Grid2D(double x_min, double x_max, std::size_t nx, double y_min, double y_max, std::size_t ny)
      : x_min_(x_min),
        x_max_(x_max),
        y_min_(y_min),
        y_max_(y_max),
        nx_(nx),
        ny_(ny),
        hx_(detail::checked_spacing(x_min, x_max, nx, "Grid2D x-axis")),
        hy_(detail::checked_spacing(y_min, y_max, ny, "Grid2D y-axis")) {}

  /// n x n grid with spacing 2L/(n-1), shifted by a quarter cell so that no node is
  /// at the origin (or on either axis) for any n.
  static Grid2D centered(double half_width, std::size_t n) {
    const double h = detail::checked_spacing(-half_width, half_width, n, "Grid2D");
    const double lo = -half_width + 0.25 * h;
    const double hi = lo + static_cast<double>(n - 1) * h;
    return {lo, hi, n, lo, hi, n};
  }

  [[nodiscard]] std::size_t size() const { return nx_ * ny_; }
  [[nodiscard]] std::size_t nx() const { return nx_; }
  [[nodiscard]] std::size_t ny() const { return ny_; }
  [[nodiscard]] double x_min() const { return x_min_; }
  [[nodiscard]] double x_max() const { return x_max_; }
  [[nodiscard]] double y_min() const { return y_min_; }
  [[nodiscard]] double y_max() const { return y_max_; }
  [[nodiscard]] double spacing(int axis) const { return check_axis(axis) == 0 ? hx_ : hy_; }
  [[nodiscard]] std::size_t extent(int axis) const { return check_axis(axis) == 0 ? nx_ : ny_; }
  [[nodiscard]] std::size_t stride(int axis) const { return check_axis(axis) == 0 ? ny_ : 1; }
  [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const { return i * ny_ + j; }
  [[nodiscard]] double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * hx_; }
  [[nodiscard]] double y(std::size_t j) const { return y_min_ + static_cast<double>(j) * hy_; }
  [[nodiscard]] Point point(std::size_t idx) const { return {x(idx / ny_), y(idx % ny_)}; }
  [[nodiscard]] double cell_volume() const { return hx_ * hy_; }

  /// Same spacing, (2n-1) points per axis around the same centre: the domain doubles.
  [[nodiscard]] Grid2D doubled() const {
    const double cx = 0.5 * (x_min_ + x_max_);
    const double cy = 0.5 * (y_min_ + y_max_);
    const double wx = x_max_ - x_min_;
    const double wy = y_max_ - y_min_;
    return {cx - wx, cx + wx, 2 * nx_ - 1, cy - wy, cy + wy, 2 * ny_ - 1};
  }

  bool operator==(const Grid2D&) const = default;

 private:
  static int check_axis(int axis) {
    if (axis != 0 && axis != 1) throw InvalidArgument("Grid2D: axis " + std::to_string(axis) + " out of range");
    return axis;
  }

  double x_min_;
  double x_max_;
  double y_min_;
  double y_max_;
  std::size_t nx_;
  std::size_t ny_;
  double hx_;
  double hy_;
};

template <class G>
concept GridType = requires(const G& g, std::size_t i, int axis) {
  { G::dimension } -> std::convertible_to<int>;
  { g.size() } -> std::convertible_to<std::size_t>;
  { g.spacing(axis) } -> std::convertible_to<double>;
  { g.extent(axis) } -> std::convertible_to<std::size_t>;
  { g.stride(axis) } -> std::convertible_to<std::size_t>;
  { g.point(i) } -> std::convertible_to<Point>;
};

/// Real samples on a grid. Values are always finite.
template <GridType G>
class ScalarField {
 public:
  ScalarField(G grid, Vector values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.size()) != grid_.size())
      throw InvalidArgument("ScalarField: " + std::to_string(values_.size()) + " values for " +
                            std::to_string(grid_.size()) + " grid points");
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        const Point p = grid_.point(static_cast<std::size_t>(i));
        std::ostringstream os;
        os << "ScalarField: non-finite value at index " << i << " (" << p.x << ", " << p.y << ")";
        throw NumericalError(os.str());
      }
    }
  }

  explicit ScalarField(G grid) : grid_(std::move(grid)), values_(Vector::Zero(static_cast<Eigen::Index>(grid_.size()))) {}

  [[nodiscard]] const G& grid() const { return grid_; }
  [[nodiscard]] const Vector& values() const { return values_; }
  [[nodiscard]] std::size_t size() const { return grid_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

 private:
  G grid_;
  Vector values_;
};

/// Two-component field on a shared grid.
template <GridType G>
class VectorField {
 public:
  VectorField(ScalarField<G> first, ScalarField<G> second) : components_{std::move(first), std::move(second)} {
    if (!(components_[0].grid() == components_[1].grid()))
      throw InvalidArgument("VectorField: components live on different grids");
  }

  [[nodiscard]] const G& grid() const { return components_[0].grid(); }
  [[nodiscard]] const ScalarField<G>& operator[](std::size_t m) const { return components_.at(m); }

  /// Components stacked as one vector (first component first).
  [[nodiscard]] Vector stacked() const {
    Vector out(2 * components_[0].values().size());
    out << components_[0].values(), components_[1].values();
    return out;
  }

 private:
  std::array<ScalarField<G>, 2> components_;
};

template <GridType G, class F>
ScalarField<G> sample(const G& grid, F&& fn) {
  Vector v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) v[static_cast<Eigen::Index>(i)] = fn(grid.point(i));
  return {grid, std::move(v)};
}

enum class Stencil { Forward, Backward, Central };

/// Difference matrix along one axis. Forward and Backward use a one-sided stencil
/// in the row that would otherwise leave the grid (so constants map to zero);
/// Central uses zero (Dirichlet) ghost values and is exactly antisymmetric.
template <GridType G>
SparseMatrix difference_matrix(const G& grid, int axis, Stencil stencil) {
  const std::size_t n = grid.extent(axis);
  const std::size_t stride = grid.stride(axis);
  const double h = grid.spacing(axis);
  const std::size_t total = grid.size();
  std::vector<Triplet> triplets;
  triplets.reserve(2 * total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const std::size_t i = (idx / stride) % n;
    const auto row = static_cast<int>(idx);
    const auto col = [&](std::ptrdiff_t offset) {
      return static_cast<int>(static_cast<std::ptrdiff_t>(idx) + offset * static_cast<std::ptrdiff_t>(stride));
    };
    switch (stencil) {
      case Stencil::Forward:
        if (i + 1 < n) {
          triplets.emplace_back(row, col(1), 1.0 / h);
          triplets.emplace_back(row, row, -1.0 / h);
        } else {
          triplets.emplace_back(row, row, 1.0 / h);
          triplets.emplace_back(row, col(-1), -1.0 / h);
        }
        break;
      case Stencil::Backward:
        if (i > 0) {
          triplets.emplace_back(row, row, 1.0 / h);
          triplets.emplace_back(row, col(-1), -1.0 / h);
        } else {
          triplets.emplace_back(row, col(1), 1.0 / h);
          triplets.emplace_back(row, row, -1.0 / h);
        }
        break;
      case Stencil::Central:
        if (i + 1 < n) triplets.emplace_back(row, col(1), 0.5 / h);
        if (i > 0) triplets.emplace_back(row, col(-1), -0.5 / h);
        break;
    }
  }
  SparseMatrix m(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

template <GridType G>
ScalarField<G> forward_diff(const ScalarField<G>& field, int axis) {
  return {field.grid(), difference_matrix(field.grid(), axis, Stencil::Forward) * field.values()};
}

template <GridType G>
ScalarField<G> backward_diff(const ScalarField<G>& field, int axis) {
  return {field.grid(), difference_matrix(field.grid(), axis, Stencil::Backward) * field.values()};
}

/// Second-order derivative estimate: central in the interior, three-point one-sided at the edges.
template <GridType G>
ScalarField<G> gradient_component(const ScalarField<G>& field, int axis) {
  const G& grid = field.grid();
  const std::size_t n = grid.extent(axis);
  const auto stride = static_cast<Eigen::Index>(grid.stride(axis));
  const double h = grid.spacing(axis);
  const Vector& f = field.values();
  Vector out(f.size());
  for (Eigen::Index idx = 0; idx < f.size(); ++idx) {
    const std::size_t i = (static_cast<std::size_t>(idx) / static_cast<std::size_t>(stride)) % n;
    if (i == 0) {
      out[idx] = (-3.0 * f[idx] + 4.0 * f[idx + stride] - f[idx + 2 * stride]) / (2.0 * h);
    } else if (i + 1 == n) {
      out[idx] = (3.0 * f[idx] - 4.0 * f[idx - stride] + f[idx - 2 * stride]) / (2.0 * h);
    } else {
      out[idx] = (f[idx + stride] - f[idx - stride]) / (2.0 * h);
    }
  }
  return {grid, std::move(out)};
}

namespace detail {

inline Vector trapezoid_weights(std::size_t n, double h) {
  Vector w = Vector::Constant(static_cast<Eigen::Index>(n), h);
  w[0] *= 0.5;
  w[static_cast<Eigen::Index>(n) - 1] *= 0.5;
  return w;
}

}  // namespace detail

/// Trapezoid-rule integral of the samples over the grid domain.
inline double quadrature(const ScalarField<Grid1D>& field) {
  return detail::trapezoid_weights(field.size(), field.grid().spacing()).dot(field.values());
}

/// Trapezoid rule with the planar measure 2 pi r dr over [r_min, r_max].
inline double quadrature(const ScalarField<RadialGrid>& field) {
  const RadialGrid& g = field.grid();
  const Vector w = detail::trapezoid_weights(g.size(), g.spacing());
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    sum += w[k] * g.r(i) * field.values()[k];
  }
  return 2.0 * M_PI * sum;
}

inline double quadrature(const ScalarField<Grid2D>& field) {
  const Grid2D& g = field.grid();
  const Vector wx = detail::trapezoid_weights(g.nx(), g.spacing(0));
  const Vector wy = detail::trapezoid_weights(g.ny(), g.spacing(1));
  double sum = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t j = 0; j < g.ny(); ++j)
      sum += wx[static_cast<Eigen::Index>(i)] * wy[static_cast<Eigen::Index>(j)] *
             field.values()[static_cast<Eigen::Index>(g.index(i, j))];
  return sum;
}

template <GridType G>
ScalarField<G> product(const ScalarField<G>& a, const ScalarField<G>& b) {
  if (!(a.grid() == b.grid())) throw InvalidArgument("product: fields live on different grids");
  return {a.grid(), a.values().cwiseProduct(b.values())};
}

/// Discrete L2 product with uniform cell weights. Matrix transposes are adjoints in it.
inline double inner(const Vector& a, const Vector& b, double cell_volume) { return cell_volume * a.dot(b); }

template <GridType G>
double inner(const ScalarField<G>& a, const ScalarField<G>& b) {
  if (!(a.grid() == b.grid())) throw InvalidArgument("inner: fields live on different grids");
  return inner(a.values(), b.values(), a.grid().cell_volume());
}

template <GridType G>
double inner(const VectorField<G>& a, const VectorField<G>& b) {
  return inner(a[0], b[0]) + inner(a[1], b[1]);
}

// CSV: header row, one point per line.

template <GridType G>
void write_csv(std::ostream& os, const ScalarField<G>& field) {
  os << (G::dimension == 2 ? "x,y,value\n" : "x,value\n");
  os << std::setprecision(17);
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Point p = field.grid().point(i);
    os << p.x << ',';
    if constexpr (G::dimension == 2) os << p.y << ',';
    os << field[i] << '\n';
  }
}

template <GridType G>
void write_csv(const std::string& path, const ScalarField<G>& field) {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot open " + path + " for writing");
  write_csv(os, field);
}

namespace detail {

inline std::vector<std::vector<double>> read_rows(std::istream& is, std::size_t columns) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InvalidArgument("CSV: cannot parse '" + cell + "'");
      }
    }
    if (row.size() != columns)
      throw InvalidArgument("CSV: expected " + std::to_string(columns) + " columns, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline ScalarField<Grid1D> read_csv_1d(std::istream& is) {
  const auto rows = detail::read_rows(is, 2);
  if (rows.size() < 3) throw InvalidArgument("CSV: need at least 3 rows");
  Grid1D grid(rows.front()[0], rows.back()[0], rows.size());
  Vector v(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (std::abs(rows[i][0] - grid.x(i)) > 1e-9 * std::max(1.0, std::abs(grid.x(i))))
      throw InvalidArgument("CSV: coordinates are not uniformly spaced");
    v[static_cast<Eigen::Index>(i)] = rows[i][1];
  }
  return {grid, std::move(v)};
}

/// Expects rows in the order produced by write_csv (x outer, y inner).
inline ScalarField<Grid2D> read_csv_2d(std::istream& is) {
  const auto rows = detail::read_rows(is, 3);
  if (rows.size() < 9) throw InvalidArgument("CSV: need at least 3x3 rows");
  std::size_t ny = 1;
  while (ny < rows.size() && rows[ny][0] == rows[0][0]) ++ny;
  if (rows.size() % ny != 0) throw InvalidArgument("CSV: rows do not form a tensor grid");
  const std::size_t nx = rows.size() / ny;
  Grid2D grid(rows.front()[0], rows.back()[0], nx, rows.front()[1], rows.back()[1], ny);
  Vector v(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t idx = 0; idx < rows.size(); ++idx) {
    const Point p = grid.point(idx);
    const double tol = 1e-9 * std::max({1.0, std::abs(p.x), std::abs(p.y)});
    if (std::abs(rows[idx][0] - p.x) > tol || std::abs(rows[idx][1] - p.y) > tol)
      throw InvalidArgument("CSV: coordinates do not form a uniform row-major grid");
    v[static_cast<Eigen::Index>(idx)] = rows[idx][2];
  }
  return {grid, std::move(v)};
}

}  // namespace susy
