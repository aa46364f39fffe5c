#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "susy/factorops.hpp"
#include "susy/support.hpp"

namespace susy {

/// u1 = u - 2 lap ln phi; analytic Laplacian when the support has one, else a
/// five-point stencil on nodal ln phi (one-sided second differences on the edges).
inline ScalarField<Grid2D> partner_potential_2d(const std::function<double(Point)>& u, const SupportSpec& support,
                                                const Grid2D& grid) {
  const ScalarField<Grid2D> log_phi = sample_log_phi(support, grid);
  Vector lap = Vector::Zero(static_cast<Eigen::Index>(grid.size()));
  if (support.laplacian_log_phi) {
    for (std::size_t i = 0; i < grid.size(); ++i) lap[static_cast<Eigen::Index>(i)] = support.laplacian_log_phi(grid.point(i));
  } else {
    const Vector& l = log_phi.values();
    for (int axis : {0, 1}) {
      const std::size_t n = grid.extent(axis);
      const auto s = static_cast<Eigen::Index>(grid.stride(axis));
      const double h2 = grid.spacing(axis) * grid.spacing(axis);
      for (Eigen::Index idx = 0; idx < l.size(); ++idx) {
        const std::size_t i = (static_cast<std::size_t>(idx) / static_cast<std::size_t>(s)) % n;
        if (i == 0)
          lap[idx] += (2 * l[idx] - 5 * l[idx + s] + 4 * l[idx + 2 * s] - l[idx + 3 * s]) / h2;
        else if (i + 1 == n)
          lap[idx] += (2 * l[idx] - 5 * l[idx - s] + 4 * l[idx - 2 * s] - l[idx - 3 * s]) / h2;
        else
          lap[idx] += (l[idx + s] - 2 * l[idx] + l[idx - s]) / h2;
      }
    }
  }
  Vector out(lap.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[static_cast<Eigen::Index>(i)] = u(grid.point(i)) - 2.0 * lap[static_cast<Eigen::Index>(i)];
  return {grid, std::move(out)};
}

/// Two solutions of h0 . = E0 . sampled on one grid; phi must be positive.
/// The line-integral reference point is the lower-left grid corner.
class MoutardPair {
 public:
  MoutardPair(ScalarField<Grid2D> psi, ScalarField<Grid2D> phi, double e0)
      : psi_(std::move(psi)), phi_(std::move(phi)), e0_(e0) {
    if (!(psi_.grid() == phi_.grid())) throw InvalidArgument("MoutardPair: psi and phi live on different grids");
    for (std::size_t i = 0; i < phi_.size(); ++i)
      if (!(phi_[i] > 0.0)) {
        const Point p = phi_.grid().point(i);
        std::ostringstream os;
        os << "MoutardPair: phi is not positive at grid point " << i << " (" << p.x << ", " << p.y << ")";
        throw InvalidSupport(os.str());
      }
  }

  [[nodiscard]] const Grid2D& grid() const { return phi_.grid(); }
  [[nodiscard]] const ScalarField<Grid2D>& psi() const { return psi_; }
  [[nodiscard]] const ScalarField<Grid2D>& phi() const { return phi_; }
  [[nodiscard]] double e0() const { return e0_; }
  [[nodiscard]] ScalarField<Grid2D> log_phi() const { return {grid(), phi_.values().array().log().matrix()}; }
  [[nodiscard]] ScalarField<Grid2D> ratio() const { return {grid(), psi_.values().cwiseQuotient(phi_.values())}; }

  /// W_m = phi d_m psi - psi d_m phi (second-order differences).
  [[nodiscard]] std::array<Vector, 2> wronskian() const {
    std::array<Vector, 2> w;
    for (int m : {0, 1}) {
      const Vector dpsi = gradient_component(psi_, m).values();
      const Vector dphi = gradient_component(phi_, m).values();
      w[static_cast<std::size_t>(m)] = phi_.values().cwiseProduct(dpsi) - psi_.values().cwiseProduct(dphi);
    }
    return w;
  }

 private:
  ScalarField<Grid2D> psi_;
  ScalarField<Grid2D> phi_;
  double e0_;
};

/// Planar Coulomb pair at E0 = -alpha^2: phi = exp(-alpha r) and the second radial
/// solution psi = exp(-alpha r) Ei(2 alpha r). The grid must avoid the origin.
inline MoutardPair coulomb_pair(double alpha, const Grid2D& grid) {
  if (!(alpha > 0.0)) throw InvalidArgument("coulomb_pair: alpha must be positive");
  const auto phi = sample(grid, [alpha](Point p) { return std::exp(-alpha * p.radius()); });
  const auto psi = sample(grid, [alpha](Point p) {
    const double r = p.radius();
    return std::exp(-alpha * r) * std::expint(2.0 * alpha * r);
  });
  return {psi, phi, -alpha * alpha};
}

enum class PathOrder { HorizontalFirst, VerticalFirst };

struct GridIndex {
  std::size_t i = 0;  // x index
  std::size_t j = 0;  // y index
  bool operator==(const GridIndex&) const = default;
};

/// psi1 = (1/phi) int dx_k eps_km (phi d_m psi - psi d_m phi) along L-shaped paths from
/// the lower-left corner, trapezoid rule; psi1 = 0 at the corner.
inline ScalarField<Grid2D> moutard_transform(const MoutardPair& pair, PathOrder order = PathOrder::HorizontalFirst) {
  const Grid2D& g = pair.grid();
  const auto w = pair.wronskian();
  const double hx = g.spacing(0);
  const double hy = g.spacing(1);
  const auto at = [&](std::size_t i, std::size_t j) { return static_cast<Eigen::Index>(g.index(i, j)); };
  // Along x the integrand is W_2, along y it is -W_1.
  Vector integral = Vector::Zero(static_cast<Eigen::Index>(g.size()));
  if (order == PathOrder::HorizontalFirst) {
    for (std::size_t i = 1; i < g.nx(); ++i)
      integral[at(i, 0)] = integral[at(i - 1, 0)] + 0.5 * hx * (w[1][at(i - 1, 0)] + w[1][at(i, 0)]);
    for (std::size_t i = 0; i < g.nx(); ++i)
      for (std::size_t j = 1; j < g.ny(); ++j)
        integral[at(i, j)] = integral[at(i, j - 1)] - 0.5 * hy * (w[0][at(i, j - 1)] + w[0][at(i, j)]);
  } else {
    for (std::size_t j = 1; j < g.ny(); ++j)
      integral[at(0, j)] = integral[at(0, j - 1)] - 0.5 * hy * (w[0][at(0, j - 1)] + w[0][at(0, j)]);
    for (std::size_t j = 0; j < g.ny(); ++j)
      for (std::size_t i = 1; i < g.nx(); ++i)
        integral[at(i, j)] = integral[at(i - 1, j)] + 0.5 * hx * (w[1][at(i - 1, j)] + w[1][at(i, j)]);
  }
  return {g, integral.cwiseQuotient(pair.phi().values())};
}

/// The same integral along an explicit lattice path that starts at the reference
/// corner and moves one grid edge per step; returns psi1 at the path's end.
inline double moutard_line_integral(const MoutardPair& pair, const std::vector<GridIndex>& path) {
  const Grid2D& g = pair.grid();
  if (path.empty() || !(path.front() == GridIndex{0, 0})) throw InvalidArgument("path must start at the reference corner (0, 0)");
  for (const auto& p : path)
    if (p.i >= g.nx() || p.j >= g.ny()) throw InvalidArgument("path leaves grid");
  const auto w = pair.wronskian();
  double integral = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) {
    const GridIndex a = path[k - 1];
    const GridIndex b = path[k];
    const auto ia = static_cast<Eigen::Index>(g.index(a.i, a.j));
    const auto ib = static_cast<Eigen::Index>(g.index(b.i, b.j));
    const long di = static_cast<long>(b.i) - static_cast<long>(a.i);
    const long dj = static_cast<long>(b.j) - static_cast<long>(a.j);
    if (std::abs(di) + std::abs(dj) != 1) throw InvalidArgument("path must move along single grid edges");
    if (di != 0)
      integral += static_cast<double>(di) * 0.5 * g.spacing(0) * (w[1][ia] + w[1][ib]);
    else
      integral -= static_cast<double>(dj) * 0.5 * g.spacing(1) * (w[0][ia] + w[0][ib]);
  }
  const GridIndex end = path.back();
  return integral / pair.phi()[g.index(end.i, end.j)];
}

/// Mask of grid points at least `band` nodes away from every edge.
inline std::vector<bool> interior_mask(const Grid2D& g, std::size_t band) {
  std::vector<bool> mask(g.size(), false);
  for (std::size_t i = band; i + band < g.nx(); ++i)
    for (std::size_t j = band; j + band < g.ny(); ++j) mask[g.index(i, j)] = true;
  return mask;
}

inline double masked_norm(const Vector& v, const std::vector<bool>& mask, double cell_volume) {
  const Eigen::Index n = static_cast<Eigen::Index>(mask.size());
  double sum = 0.0;
  for (Eigen::Index c = 0; c < v.size() / n; ++c)
    for (Eigen::Index i = 0; i < n; ++i)
      if (mask[static_cast<std::size_t>(i)]) sum += v[c * n + i] * v[c * n + i];
  return std::sqrt(cell_volume * sum);
}

/// |(h1 - E0) psi1| / |psi1| with h1 = q_m q_m^+ + E0 built from the pair's phi
/// samples. The two-node-wide stencil would otherwise see the edge columns, whose
/// one-sided derivatives put an O(h^2) kink into psi1; three nodes are dropped.
inline double partner_eigen_residual(const MoutardPair& pair, const ScalarField<Grid2D>& psi1) {
  const ScalarField<Grid2D> l = pair.log_phi();
  const LinearOperator q0 = build_q(l, 0);
  const LinearOperator q1 = build_q(l, 1);
  const Vector& f = psi1.values();
  const Vector r = q0.apply(q0.adjoint().apply(f)) + q1.apply(q1.adjoint().apply(f));
  const auto mask = interior_mask(pair.grid(), 3);
  const double cell = pair.grid().cell_volume();
  return masked_norm(r, mask, cell) / masked_norm(f, mask, cell);
}

/// |d_m (phi^2 d_m f)| at least three nodes inside the grid, f = psi / phi (second-order differences).
inline double conservation_residual(const MoutardPair& pair) {
  const ScalarField<Grid2D> f = pair.ratio();
  const Vector phi2 = pair.phi().values().cwiseAbs2();
  Vector div = Vector::Zero(f.values().size());
  for (int m : {0, 1}) {
    const ScalarField<Grid2D> flux(pair.grid(), phi2.cwiseProduct(gradient_component(f, m).values()));
    div += gradient_component(flux, m).values();
  }
  return masked_norm(div, interior_mask(pair.grid(), 3), pair.grid().cell_volume());
}

struct MatrixCandidate {
  VectorField<Grid2D> field;  // phi d_m f
  double discrepancy = 0.0;   // relative interior difference to q_m psi
};

/// psi~_m computed as q_m psi and as phi d_m f with f = psi/phi; returns the latter.
/// `grad_f` supplies d_m f analytically; otherwise f is differenced numerically.
inline MatrixCandidate matrix_candidate(const MoutardPair& pair, double tolerance = 0.05,
                                        const std::function<std::array<double, 2>(Point)>& grad_f = nullptr) {
  const Grid2D& g = pair.grid();
  const ScalarField<Grid2D> l = pair.log_phi();
  const Vector& phi = pair.phi().values();
  std::array<Vector, 2> from_q;
  std::array<Vector, 2> from_f;
  const ScalarField<Grid2D> f = pair.ratio();
  for (int m : {0, 1}) {
    const auto k = static_cast<std::size_t>(m);
    from_q[k] = build_q(l, m).apply(pair.psi().values());
    if (grad_f) {
      from_f[k] = Vector(phi.size());
      for (std::size_t i = 0; i < g.size(); ++i) from_f[k][static_cast<Eigen::Index>(i)] = phi[static_cast<Eigen::Index>(i)] * grad_f(g.point(i))[k];
    } else {
      from_f[k] = phi.cwiseProduct(gradient_component(f, m).values());
    }
  }
  Vector a(2 * phi.size());
  Vector b(2 * phi.size());
  a << from_q[0], from_q[1];
  b << from_f[0], from_f[1];
  const auto mask = interior_mask(g, 1);
  const double cell = g.cell_volume();
  const double scale = std::max(masked_norm(a, mask, cell), masked_norm(b, mask, cell));
  const double psi_scale = masked_norm(pair.psi().values(), mask, cell);
  const double discrepancy = scale <= 1e-12 * psi_scale ? 0.0 : masked_norm(a - b, mask, cell) / scale;
  if (discrepancy > tolerance) {
    std::ostringstream os;
    os << "inconsistent pair: q psi and phi grad(psi/phi) differ by " << discrepancy << " (tolerance " << tolerance << ")";
    throw NumericalError(os.str());
  }
  return {VectorField<Grid2D>({g, std::move(from_f[0])}, {g, std::move(from_f[1])}), discrepancy};
}

struct MembershipOptions {
  std::optional<double> core_radius;  // leave out points with r < core_radius
  double normalization_tolerance = 1e-8;
};

struct MembershipReport {
  double norm = 0.0;              // (psi~, psi~)
  double rho_sigma_sum = 0.0;     // (rho + sigma, rho + sigma) / 4 E0^2
  double rho_sigma_inner = 0.0;   // (rho, sigma) / E0^2
  double rho_residual = 0.0;      // |rho - E0 psi~|
  double sigma_residual = 0.0;    // |sigma - E0 psi~|
  double annihilation_q = 0.0;    // |q_m^+ psi~_m|
  double annihilation_p = 0.0;    // |p_m^+ psi~_m|
  std::size_t points = 0;         // grid points entering the products
};

/// Keeps points with r >= core_radius (all points when unset).
inline std::vector<bool> region_mask(const Grid2D& g, std::optional<double> core_radius) {
  std::vector<bool> mask(g.size(), true);
  if (core_radius)
    for (std::size_t i = 0; i < g.size(); ++i) mask[i] = g.point(i).radius() >= *core_radius;
  return mask;
}

/// psi~ scaled to unit norm over the region.
inline VectorField<Grid2D> normalized(const VectorField<Grid2D>& f, std::optional<double> core_radius = std::nullopt) {
  const double n = masked_norm(f.stacked(), region_mask(f.grid(), core_radius), f.grid().cell_volume());
  if (!(n > 0.0)) throw InvalidArgument("normalized: zero field");
  return {{f.grid(), f[0].values() / n}, {f.grid(), f[1].values() / n}};
}

/// rho_l = h_lm psi~_m and sigma_l = H_lm psi~_m with the identities they obey for
/// a normalized level-E0 eigenfield.
inline MembershipReport level_membership_diagnostics(const VectorField<Grid2D>& psi_tilde, const Hamiltonians2D& hs,
                                                     const MembershipOptions& options = {}) {
  const Grid2D& g = psi_tilde.grid();
  if (!(g == hs.grid)) throw InvalidArgument("level_membership_diagnostics: field and Hamiltonians use different grids");
  const auto mask = region_mask(g, options.core_radius);
  const double cell = g.cell_volume();
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  const auto dot = [&](const Vector& a, const Vector& b) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < a.size() / n; ++c)
      for (Eigen::Index i = 0; i < n; ++i)
        if (mask[static_cast<std::size_t>(i)]) s += a[c * n + i] * b[c * n + i];
    return cell * s;
  };
  MembershipReport r;
  const Vector psi = psi_tilde.stacked();
  r.norm = dot(psi, psi);
  if (std::abs(r.norm - 1.0) > options.normalization_tolerance) {
    std::ostringstream os;
    os << "level_membership_diagnostics: input is not normalized (norm^2 = " << r.norm << ")";
    throw InvalidArgument(os.str());
  }
  const Vector rho = hs.h.apply(psi);
  const Vector sigma = hs.H.apply(psi);
  const double e0 = hs.e0;
  r.rho_sigma_sum = dot(rho + sigma, rho + sigma) / (4.0 * e0 * e0);
  r.rho_sigma_inner = dot(rho, sigma) / (e0 * e0);
  r.rho_residual = std::sqrt(dot(rho - e0 * psi, rho - e0 * psi));
  r.sigma_residual = std::sqrt(dot(sigma - e0 * psi, sigma - e0 * psi));
  const Vector aq = hs.q_dag[0].apply(psi.head(n)) + hs.q_dag[1].apply(psi.tail(n));
  const Vector ap = hs.p_dag[0].apply(psi.head(n)) + hs.p_dag[1].apply(psi.tail(n));
  r.annihilation_q = std::sqrt(dot(aq, aq));
  r.annihilation_p = std::sqrt(dot(ap, ap));
  r.points = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
  return r;
}

}  // namespace susy
