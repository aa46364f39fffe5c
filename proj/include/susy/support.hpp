#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "susy/error.hpp"
#include "susy/grid.hpp"

namespace susy {

/// How a support function behaves far away and near the origin (2D, radial).
/// Exponential growth (decay) at infinity is encoded as infinity_power = +inf (-inf).
struct AsymptoticExponents {
  double infinity_power = 0.0;  // phi ~ r^a as r -> infinity
  double origin_power = 0.0;    // phi ~ r^b as r -> 0
};

/// Positive solution phi of h0 phi = E0 phi together with its log-derivatives.
/// All closures take a Point; 1D supports read only Point::x.
struct SupportSpec {
  std::string name;
  double e0 = 0.0;
  std::function<double(Point)> log_phi;
  std::function<std::array<double, 2>(Point)> grad_log_phi;
  std::function<double(Point)> laplacian_log_phi;  // optional
  std::optional<AsymptoticExponents> exponents;

  [[nodiscard]] double phi(Point p) const { return std::exp(log_phi(p)); }

  /// The support 1/phi with the same E0.
  [[nodiscard]] SupportSpec inverse() const {
    SupportSpec out;
    out.name = "inverse(" + name + ")";
    out.e0 = e0;
    out.log_phi = [f = log_phi](Point p) { return -f(p); };
    out.grad_log_phi = [g = grad_log_phi](Point p) {
      const auto d = g(p);
      return std::array<double, 2>{-d[0], -d[1]};
    };
    if (laplacian_log_phi) out.laplacian_log_phi = [l = laplacian_log_phi](Point p) { return -l(p); };
    if (exponents) out.exponents = AsymptoticExponents{-exponents->infinity_power, -exponents->origin_power};
    return out;
  }
};

/// Samples ln phi on the grid; throws naming the first point where phi is not a
/// finite positive number.
template <GridType G>
ScalarField<G> sample_log_phi(const SupportSpec& support, const G& grid) {
  if (!support.log_phi) throw InvalidSupport("support '" + support.name + "' has no ln phi closure");
  Vector v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point p = grid.point(i);
    const double l = support.log_phi(p);
    if (!std::isfinite(l)) {
      std::ostringstream os;
      os << "support '" << support.name << "' is not positive and finite at grid point " << i << " (" << p.x;
      if (G::dimension == 2) os << ", " << p.y;
      os << ")";
      throw InvalidSupport(os.str());
    }
    v[static_cast<Eigen::Index>(i)] = l;
  }
  return {grid, std::move(v)};
}

template <GridType G>
void validate(const SupportSpec& support, const G& grid) {
  (void)sample_log_phi(support, grid);
}

/// phi = 1, E0 = 0.
inline SupportSpec constant_support(double e0 = 0.0) {
  SupportSpec s;
  s.name = "constant";
  s.e0 = e0;
  s.log_phi = [](Point) { return 0.0; };
  s.grad_log_phi = [](Point) { return std::array<double, 2>{0.0, 0.0}; };
  s.laplacian_log_phi = [](Point) { return 0.0; };
  s.exponents = AsymptoticExponents{0.0, 0.0};
  return s;
}

/// phi = exp(b r) / r^k in the plane, E0 = -b^2.
inline SupportSpec cylindrical_support(double b, double k) {
  if (!(b > 0.0) || !(k > 0.0)) throw InvalidArgument("cylindrical support needs b > 0 and k > 0");
  SupportSpec s;
  s.name = "cylindrical";
  s.e0 = -b * b;
  s.log_phi = [b, k](Point p) {
    const double r = p.radius();
    return b * r - k * std::log(r);
  };
  s.grad_log_phi = [b, k](Point p) {
    const double r = p.radius();
    const double radial = (b - k / r) / r;
    return std::array<double, 2>{radial * p.x, radial * p.y};
  };
  // In 2D, laplacian(r) = 1/r and laplacian(ln r) = 0 away from the origin.
  s.laplacian_log_phi = [b](Point p) { return b / p.radius(); };
  s.exponents = AsymptoticExponents{INFINITY, -k};
  return s;
}

/// Planar Coulomb ground state phi = exp(-alpha r), E0 = -alpha^2.
inline SupportSpec coulomb_ground_support(double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("Coulomb support needs alpha > 0");
  SupportSpec s;
  s.name = "coulomb";
  s.e0 = -alpha * alpha;
  s.log_phi = [alpha](Point p) { return -alpha * p.radius(); };
  s.grad_log_phi = [alpha](Point p) {
    const double r = p.radius();
    return std::array<double, 2>{-alpha * p.x / r, -alpha * p.y / r};
  };
  s.laplacian_log_phi = [alpha](Point p) { return -alpha / p.radius(); };
  s.exponents = AsymptoticExponents{-INFINITY, 0.0};
  return s;
}

/// phi = r^a in the plane (E0 = 0 for a = 0 only; used to probe asymptotics).
inline SupportSpec power_support(double a) {
  SupportSpec s;
  s.name = "power";
  s.e0 = 0.0;
  s.log_phi = [a](Point p) { return a * std::log(p.radius()); };
  s.grad_log_phi = [a](Point p) {
    const double r2 = p.x * p.x + p.y * p.y;
    return std::array<double, 2>{a * p.x / r2, a * p.y / r2};
  };
  s.laplacian_log_phi = [](Point) { return 0.0; };
  s.exponents = AsymptoticExponents{a, a};
  return s;
}

/// 1D oscillator ground state exp(-x^2/2) for u = x^2, E0 = 1.
inline SupportSpec oscillator_support() {
  SupportSpec s;
  s.name = "oscillator";
  s.e0 = 1.0;
  s.log_phi = [](Point p) { return -0.5 * p.x * p.x; };
  s.grad_log_phi = [](Point p) { return std::array<double, 2>{-p.x, 0.0}; };
  s.laplacian_log_phi = [](Point) { return -1.0; };
  return s;
}

/// E0 + |grad ln phi|^2 + laplacian ln phi: the potential u with (-laplacian + u) phi = E0 phi.
inline double seed_potential(const SupportSpec& s, Point p) {
  if (!s.laplacian_log_phi) throw InvalidArgument("support '" + s.name + "' has no analytic Laplacian");
  const auto g = s.grad_log_phi(p);
  return s.e0 + g[0] * g[0] + g[1] * g[1] + s.laplacian_log_phi(p);
}

}  // namespace susy
