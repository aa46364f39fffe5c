#pragma once

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "susy/moutard2d.hpp"
#include "susy/rational.hpp"
#include "susy/spectra.hpp"
#include "susy/support.hpp"

namespace susy {

/// phi = exp(b r) / r^k with b, k > 0 and E0 = -b^2.
struct CylindricalSeed {
  double b = 1.0;
  double k = 1.0;

  CylindricalSeed(double b_, double k_) : b(b_), k(k_) {
    if (!(b > 0.0) || !std::isfinite(b)) throw InvalidArgument("b must be positive, got " + std::to_string(b));
    if (!(k > 0.0) || !std::isfinite(k)) throw InvalidArgument("k must be positive, got " + std::to_string(k));
  }

  [[nodiscard]] double e0() const { return -b * b; }
  [[nodiscard]] SupportSpec support() const { return cylindrical_support(b, k); }
  [[nodiscard]] double phi(double r) const { return std::exp(b * r) / std::pow(r, k); }
};

struct SeedPotentials {
  std::function<double(double)> u;   // k^2/r^2 - b(2k - 1)/r
  std::function<double(double)> u1;  // k^2/r^2 - b(2k + 1)/r
  double cross_check = 0.0;          // max |u1 - (u - 2 lap ln phi)| over the probe radii
};

/// Both radial potentials; throws if u1 disagrees with u - 2 lap ln phi beyond 1e-10.
inline SeedPotentials seed_potentials(const CylindricalSeed& seed) {
  const double b = seed.b;
  const double k = seed.k;
  SeedPotentials p;
  p.u = [b, k](double r) { return k * k / (r * r) - b * (2.0 * k - 1.0) / r; };
  p.u1 = [b, k](double r) { return k * k / (r * r) - b * (2.0 * k + 1.0) / r; };
  const SupportSpec s = seed.support();
  for (int i = 0; i <= 200; ++i) {
    const double r = 0.05 * std::pow(2000.0, i / 200.0);
    const double via_support = p.u(r) - 2.0 * s.laplacian_log_phi(Point{r, 0.0});
    p.cross_check = std::max(p.cross_check, std::abs(p.u1(r) - via_support));
  }
  if (p.cross_check > 1e-10) {
    std::ostringstream os;
    os << "seed_potentials: partner potential mismatch " << p.cross_check;
    throw NumericalError(os.str());
  }
  return p;
}

/// f(r) = int_0^r dr' / (r' phi^2) = gamma(2k, 2br) / (2b)^(2k).
inline double f_radial(const CylindricalSeed& seed, double r) {
  return boost::math::tgamma_lower(2.0 * seed.k, 2.0 * seed.b * r) / std::pow(2.0 * seed.b, 2.0 * seed.k);
}

struct ZeroModeFields {
  ScalarField<Grid2D> inverse_phi;  // r^k exp(-b r)
  VectorField<Grid2D> grad_f;       // x_m / (r phi)^2
  VectorField<Grid2D> psi_tilde;    // phi grad f = x_m / (r^2 phi)
};

inline ZeroModeFields zero_mode_fields(const CylindricalSeed& seed, const Grid2D& grid) {
  const double b = seed.b;
  const double k = seed.k;
  const auto inv = sample(grid, [=](Point p) { return std::pow(p.radius(), k) * std::exp(-b * p.radius()); });
  const auto gf = [=](int m) {
    return sample(grid, [=](Point p) {
      const double r = p.radius();
      return (m == 0 ? p.x : p.y) * std::pow(r, 2.0 * k - 2.0) * std::exp(-2.0 * b * r);
    });
  };
  const auto pt = [=](int m) {
    return sample(grid, [=](Point p) {
      const double r = p.radius();
      return (m == 0 ? p.x : p.y) * std::pow(r, k - 2.0) * std::exp(-b * r);
    });
  };
  return {inv, VectorField<Grid2D>(gf(0), gf(1)), VectorField<Grid2D>(pt(0), pt(1))};
}

/// The Moutard pair (psi, phi) = (phi f, phi) at E0 = -b^2.
inline MoutardPair cylindrical_pair(const CylindricalSeed& seed, const Grid2D& grid) {
  const auto phi = sample(grid, [&](Point p) { return seed.phi(p.radius()); });
  const auto psi = sample(grid, [&](Point p) { return seed.phi(p.radius()) * f_radial(seed, p.radius()); });
  return {psi, phi, seed.e0()};
}

/// Analytic gradient of f for matrix_candidate.
inline std::function<std::array<double, 2>(Point)> cylindrical_grad_f(const CylindricalSeed& seed) {
  return [seed](Point p) {
    const double r = p.radius();
    const double w = std::pow(r, 2.0 * seed.k - 2.0) * std::exp(-2.0 * seed.b * r);
    return std::array<double, 2>{p.x * w, p.y * w};
  };
}

// ---------------------------------------------------------------------------
// Normalizability

struct NormStability {
  double norm = 0.0;          // quadrature of |F|^2 on the given grid
  double norm_doubled = 0.0;  // same spacing, twice the extent
  double relative_change = 0.0;
  bool stable = false;
};

/// Squared norm on `grid` and on its doubled domain; the field counts as normalizable when
/// the two agree to `tolerance` relative.
inline NormStability norm_stability(const std::function<std::vector<double>(Point)>& components, const Grid2D& grid,
                                    double tolerance = 1e-3) {
  const auto norm_on = [&](const Grid2D& g) {
    const auto density = sample(g, [&](Point p) {
      double s = 0.0;
      for (double c : components(p)) s += c * c;
      return s;
    });
    return quadrature(density);
  };
  NormStability s;
  s.norm = norm_on(grid);
  s.norm_doubled = norm_on(grid.doubled());
  s.relative_change = std::abs(s.norm_doubled - s.norm) / std::max(std::abs(s.norm_doubled), 1e-300);
  s.stable = std::isfinite(s.norm_doubled) && s.relative_change <= tolerance;
  return s;
}

struct ZeroModeNormalizability {
  NormStability inverse_phi;
  NormStability psi_tilde;
  double inverse_phi_exact = 0.0;  // 2 pi Gamma(2k + 2) / (2b)^(2k + 2)
  double psi_tilde_exact = 0.0;    // 2 pi Gamma(2k) / (2b)^(2k)
};

inline ZeroModeNormalizability zero_mode_normalizability(const CylindricalSeed& seed, const Grid2D& grid, double tolerance = 1e-3) {
  const double b = seed.b;
  const double k = seed.k;
  ZeroModeNormalizability z;
  z.inverse_phi = norm_stability([=](Point p) { return std::vector<double>{std::pow(p.radius(), k) * std::exp(-b * p.radius())}; },
                                 grid, tolerance);
  z.psi_tilde = norm_stability(
      [=](Point p) {
        const double w = std::pow(p.radius(), k - 2.0) * std::exp(-b * p.radius());
        return std::vector<double>{p.x * w, p.y * w};
      },
      grid, tolerance);
  z.inverse_phi_exact = 2.0 * M_PI * std::tgamma(2.0 * k + 2.0) / std::pow(2.0 * b, 2.0 * k + 2.0);
  z.psi_tilde_exact = 2.0 * M_PI * std::tgamma(2.0 * k) / std::pow(2.0 * b, 2.0 * k);
  return z;
}

// ---------------------------------------------------------------------------
// Asymptotic classification

enum class LevelGain { H1Only, MatrixOnly, Both, Neither };

inline const char* to_string(LevelGain g) {
  switch (g) {
    case LevelGain::H1Only: return "h1 only";
    case LevelGain::MatrixOnly: return "h~ only";
    case LevelGain::Both: return "both";
    case LevelGain::Neither: return "neither";
  }
  return "?";
}

struct Classification {
  bool inverse_normalizable = false;  // 1/phi: E0 joins the spectrum of h1
  bool matrix_normalizable = false;   // phi grad f: E0 joins the spectrum of h~
  LevelGain gain = LevelGain::Neither;
};

/// From the declared exponents phi ~ r^a at infinity and phi ~ r^c at the origin
/// (a = +inf for exponential growth): |1/phi|^2 r is integrable iff a > 1 and c < 1,
/// |grad f| phi ~ 1/(r phi) is square integrable iff a > 0 and c < 0.
inline Classification asymptotic_classifier(const SupportSpec& support) {
  if (!support.exponents) throw InvalidArgument("asymptotic_classifier: support '" + support.name + "' has undeclared exponents");
  const double a = support.exponents->infinity_power;
  const double c = support.exponents->origin_power;
  Classification out;
  out.inverse_normalizable = a > 1.0 && c < 1.0;
  out.matrix_normalizable = a > 0.0 && c < 0.0;
  if (out.inverse_normalizable && out.matrix_normalizable)
    out.gain = LevelGain::Both;
  else if (out.inverse_normalizable)
    out.gain = LevelGain::H1Only;
  else if (out.matrix_normalizable)
    out.gain = LevelGain::MatrixOnly;
  return out;
}

// ---------------------------------------------------------------------------
// Level pinning

/// k = ((N+1)^2 - m^2) / (2 (N+1)); requires (N+1)^2 > m^2.
inline Rational pinning_k(int n, int m) {
  if (n < 0) throw InvalidArgument("pinning_k: N must be non-negative");
  const std::int64_t n1 = n + 1;
  const std::int64_t m2 = static_cast<std::int64_t>(m) * m;
  if (n1 * n1 <= m2) throw InvalidArgument("pinning_k: need (N+1)^2 > m^2 for k > 0");
  return {n1 * n1 - m2, 2 * n1};
}

struct PinningReport {
  int n = 0;
  int m = 0;
  Rational k;
  bool degenerate = false;              // 2k - 1 = 0: the minus-branch level vanishes
  std::optional<int> plus_n;            // N' with plus(N', m) = minus(N, m)
  std::optional<Rational> level_over_b2;  // the common level in units of b^2
  double closed_form_gap = 0.0;         // |minus - plus| in floating point
  std::optional<double> numeric_minus;
  std::optional<double> numeric_plus;
  double numeric_rel_error = 0.0;       // max over both, relative to the closed form
};

struct PinningOptions {
  bool numeric = false;
  double spacing = 0.01;
};

/// Uses sqrt(m^2 + k^2) = ((N+1)^2 + m^2) / (2 (N+1)) to locate the plus-branch level that
/// equals minus(N, m), exactly in rationals.
inline PinningReport pin_level(int n, int m, double b, const PinningOptions& options = {}) {
  if (!(b > 0.0)) throw InvalidArgument("b must be positive, got " + std::to_string(b));
  PinningReport r;
  r.n = n;
  r.m = m;
  r.k = pinning_k(n, m);
  const Rational k = r.k;
  const std::int64_t n1 = n + 1;
  const Rational s(n1 * n1 + static_cast<std::int64_t>(m) * m, 2 * n1);
  if (!exact_sqrt(Rational(m) * Rational(m) + k * k).has_value() || *exact_sqrt(Rational(m) * Rational(m) + k * k) != s)
    throw NumericalError("pin_level: sqrt(m^2 + k^2) is not the expected rational");
  const Rational minus_num = Rational(2) * k - Rational(1);
  const Rational plus_num = Rational(2) * k + Rational(1);
  const Rational minus_den = Rational(1) + Rational(2) * (Rational(n) + s);
  if (minus_num == Rational(0)) {
    r.degenerate = true;
    return r;
  }
  // (2k+1) / (1 + 2(N' + s)) = |2k-1| / (1 + 2(N + s)).
  const Rational plus_den = plus_num * minus_den / abs(minus_num);
  const Rational n_prime = (plus_den - Rational(1) - Rational(2) * s) / Rational(2);
  const Rational ratio = minus_num / minus_den;
  r.level_over_b2 = -(ratio * ratio);
  if (n_prime.is_integer() && n_prime.num() >= 0) r.plus_n = static_cast<int>(n_prime.num());
  if (!r.plus_n) return r;

  const double kd = k.value();
  const double e_minus = closed_form_level(b, kd, Branch::Minus, n, m);
  const double e_plus = closed_form_level(b, kd, Branch::Plus, *r.plus_n, m);
  r.closed_form_gap = std::abs(e_minus - e_plus);
  if (options.numeric) {
    const CylindricalSeed seed(b, kd);
    const SeedPotentials p = seed_potentials(seed);
    const auto solve = [&](Branch branch, int level) {
      const double r_max = radial_window(b, kd, branch, level, m);
      const auto points = static_cast<std::size_t>(std::llround(r_max / options.spacing));
      const auto& u = branch == Branch::Minus ? p.u : p.u1;
      return solve_radial_extrapolated(u, m, r_max, points, level + 1).levels.at(static_cast<std::size_t>(level)).energy;
    };
    r.numeric_minus = solve(Branch::Minus, n);
    r.numeric_plus = solve(Branch::Plus, *r.plus_n);
    r.numeric_rel_error = std::max(std::abs(*r.numeric_minus - e_minus) / std::abs(e_minus),
                                   std::abs(*r.numeric_plus - e_plus) / std::abs(e_plus));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Spectra of the seed and partner potentials

struct SpectrumWindow {
  double spacing = 0.01;
  std::optional<double> r_max;  // fixed box; by default sized per channel from the shallowest level
};

/// Lowest n_max + 1 levels in each channel 0..m_max of the minus (seed) or plus (partner)
/// potential, each channel extrapolated from spacings h and h/2.
inline SpectrumReport numerical_spectrum(const CylindricalSeed& seed, Branch branch, int n_max, int m_max,
                                         const SpectrumWindow& window = {}) {
  if (n_max < 0 || m_max < 0) throw InvalidArgument("numerical_spectrum: n_max and m_max must be non-negative");
  if (!(window.spacing > 0.0)) throw InvalidArgument("numerical_spectrum: spacing must be positive");
  const SeedPotentials p = seed_potentials(seed);
  const auto& u = branch == Branch::Minus ? p.u : p.u1;
  SpectrumReport out;
  out.source = std::string("solve_radial_extrapolated/") + to_string(branch);
  out.spacing = window.spacing;
  for (int m = 0; m <= m_max; ++m) {
    const double r_max = window.r_max.value_or(radial_window(seed.b, seed.k, branch, n_max, m));
    const auto points = static_cast<std::size_t>(std::llround(r_max / window.spacing));
    const SpectrumReport ch = solve_radial_extrapolated(u, m, r_max, points, n_max + 1);
    out.extent = std::max(out.extent, r_max);
    out.tolerance = ch.tolerance;
    out.continuum_edge = ch.continuum_edge;
    for (const Level& l : ch.levels) out.levels.push_back(l);
  }
  return out;
}

struct SpectrumRow {
  Branch branch = Branch::Minus;
  int n = 0;
  int m = 0;
  double closed_form = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
  double solver_residual = 0.0;
  bool bound = false;
};

struct SpectrumTable {
  std::vector<SpectrumRow> rows;
  [[nodiscard]] double max_rel_error() const {
    double e = 0.0;
    for (const auto& r : rows) e = std::max(e, r.rel_error);
    return e;
  }
};

/// Closed form against numerics, N <= n_max and m <= m_max, for the listed branches.
inline SpectrumTable spectrum_table(const CylindricalSeed& seed, int n_max, int m_max, const SpectrumWindow& window = {},
                                    const std::vector<Branch>& branches = {Branch::Minus, Branch::Plus}) {
  SpectrumTable t;
  for (Branch branch : branches) {
    const SpectrumReport num = numerical_spectrum(seed, branch, n_max, m_max, window);
    for (const Level& l : num.levels) {
      SpectrumRow row;
      row.branch = branch;
      row.n = l.n;
      row.m = l.m;
      row.closed_form = closed_form_level(seed.b, seed.k, branch, l.n, l.m);
      row.numeric = l.energy;
      // k = 1/2 puts the whole minus branch at zero; fall back to the absolute error there.
      row.rel_error = std::abs(l.energy - row.closed_form) / (row.closed_form != 0.0 ? std::abs(row.closed_form) : 1.0);
      row.solver_residual = l.residual;
      row.bound = l.bound;
      t.rows.push_back(row);
    }
  }
  return t;
}

}  // namespace susy
