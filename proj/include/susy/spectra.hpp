#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "susy/error.hpp"
#include "susy/grid.hpp"
#include "susy/tridiagonal.hpp"

namespace susy {

struct Level {
  int n = 0;  // radial quantum number, or index for 1D spectra
  int m = 0;  // angular channel (0 for 1D)
  double energy = 0.0;
  double residual = 0.0;  // |T v - E v| / |v| for the discrete eigenpair
  bool bound = true;
};

struct SpectrumReport {
  std::string source;
  double spacing = 0.0;
  double extent = 0.0;  // r_max or domain length
  double tolerance = 0.0;
  double continuum_edge = 0.0;
  std::vector<Level> levels;
  std::vector<Vector> states;  // unit eigenvectors, filled when requested

  [[nodiscard]] std::vector<Level> bound_levels() const {
    std::vector<Level> out;
    std::copy_if(levels.begin(), levels.end(), std::back_inserter(out), [](const Level& l) { return l.bound; });
    return out;
  }

  [[nodiscard]] std::vector<Level> channel(int m) const {
    std::vector<Level> out;
    std::copy_if(levels.begin(), levels.end(), std::back_inserter(out), [m](const Level& l) { return l.m == m; });
    return out;
  }

  [[nodiscard]] std::optional<Level> find(int n, int m) const {
    for (const Level& l : levels)
      if (l.n == n && l.m == m) return l;
    return std::nullopt;
  }
};

struct SolverConfig {
  double tolerance = 1e-12;  // bisection interval width
  bool keep_states = false;
};

namespace detail {

inline SpectrumReport solve_tridiagonal(const SymmetricTridiagonal& t, int count, double edge, double h,
                                        const SolverConfig& config, int m) {
  if (count < 1) throw InvalidArgument("eigen-solve: count must be at least 1");
  if (count > t.size())
    throw InvalidArgument("eigen-solve: requested " + std::to_string(count) + " levels from a " +
                          std::to_string(t.size()) + "-point grid");
  SpectrumReport report;
  report.spacing = h;
  report.tolerance = config.tolerance;
  report.continuum_edge = edge;
  for (int k = 0; k < count; ++k) {
    const double e = t.eigenvalue(k, config.tolerance);
    const Vector v = t.eigenvector(e);
    const double residual = (t.apply(v) - e * v).norm();
    report.levels.push_back({k, m, e, residual, e < edge - 10.0 * h * h});
    if (config.keep_states) report.states.push_back(v);
  }
  return report;
}

}  // namespace detail

/// Lowest `count` eigenvalues of -d2/dx2 + u with Dirichlet ends (three-point stencil).
inline SpectrumReport solve_1d(const ScalarField<Grid1D>& u, int count, const SolverConfig& config = {}) {
  const Grid1D& g = u.grid();
  const double h = g.spacing();
  const auto n = static_cast<Eigen::Index>(g.size());
  SymmetricTridiagonal t(u.values().array() + 2.0 / (h * h), Vector::Constant(n - 1, -1.0 / (h * h)));
  const double edge = std::min(u.values()[0], u.values()[n - 1]);
  SpectrumReport r = detail::solve_tridiagonal(t, count, edge, h, config, 0);
  r.source = "solve_1d";
  r.extent = g.x_max() - g.x_min();
  return r;
}

/// Planar radial problem -chi'' + ((m^2 - 1/4)/r^2 + u(r)) chi = E chi with psi = chi / sqrt(r).
/// Discretized in flux form, -(1/r)(r psi')' + (m^2/r^2 + u) psi, on r_i = (i + 1/2) h with zero
/// flux through r = 0 and a Dirichlet node past the last point, then symmetrized by sqrt(r_i).
/// The flux form has no spurious deep state in the m = 0 channel.
inline SpectrumReport solve_radial(const std::function<double(double)>& u, int m, const RadialGrid& grid, int count,
                                   const SolverConfig& config = {}) {
  m = std::abs(m);
  const double h = grid.spacing();
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double m2 = static_cast<double>(m) * m;
  Vector d(n);
  Vector off(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = grid.r(static_cast<std::size_t>(i));
    const double r_in = std::max(0.0, r - 0.5 * h);
    const double r_out = r + 0.5 * h;
    d[i] = (r_in + r_out) / (r * h * h) + m2 / (r * r) + u(r);
    if (!std::isfinite(d[i])) throw InvalidArgument("solve_radial: potential not finite at r = " + std::to_string(r));
    if (i + 1 < n) off[i] = -r_out / (h * h * std::sqrt(r * (r + h)));
  }
  SymmetricTridiagonal t(std::move(d), std::move(off));
  const double r_edge = grid.r_max();
  SpectrumReport r = detail::solve_tridiagonal(t, count, (m2 - 0.25) / (r_edge * r_edge) + u(r_edge), h, config, m);
  r.source = "solve_radial";
  r.extent = grid.r_max();
  return r;
}

/// Combines solves at spacing h and h/2 level by level: E = (4 E_{h/2} - E_h) / 3.
/// A level counts as bound when it is bound on both grids.
inline SpectrumReport solve_radial_extrapolated(const std::function<double(double)>& u, int m, double r_max, std::size_t n,
                                                int count, const SolverConfig& config = {}) {
  const SpectrumReport coarse = solve_radial(u, m, RadialGrid::staggered(r_max, n), count, config);
  SpectrumReport fine = solve_radial(u, m, RadialGrid::staggered(r_max, 2 * n), count, config);
  for (std::size_t i = 0; i < fine.levels.size(); ++i) {
    Level& l = fine.levels[i];
    const Level& c = coarse.levels[i];
    l.residual = std::max(l.residual, std::abs(l.energy - c.energy));  // the extrapolation correction scale
    l.energy = (4.0 * l.energy - c.energy) / 3.0;
    l.bound = l.bound && c.bound;
  }
  fine.source = "solve_radial_extrapolated";
  fine.spacing = coarse.spacing;
  fine.states.clear();
  return fine;
}

enum class Branch { Minus, Plus };

inline const char* to_string(Branch b) { return b == Branch::Minus ? "minus" : "plus"; }

/// Closed-form level -b^2 (2k -+ 1)^2 / (1 + 2 (N + sqrt(m^2 + k^2)))^2; Minus belongs to
/// u = k^2/r^2 - b(2k-1)/r and Plus to its partner k^2/r^2 - b(2k+1)/r.
inline double closed_form_level(double b, double k, Branch branch, int n, int m) {
  const double s = branch == Branch::Minus ? 2.0 * k - 1.0 : 2.0 * k + 1.0;
  const double den = 1.0 + 2.0 * (n + std::sqrt(static_cast<double>(m) * m + k * k));
  return -b * b * s * s / (den * den);
}

inline SpectrumReport closed_form_spectrum(double b, double k, Branch branch, int n_max, int m_max) {
  if (!(b > 0.0) || !(k > 0.0)) throw InvalidArgument("closed_form_spectrum: need b > 0 and k > 0");
  if (n_max < 0 || m_max < 0) throw InvalidArgument("closed_form_spectrum: negative N_max or m_max");
  SpectrumReport r;
  r.source = std::string("closed_form_") + to_string(branch);
  for (int m = 0; m <= m_max; ++m)
    for (int n = 0; n <= n_max; ++n) r.levels.push_back({n, m, closed_form_level(b, k, branch, n, m), 0.0, true});
  return r;
}

/// Radial window wide enough for the shallowest requested closed-form level:
/// r_max = max(60/b, 5 (N + nu + 1) / kappa) with nu = sqrt(m^2 + k^2), kappa = sqrt(|E|).
inline double radial_window(double b, double k, Branch branch, int n_max, int m) {
  const double e = closed_form_level(b, k, branch, n_max, m);
  const double nu = std::sqrt(static_cast<double>(m) * m + k * k);
  if (e == 0.0) return 60.0 / b;
  return std::max(60.0 / b, 5.0 * (n_max + nu + 1.0) / std::sqrt(std::abs(e)));
}

struct MatchedPair {
  Level a;
  Level b;
  double shift = 0.0;  // E_a - E_b
};

struct ChannelComparison {
  int m = 0;
  int offset = 0;  // level i of A is paired with level i + offset of B
  std::vector<MatchedPair> pairs;
  std::vector<Level> unmatched_a;
  std::vector<Level> unmatched_b;
  std::optional<double> decay_exponent;  // |shift| ~ N^p fitted over pairs with N >= fit_from
};

struct Coincidence {
  Level a;
  Level b;
  double difference = 0.0;
};

struct ComparisonReport {
  double tolerance = 0.0;
  std::vector<ChannelComparison> channels;
  std::vector<Coincidence> coincidences;  // greedy nearest matching within tolerance, across levels

  /// Levels of B below the bottom of A in the same channel (added levels).
  [[nodiscard]] std::vector<Level> added_levels() const {
    std::vector<Level> out;
    for (const auto& c : channels)
      for (const Level& l : c.unmatched_b)
        if (c.pairs.empty() || l.energy < c.pairs.front().b.energy) out.push_back(l);
    return out;
  }
};

/// Least-squares slope of log|y| against log x.
inline std::optional<double> fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0 && y[i] != 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(std::abs(y[i])));
    }
  if (lx.size() < 2) return std::nullopt;
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

struct CompareOptions {
  std::optional<double> added_energy;  // levels of B at this energy are set aside as added
  double added_tolerance = 1e-3;       // relative to max(1, |added_energy|)
  int fit_from = 5;                    // smallest N entering the power-law fit
};

/// Per channel, pairs the bound levels of A and B in order after setting aside the
/// bottom levels of B that sit at the added energy; additionally lists greedy
/// within-tolerance coincidences over all levels of a channel.
inline ComparisonReport compare_spectra(const SpectrumReport& a, const SpectrumReport& b, double tol,
                                        const CompareOptions& options = {}) {
  ComparisonReport report;
  report.tolerance = tol;
  std::map<int, std::pair<std::vector<Level>, std::vector<Level>>> channels;
  for (const Level& l : a.bound_levels()) channels[l.m].first.push_back(l);
  for (const Level& l : b.bound_levels()) channels[l.m].second.push_back(l);
  for (auto& [m, lists] : channels) {
    auto& [la, lb] = lists;
    const auto by_energy = [](const Level& x, const Level& y) { return x.energy < y.energy; };
    std::sort(la.begin(), la.end(), by_energy);
    std::sort(lb.begin(), lb.end(), by_energy);
    ChannelComparison cc;
    cc.m = m;
    const int na = static_cast<int>(la.size());
    const int nb = static_cast<int>(lb.size());
    if (options.added_energy) {
      const double e = *options.added_energy;
      const double window = options.added_tolerance * std::max(1.0, std::abs(e));
      while (cc.offset < nb && std::abs(lb[cc.offset].energy - e) <= window && (na == 0 || lb[cc.offset].energy < la[0].energy))
        ++cc.offset;
    }
    std::vector<bool> used_b(lb.size(), false);
    for (int i = 0; i < na; ++i) {
      const int j = i + cc.offset;
      if (j >= 0 && j < nb) {
        cc.pairs.push_back({la[i], lb[j], la[i].energy - lb[j].energy});
        used_b[j] = true;
      } else {
        cc.unmatched_a.push_back(la[i]);
      }
    }
    for (int j = 0; j < nb; ++j)
      if (!used_b[j]) cc.unmatched_b.push_back(lb[j]);
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& p : cc.pairs)
      if (p.a.n >= options.fit_from) {
        xs.push_back(p.a.n);
        ys.push_back(p.shift);
      }
    cc.decay_exponent = fit_power_law(xs, ys);

    std::vector<std::tuple<double, int, int>> candidates;
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < nb; ++j) {
        const double d = std::abs(la[i].energy - lb[j].energy);
        if (d <= tol) candidates.emplace_back(d, i, j);
      }
    std::sort(candidates.begin(), candidates.end());
    std::vector<bool> ta(la.size(), false);
    std::vector<bool> tb(lb.size(), false);
    for (const auto& [d, i, j] : candidates) {
      if (ta[i] || tb[j]) continue;
      ta[i] = tb[j] = true;
      report.coincidences.push_back({la[i], lb[j], d});
    }
    report.channels.push_back(std::move(cc));
  }
  return report;
}

}  // namespace susy
