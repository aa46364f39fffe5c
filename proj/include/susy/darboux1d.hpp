#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>

#include "susy/factorops.hpp"
#include "susy/spectra.hpp"
#include "susy/support.hpp"

namespace susy {

/// A positive 1D solution with its first two derivatives (d2 may be empty).
struct PositiveSolution {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
};

/// phi = lambda phi_plus + (1 - lambda) phi_minus.
class LambdaSupport {
 public:
  LambdaSupport(double lambda, PositiveSolution plus, PositiveSolution minus, double e0, std::string name = "lambda")
      : lambda_(lambda), plus_(std::move(plus)), minus_(std::move(minus)), e0_(e0), name_(std::move(name)) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
      std::ostringstream os;
      os << "lambda must lie in [0, 1], got " << lambda;
      throw InvalidArgument(os.str());
    }
    if (!plus_.value || !minus_.value || !plus_.d1 || !minus_.d1)
      throw InvalidArgument("LambdaSupport: value and first-derivative closures are required");
  }

  /// Free particle at E0 = -kappa^2 with phi_plus = exp(kappa x), phi_minus = exp(-kappa x).
  static LambdaSupport free_particle(double lambda, double kappa) {
    if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
    const auto exp_branch = [kappa](double sign) {
      return PositiveSolution{[=](double x) { return std::exp(sign * kappa * x); },
                              [=](double x) { return sign * kappa * std::exp(sign * kappa * x); },
                              [=](double x) { return kappa * kappa * std::exp(sign * kappa * x); }};
    };
    return {lambda, exp_branch(1.0), exp_branch(-1.0), -kappa * kappa, "free_particle"};
  }

  [[nodiscard]] double lambda() const { return lambda_; }
  [[nodiscard]] double e0() const { return e0_; }
  [[nodiscard]] bool has_second_derivative() const { return plus_.d2 && minus_.d2; }

  [[nodiscard]] double phi(double x) const { return mix(plus_.value, minus_.value, x); }
  [[nodiscard]] double d_log_phi(double x) const { return mix(plus_.d1, minus_.d1, x) / phi(x); }
  /// (ln phi)'' = phi''/phi - (phi'/phi)^2.
  [[nodiscard]] double d2_log_phi(double x) const {
    const double p = phi(x);
    const double g = mix(plus_.d1, minus_.d1, x) / p;
    return mix(plus_.d2, minus_.d2, x) / p - g * g;
  }

  /// Throws naming the first grid point where phi is not positive and finite.
  void validate(const Grid1D& grid) const {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double v = phi(grid.x(i));
      if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << "support is not positive at grid point " << i << " (x = " << grid.x(i) << ", phi = " << v << ")";
        throw InvalidSupport(os.str());
      }
    }
  }

  [[nodiscard]] SupportSpec to_support() const {
    SupportSpec s;
    s.name = name_;
    s.e0 = e0_;
    s.log_phi = [self = *this](Point p) { return std::log(self.phi(p.x)); };
    s.grad_log_phi = [self = *this](Point p) { return std::array<double, 2>{self.d_log_phi(p.x), 0.0}; };
    if (has_second_derivative()) s.laplacian_log_phi = [self = *this](Point p) { return self.d2_log_phi(p.x); };
    return s;
  }

 private:
  [[nodiscard]] double mix(const std::function<double(double)>& a, const std::function<double(double)>& b, double x) const {
    // Skip a branch with zero weight so that its overflow cannot leak in.
    double v = 0.0;
    if (lambda_ > 0.0) v += lambda_ * a(x);
    if (lambda_ < 1.0) v += (1.0 - lambda_) * b(x);
    return v;
  }

  double lambda_;
  PositiveSolution plus_;
  PositiveSolution minus_;
  double e0_;
  std::string name_;
};

namespace detail {

/// Second derivative of ln phi by central differences of nodal samples (one-sided at the ends).
inline Vector stencil_second_derivative(const Vector& l, double h) {
  const Eigen::Index n = l.size();
  Vector out(n);
  for (Eigen::Index i = 1; i + 1 < n; ++i) out[i] = (l[i + 1] - 2.0 * l[i] + l[i - 1]) / (h * h);
  out[0] = (2.0 * l[0] - 5.0 * l[1] + 4.0 * l[2] - l[3]) / (h * h);
  out[n - 1] = (2.0 * l[n - 1] - 5.0 * l[n - 2] + 4.0 * l[n - 3] - l[n - 4]) / (h * h);
  return out;
}

}  // namespace detail

/// u1 = u - 2 (ln phi)''; analytic when the support provides second derivatives.
inline ScalarField<Grid1D> partner_potential_1d(const std::function<double(double)>& u, const SupportSpec& support,
                                                const Grid1D& grid) {
  const ScalarField<Grid1D> log_phi = sample_log_phi(support, grid);
  Vector out(static_cast<Eigen::Index>(grid.size()));
  const Vector lpp = support.laplacian_log_phi ? Vector() : detail::stencil_second_derivative(log_phi.values(), grid.spacing());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double second = support.laplacian_log_phi ? support.laplacian_log_phi(grid.point(i)) : lpp[k];
    out[k] = u(grid.x(i)) - 2.0 * second;
  }
  return {grid, std::move(out)};
}

inline ScalarField<Grid1D> partner_potential_1d(const std::function<double(double)>& u, const LambdaSupport& support,
                                                const Grid1D& grid) {
  support.validate(grid);
  return partner_potential_1d(u, support.to_support(), grid);
}

/// psi1 = q psi (unnormalized).
inline ScalarField<Grid1D> darboux_map(const ScalarField<Grid1D>& psi, const SupportSpec& support) {
  return build_q(support, psi.grid(), 0)(psi);
}

/// psi = q^+ psi1 (unnormalized).
inline ScalarField<Grid1D> inverse_darboux_map(const ScalarField<Grid1D>& psi1, const SupportSpec& support) {
  return build_q(support, psi1.grid(), 0).adjoint()(psi1);
}

enum class SusyPhase { Exact, Broken };

inline const char* to_string(SusyPhase p) { return p == SusyPhase::Exact ? "Exact" : "Broken"; }

struct PhaseReport {
  double lambda = 0.0;
  double e0 = 0.0;
  SusyPhase phase = SusyPhase::Broken;
  std::optional<Level> matched_level;
  std::string matched_sector;  // "h0" or "h1"
  double match_tolerance = 0.0;
  SpectrumReport h0_spectrum;
  SpectrumReport h1_spectrum;
};

struct PhaseConfig {
  int levels = 8;
  SolverConfig solver{};
  double solver_tolerance = 1e-6;  // enters the matching rule max(1e-3 |E0|, 5 tol)
};

/// Decides whether E0 is a discrete level of exactly one of h0 = -d2 + u and its partner.
inline PhaseReport susy_phase(const std::function<double(double)>& u, const LambdaSupport& support, const Grid1D& grid,
                              const PhaseConfig& config = {}) {
  PhaseReport r;
  r.lambda = support.lambda();
  r.e0 = support.e0();
  r.match_tolerance = std::max(1e-3 * std::abs(r.e0), 5.0 * config.solver_tolerance);
  const ScalarField<Grid1D> u0 = sample(grid, [&](Point p) { return u(p.x); });
  const ScalarField<Grid1D> u1 = partner_potential_1d(u, support, grid);
  r.h0_spectrum = solve_1d(u0, config.levels, config.solver);
  r.h1_spectrum = solve_1d(u1, config.levels, config.solver);
  const auto match = [&](const SpectrumReport& s) -> std::optional<Level> {
    for (const Level& l : s.bound_levels())
      if (std::abs(l.energy - r.e0) <= r.match_tolerance) return l;
    return std::nullopt;
  };
  const auto in0 = match(r.h0_spectrum);
  const auto in1 = match(r.h1_spectrum);
  if (in0 && in1) {
    std::ostringstream os;
    os << "level E0 = " << r.e0 << " found in both spectra (h0: " << in0->energy << ", h1: " << in1->energy << ")";
    throw NumericalError(os.str());
  }
  if (in0 || in1) {
    r.phase = SusyPhase::Exact;
    r.matched_level = in0 ? in0 : in1;
    r.matched_sector = in0 ? "h0" : "h1";
  }
  return r;
}

}  // namespace susy
