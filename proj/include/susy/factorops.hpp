#pragma once

#include <algorithm>
#include <array>
#include <cstdint>

#include "susy/block_operator.hpp"
#include "susy/linear_operator.hpp"
#include "susy/residual.hpp"
#include "susy/support.hpp"

namespace susy {

/// q = phi * D * (1/phi) along one axis, from nodal samples of ln phi. D is the
/// antisymmetric central difference, so q annihilates phi in the interior and
/// the q's along different axes commute exactly.
template <GridType G>
LinearOperator build_q(const ScalarField<G>& log_phi, int axis) {
  const SparseMatrix d = difference_matrix(log_phi.grid(), axis, Stencil::Central);
  const Vector& l = log_phi.values();
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(d.nonZeros()));
  for (Eigen::Index r = 0; r < d.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(d, r); it; ++it)
      triplets.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                            std::exp(l[it.row()] - l[it.col()]) * it.value());
  SparseMatrix q(d.rows(), d.cols());
  q.setFromTriplets(triplets.begin(), triplets.end());
  return LinearOperator(std::move(q));
}

template <GridType G>
LinearOperator build_q(const SupportSpec& support, const G& grid, int axis) {
  return build_q(sample_log_phi(support, grid), axis);
}

/// p_1 = q_2^+, p_2 = -q_1^+ (axes 0 and 1).
inline LinearOperator build_p(const SupportSpec& support, const Grid2D& grid, int axis) {
  if (axis == 0) return build_q(support, grid, 1).adjoint();
  if (axis == 1) return -build_q(support, grid, 0).adjoint();
  throw InvalidArgument("build_p: axis " + std::to_string(axis) + " out of range");
}

struct Hamiltonians1D {
  Grid1D grid;
  double e0;
  LinearOperator q;
  LinearOperator q_dag;
  LinearOperator h0;  // q^+ q + E0
  LinearOperator h1;  // q q^+ + E0
};

inline Hamiltonians1D assemble_hamiltonians(const SupportSpec& support, const Grid1D& grid) {
  LinearOperator q = build_q(support, grid, 0);
  LinearOperator q_dag = q.adjoint();
  LinearOperator h0 = (q_dag * q).shifted(support.e0);
  LinearOperator h1 = (q * q_dag).shifted(support.e0);
  return {grid, support.e0, std::move(q), std::move(q_dag), std::move(h0), std::move(h1)};
}

/// Scalar and 2x2 matrix Hamiltonians of the planar factorization. The 2x2
/// operators act on stacked two-component fields: (h psi)_l = h_lm psi_m.
struct Hamiltonians2D {
  Grid2D grid;
  double e0;
  std::array<LinearOperator, 2> q;
  std::array<LinearOperator, 2> q_dag;
  std::array<LinearOperator, 2> p;
  std::array<LinearOperator, 2> p_dag;
  LinearOperator h0;      // q_m^+ q_m + E0
  LinearOperator h1;      // q_m q_m^+ + E0
  BlockOperator h;        // q_l q_m^+ + E0 delta_lm
  BlockOperator H;        // p_l p_m^+ + E0 delta_lm
  BlockOperator h_tilde;  // h + H - E0 delta_lm

  [[nodiscard]] Eigen::Index points() const { return static_cast<Eigen::Index>(grid.size()); }
};

namespace detail {

inline BlockOperator outer_products(const std::array<LinearOperator, 2>& a, const std::array<LinearOperator, 2>& b_dag,
                                    double diagonal_shift) {
  BlockOperator out = BlockOperator::square(2, a[0].rows());
  for (std::size_t l = 0; l < 2; ++l)
    for (std::size_t m = 0; m < 2; ++m) {
      LinearOperator block = a[l] * b_dag[m];
      out.set(l, m, l == m ? block.shifted(diagonal_shift) : block);
    }
  return out;
}

inline BlockOperator scalar_identity_blocks(std::size_t n, Eigen::Index size, double s) {
  BlockOperator out = BlockOperator::square(n, size);
  for (std::size_t i = 0; i < n; ++i) out.set(i, i, s * LinearOperator::identity(size));
  return out;
}

}  // namespace detail

inline Hamiltonians2D assemble_hamiltonians(const SupportSpec& support, const Grid2D& grid) {
  const ScalarField<Grid2D> log_phi = sample_log_phi(support, grid);
  std::array<LinearOperator, 2> q{build_q(log_phi, 0), build_q(log_phi, 1)};
  std::array<LinearOperator, 2> q_dag{q[0].adjoint(), q[1].adjoint()};
  std::array<LinearOperator, 2> p{q_dag[1], -q_dag[0]};
  std::array<LinearOperator, 2> p_dag{q[1], -q[0]};
  const double e0 = support.e0;
  LinearOperator h0 = (q_dag[0] * q[0] + q_dag[1] * q[1]).shifted(e0);
  LinearOperator h1 = (q[0] * q_dag[0] + q[1] * q_dag[1]).shifted(e0);
  BlockOperator h = detail::outer_products(q, q_dag, e0);
  BlockOperator H = detail::outer_products(p, p_dag, e0);
  BlockOperator h_tilde = h + H - detail::scalar_identity_blocks(2, q[0].rows(), e0);
  return {grid,
          e0,
          std::move(q),
          std::move(q_dag),
          std::move(p),
          std::move(p_dag),
          std::move(h0),
          std::move(h1),
          std::move(h),
          std::move(H),
          std::move(h_tilde)};
}

struct IntertwiningReport {
  double q_h0 = 0.0;     // q_l h0 = h_lm q_m
  double p_h1 = 0.0;     // p_l h1 = H_lm p_m
  double h0_qdag = 0.0;  // h0 q_l^+ = q_m^+ h_ml
  double h1_pdag = 0.0;  // h1 p_l^+ = p_m^+ H_ml
  double hH = 0.0;       // h_mk H_kl = E0 h~_ml
  double Hh = 0.0;       // H_mk h_kl = E0 h~_ml

  [[nodiscard]] double max() const { return std::max({q_h0, p_h1, h0_qdag, h1_pdag, hH, Hh}); }
};

namespace detail {

inline Vector stack(const Vector& a, const Vector& b) {
  Vector out(a.size() + b.size());
  out << a, b;
  return out;
}

/// max over l of the residual of  a_l s = sum_m M_lm a_m  (s scalar input).
inline double scalar_to_pair_residual(const std::array<LinearOperator, 2>& a, const LinearOperator& s, const BlockOperator& m,
                                      Eigen::Index n, std::uint64_t seed) {
  return relation_residual([&](const Vector& x) { return stack(a[0].apply(s.apply(x)), a[1].apply(s.apply(x))); },
                           [&](const Vector& x) { return m.apply(stack(a[0].apply(x), a[1].apply(x))); }, n, seed);
}

/// max over l of the residual of  s a_l^+ = a_m^+ M_ml  (input in slot l).
inline double pair_to_scalar_residual(const std::array<LinearOperator, 2>& a_dag, const LinearOperator& s, const BlockOperator& m,
                                      Eigen::Index n, std::uint64_t seed) {
  double worst = 0.0;
  for (std::size_t l = 0; l < 2; ++l) {
    const auto embed = [&](const Vector& x) {
      Vector v = Vector::Zero(2 * n);
      v.segment(static_cast<Eigen::Index>(l) * n, n) = x;
      return v;
    };
    worst = std::max(worst, relation_residual(
                                [&](const Vector& x) { return s.apply(a_dag[l].apply(x)); },
                                [&](const Vector& x) {
                                  const Vector y = m.apply(embed(x));
                                  return Vector(a_dag[0].apply(y.head(n)) + a_dag[1].apply(y.tail(n)));
                                },
                                n, seed));
  }
  return worst;
}

}  // namespace detail

inline IntertwiningReport intertwining_residual(const Hamiltonians2D& hs, std::uint64_t seed = default_seed) {
  const Eigen::Index n = hs.points();
  IntertwiningReport r;
  r.q_h0 = detail::scalar_to_pair_residual(hs.q, hs.h0, hs.h, n, seed);
  r.p_h1 = detail::scalar_to_pair_residual(hs.p, hs.h1, hs.H, n, seed);
  r.h0_qdag = detail::pair_to_scalar_residual(hs.q_dag, hs.h0, hs.h, n, seed);
  r.h1_pdag = detail::pair_to_scalar_residual(hs.p_dag, hs.h1, hs.H, n, seed);
  const auto e0_ht = [&](const Vector& x) { return Vector(hs.e0 * hs.h_tilde.apply(x)); };
  r.hH = relation_residual([&](const Vector& x) { return hs.h.apply(hs.H.apply(x)); }, e0_ht, 2 * n, seed);
  r.Hh = relation_residual([&](const Vector& x) { return hs.H.apply(hs.h.apply(x)); }, e0_ht, 2 * n, seed);
  return r;
}

inline IntertwiningReport intertwining_residual(const SupportSpec& support, const Grid2D& grid, std::uint64_t seed = default_seed) {
  return intertwining_residual(assemble_hamiltonians(support, grid), seed);
}

/// 1D intertwining q h0 = h1 q and h0 q^+ = q^+ h1 (stored in q_h0 and h0_qdag).
inline IntertwiningReport intertwining_residual(const Hamiltonians1D& hs, std::uint64_t seed = default_seed) {
  const Eigen::Index n = static_cast<Eigen::Index>(hs.grid.size());
  IntertwiningReport r;
  r.q_h0 = relation_residual([&](const Vector& x) { return hs.q.apply(hs.h0.apply(x)); },
                             [&](const Vector& x) { return hs.h1.apply(hs.q.apply(x)); }, n, seed);
  r.h0_qdag = relation_residual([&](const Vector& x) { return hs.h0.apply(hs.q_dag.apply(x)); },
                                [&](const Vector& x) { return hs.q_dag.apply(hs.h1.apply(x)); }, n, seed);
  return r;
}

}  // namespace susy
