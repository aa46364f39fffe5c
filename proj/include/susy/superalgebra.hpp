#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "susy/block_operator.hpp"
#include "susy/factorops.hpp"
#include "susy/moutard2d.hpp"
#include "susy/residual.hpp"

namespace susy {

/// Nilpotent charge Q, its adjoint and H = {Q, Q^+}, all as block operators.
struct SuperModel {
  int dimension = 0;
  std::string support_name;
  double e0 = 0.0;
  BlockOperator Q;
  BlockOperator Q_dag;
  BlockOperator H;
};

struct AlgebraCheck {
  std::string relation;
  double residual = 0.0;
  double threshold = identity_threshold;
  [[nodiscard]] bool pass() const { return residual <= threshold; }
};

namespace detail {

inline VectorMap as_map(const BlockOperator& op) {
  return [op](const Vector& x) { return op.apply(x); };
}

inline VectorMap zero_map() {
  return [](const Vector& x) { return Vector(Vector::Zero(x.size())); };
}

/// x -> A B x + B A x (without forming the product).
inline VectorMap anticommutator_map(const BlockOperator& a, const BlockOperator& b) {
  return [a, b](const Vector& x) { return Vector(a.apply(b.apply(x)) + b.apply(a.apply(x))); };
}

inline VectorMap commutator_map(const BlockOperator& a, const BlockOperator& b) {
  return [a, b](const Vector& x) { return Vector(a.apply(b.apply(x)) - b.apply(a.apply(x))); };
}

inline AlgebraCheck check(std::string name, const VectorMap& lhs, const VectorMap& rhs, Eigen::Index size, std::uint64_t seed) {
  return {std::move(name), relation_residual(lhs, rhs, size, seed)};
}

inline BlockOperator single_block(std::size_t n, std::size_t i, std::size_t j, const LinearOperator& op, Eigen::Index size) {
  BlockOperator out = BlockOperator::square(n, size);
  out.set(i, j, op);
  return out;
}

}  // namespace detail

/// Q = [[0, 0], [q, 0]], H = diag(h0 - E0, h1 - E0).
inline SuperModel build_super_1d(const SupportSpec& support, const Grid1D& grid) {
  const Hamiltonians1D hs = assemble_hamiltonians(support, grid);
  const Eigen::Index n = hs.q.rows();
  BlockOperator Q = BlockOperator::square(2, n);
  Q.set(1, 0, hs.q);
  BlockOperator H = BlockOperator::square(2, n);
  H.set(0, 0, hs.h0.shifted(-hs.e0));
  H.set(1, 1, hs.h1.shifted(-hs.e0));
  BlockOperator Q_dag = Q.adjoint();
  return {1, support.name, hs.e0, std::move(Q), std::move(Q_dag), std::move(H)};
}

/// Four-component charge on (scalar, vector, pseudoscalar) fields; the middle block of H
/// is h_lm + H_lm - 2 E0 delta_lm, which is what {Q, Q^+} produces.
inline SuperModel build_super_2d(const Hamiltonians2D& hs, std::string name = {}) {
  const Eigen::Index n = hs.points();
  BlockOperator Q = BlockOperator::square(4, n);
  Q.set(1, 0, hs.q[0]);
  Q.set(2, 0, hs.q[1]);
  Q.set(3, 1, hs.q[1]);
  Q.set(3, 2, -hs.q[0]);
  BlockOperator H = BlockOperator::square(4, n);
  H.set(0, 0, hs.h0.shifted(-hs.e0));
  const BlockOperator middle = hs.h + hs.H;
  for (std::size_t l = 0; l < 2; ++l)
    for (std::size_t m = 0; m < 2; ++m) {
      const LinearOperator& b = *middle.block(l, m);
      H.set(1 + l, 1 + m, l == m ? b.shifted(-2.0 * hs.e0) : b);
    }
  H.set(3, 3, hs.h1.shifted(-hs.e0));
  BlockOperator Q_dag = Q.adjoint();
  return {2, std::move(name), hs.e0, std::move(Q), std::move(Q_dag), std::move(H)};
}

inline SuperModel build_super_2d(const SupportSpec& support, const Grid2D& grid) {
  return build_super_2d(assemble_hamiltonians(support, grid), support.name);
}

/// {Q, Q^+} = H, [Q, H] = [Q^+, H] = 0, Q^2 = (Q^+)^2 = 0 and H = H^+.
inline std::vector<AlgebraCheck> algebra_residuals(const SuperModel& m, std::uint64_t seed = default_seed) {
  const Eigen::Index size = m.H.cols();
  const auto square = [](const BlockOperator& a) { return [a](const Vector& x) { return Vector(a.apply(a.apply(x))); }; };
  return {
      detail::check("{Q,Q^+} = H", detail::anticommutator_map(m.Q, m.Q_dag), detail::as_map(m.H), size, seed),
      detail::check("[Q,H] = 0", detail::commutator_map(m.Q, m.H), detail::zero_map(), size, seed),
      detail::check("[Q^+,H] = 0", detail::commutator_map(m.Q_dag, m.H), detail::zero_map(), size, seed),
      detail::check("Q^2 = 0", square(m.Q), detail::zero_map(), size, seed),
      detail::check("(Q^+)^2 = 0", square(m.Q_dag), detail::zero_map(), size, seed),
      detail::check("H = H^+", detail::as_map(m.H), detail::as_map(m.H.adjoint()), size, seed),
  };
}

// ---------------------------------------------------------------------------
// Zero modes

struct ZeroModeOptions {
  std::size_t band = 1;               // outer rings left out of the residual norms
  std::optional<double> core_radius;  // also leave out r < core_radius
};

struct ZeroModeReport {
  double q_psi1 = 0.0;     // |Q Psi1| / |Psi1|
  double qdag_psi1 = 0.0;  // |Q^+ Psi1| / |Psi1|
  double q_psi2 = 0.0;
  double qdag_psi2 = 0.0;
  double norm1 = 0.0;      // trapezoid quadrature of |Psi1|^2 over the grid
  double norm2 = 0.0;
  double overlap = 0.0;    // <Psi1, Psi2>
  std::size_t points = 0;  // grid points entering the residual norms

  [[nodiscard]] double max_residual() const { return std::max({q_psi1, qdag_psi1, q_psi2, qdag_psi2}); }
};

/// Psi1 = (0, 0, 0, 1/phi) and Psi2 = (0, psi~_1, psi~_2, 0) with psi~_m = phi d_m f.
inline ZeroModeReport zero_modes(const SuperModel& model, const ScalarField<Grid2D>& inverse_phi, const VectorField<Grid2D>& psi_tilde,
                                 const ZeroModeOptions& options = {}) {
  if (model.dimension != 2) throw InvalidArgument("zero_modes: needs the two-dimensional model");
  const Grid2D& g = inverse_phi.grid();
  if (!(g == psi_tilde.grid())) throw InvalidArgument("zero_modes: fields live on different grids");
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  if (model.Q.block_size() != n) throw InvalidArgument("zero_modes: model and fields use different grids");
  Vector psi1 = Vector::Zero(4 * n);
  Vector psi2 = Vector::Zero(4 * n);
  psi1.segment(3 * n, n) = inverse_phi.values();
  psi2.segment(n, n) = psi_tilde[0].values();
  psi2.segment(2 * n, n) = psi_tilde[1].values();

  std::vector<bool> mask = interior_mask(g, options.band);
  if (options.core_radius)
    for (std::size_t i = 0; i < g.size(); ++i) mask[i] = mask[i] && g.point(i).radius() >= *options.core_radius;
  const double cell = g.cell_volume();
  const auto rel = [&](const BlockOperator& op, const Vector& psi) {
    return masked_norm(op.apply(psi), mask, cell) / masked_norm(psi, mask, cell);
  };
  ZeroModeReport r;
  r.q_psi1 = rel(model.Q, psi1);
  r.qdag_psi1 = rel(model.Q_dag, psi1);
  r.q_psi2 = rel(model.Q, psi2);
  r.qdag_psi2 = rel(model.Q_dag, psi2);
  const auto sq = [&](const Vector& v) { return ScalarField<Grid2D>(g, v.cwiseAbs2()); };
  r.norm1 = quadrature(sq(inverse_phi.values()));
  r.norm2 = quadrature(sq(psi_tilde[0].values())) + quadrature(sq(psi_tilde[1].values()));
  r.overlap = psi1.dot(psi2) * cell;
  r.points = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
  return r;
}

// ---------------------------------------------------------------------------
// Dual model (support 1/phi)

struct DualReport {
  SuperModel dual;
  double corner_top = 0.0;         // |H^(0,0) - (h1 - E0)|
  double corner_bottom = 0.0;      // |H^(3,3) - (h0 - E0)|
  double middle_difference = 0.0;  // |(H^ - H) restricted to the middle block|
};

/// Model built on 1/phi with the same E0; its corner blocks are the scalar Hamiltonians in
/// swapped order. Throws when the swap does not hold to the identity threshold.
inline DualReport build_dual(const SupportSpec& support, const Grid2D& grid, std::uint64_t seed = default_seed) {
  const Hamiltonians2D hs = assemble_hamiltonians(support, grid);
  DualReport r{build_super_2d(support.inverse(), grid), 0.0, 0.0, 0.0};
  const Eigen::Index n = hs.points();
  const auto block_map = [](const BlockOperator& b, std::size_t i, std::size_t j) {
    return [op = *b.block(i, j)](const Vector& x) { return op.apply(x); };
  };
  r.corner_top = relation_residual(block_map(r.dual.H, 0, 0), [&](const Vector& x) { return Vector(hs.h1.apply(x) - hs.e0 * x); }, n, seed);
  r.corner_bottom = relation_residual(block_map(r.dual.H, 3, 3), [&](const Vector& x) { return Vector(hs.h0.apply(x) - hs.e0 * x); }, n, seed);
  const SuperModel original = build_super_2d(hs, support.name);
  const BlockOperator dual_middle = r.dual.H.sub(1, 1, 2, 2);
  const BlockOperator middle = original.H.sub(1, 1, 2, 2);
  r.middle_difference = relation_residual(detail::as_map(dual_middle), detail::as_map(middle), 2 * n, seed);
  if (r.corner_top > identity_threshold || r.corner_bottom > identity_threshold) {
    std::ostringstream os;
    os << "build_dual: corner-block mismatch (top " << r.corner_top << ", bottom " << r.corner_bottom << ")";
    throw NumericalError(os.str());
  }
  return r;
}

// ---------------------------------------------------------------------------
// Extended algebra

/// The four-component operators that seed the recursion: Q1 (the d = 2 charge), its partner
/// Q2 on the permuted model, and the factorizing B with H1 = B^+ B and H2 = B B^+.
struct ExtendedBase {
  BlockOperator Q1;
  BlockOperator Q2;
  BlockOperator B;
  BlockOperator H1;
  BlockOperator H2;
};

inline ExtendedBase extended_base(const Hamiltonians2D& hs) {
  const Eigen::Index n = hs.points();
  const SuperModel m = build_super_2d(hs);
  BlockOperator Q2 = BlockOperator::square(4, n);
  Q2.set(1, 0, -hs.q_dag[1]);
  Q2.set(2, 0, hs.q_dag[0]);
  Q2.set(3, 1, -hs.q_dag[0]);
  Q2.set(3, 2, -hs.q_dag[1]);
  BlockOperator B = BlockOperator::square(4, n);
  B.set(0, 1, hs.q[1]);
  B.set(0, 2, -hs.q[0]);
  B.set(1, 0, -hs.q[0]);
  B.set(1, 3, hs.q_dag[1]);
  B.set(2, 0, -hs.q[1]);
  B.set(2, 3, -hs.q_dag[0]);
  B.set(3, 1, -hs.q_dag[0]);
  B.set(3, 2, -hs.q_dag[1]);
  BlockOperator H1 = B.adjoint() * B;
  BlockOperator H2 = B * B.adjoint();
  return {m.Q, std::move(Q2), std::move(B), std::move(H1), std::move(H2)};
}

struct ExtendedReport {
  int n = 0;                               // number of charges
  std::vector<AlgebraCheck> checks;        // every relation checked, in order
  std::string h_pattern;                   // diagonal H1/H2 labels of H(N), e.g. "1 2 2 1"
  std::string q1_pattern;                  // diagonal Q1/Q2 labels of Q_1(N)
  std::string expected_pattern;            // sequence generated by s -> (s, swapped s)
  std::vector<std::string> sign_conventions;
  std::optional<bool> union_layout_matches;  // N = 4 only: union of Q_2..Q_4 against the reference layout
  std::optional<std::string> first_failure;
  std::size_t degeneracy = 0;              // multiplicity of every level of H(N)
  std::size_t block_dimension = 0;         // scalar blocks per side, 2^(N+1)

  [[nodiscard]] bool accepted() const { return !first_failure.has_value(); }
  [[nodiscard]] double max_residual() const {
    double m = 0.0;
    for (const auto& c : checks) m = std::max(m, c.residual);
    return m;
  }
};

struct ExtendedModel {
  BlockOperator H;
  std::vector<BlockOperator> charges;  // Q_1(N) .. Q_N(N)
  BlockOperator factor;                // B_N with H(N) = diag(B_N^+ B_N, B_N B_N^+) for N >= 2
  ExtendedReport report;
};

/// "1", "1 2", "1 2 2 1", ...: each step appends the 1 <-> 2 swap of the current sequence.
inline std::string swap_sequence(std::size_t length) {
  std::vector<int> s{1};
  while (s.size() < length) {
    const std::size_t k = s.size();
    for (std::size_t i = 0; i < k; ++i) s.push_back(3 - s[i]);
  }
  std::string out;
  for (std::size_t i = 0; i < length; ++i) out += (i ? " " : "") + std::to_string(s[i]);
  return out;
}

namespace detail {

/// Labels each diagonal 4x4 super-block of `op` by the first reference it equals.
inline std::string diagonal_pattern(const BlockOperator& op, const std::vector<const BlockOperator*>& refs, std::uint64_t seed) {
  std::string out;
  const Eigen::Index size = refs.front()->cols();
  for (std::size_t s = 0; s < op.block_rows() / 4; ++s) {
    const BlockOperator d = op.sub(4 * s, 4 * s, 4, 4);
    std::string label = "?";
    for (std::size_t r = 0; r < refs.size(); ++r)
      if (relation_residual(as_map(d), as_map(*refs[r]), size, seed, 2) <= identity_threshold) {
        label = std::to_string(r + 1);
        break;
      }
    out += (s ? " " : "") + label;
  }
  return out;
}

inline bool halves_empty(const BlockOperator& op, std::size_t i0, std::size_t j0) {
  const std::size_t h = op.block_rows() / 2;
  return op.sub(i0, j0, h, h).nonzero_blocks() == 0;
}

/// Candidates for the charge that plays the role of `c` on the second half of the next level.
inline std::vector<std::pair<std::string, BlockOperator>> partner_candidates(const BlockOperator& c) {
  const std::size_t h = c.block_rows() / 2;
  std::vector<std::pair<std::string, BlockOperator>> out;
  if (halves_empty(c, 0, h) && halves_empty(c, h, 0)) {
    const BlockOperator swapped = BlockOperator::direct_sum(c.sub(h, h, h, h), c.sub(0, 0, h, h));
    out.emplace_back("+swap(diag)", swapped);
    out.emplace_back("-swap(diag)", -1.0 * swapped);
  } else if (halves_empty(c, 0, 0) && halves_empty(c, 0, h) && halves_empty(c, h, h)) {
    const BlockOperator adj = c.sub(h, 0, h, h).adjoint();
    out.emplace_back("lower(+C^+)", BlockOperator::lower(adj));
    out.emplace_back("lower(-C^+)", BlockOperator::lower(-1.0 * adj));
  }
  return out;
}

}  // namespace detail

namespace detail {

/// The reference layout of the union of Q_2(4), Q_3(4), Q_4(4) in 4x4 super-blocks:
/// (row, col, sign, adjoint).
struct LayoutEntry {
  std::size_t row;
  std::size_t col;
  double sign;
  bool adjoint;
};

inline const std::vector<LayoutEntry>& reference_union_layout() {
  static const std::vector<LayoutEntry> layout{
      {1, 0, 1, false}, {2, 0, 1, false}, {3, 1, 1, true},  {3, 2, -1, true}, {4, 0, 1, false}, {5, 1, 1, true},
      {5, 4, -1, true}, {6, 2, 1, true},  {6, 4, -1, true}, {7, 3, 1, false}, {7, 5, -1, false}, {7, 6, 1, false},
  };
  return layout;
}

inline bool union_matches_reference(const std::vector<BlockOperator>& charges, const BlockOperator& B, std::uint64_t seed) {
  const Eigen::Index size = B.cols();
  const BlockOperator B_dag = B.adjoint();
  const auto& layout = reference_union_layout();
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) {
      const LayoutEntry* expected = nullptr;
      for (const auto& e : layout)
        if (e.row == i && e.col == j) expected = &e;
      std::vector<BlockOperator> present;
      for (std::size_t c = 1; c < charges.size(); ++c) {
        const BlockOperator s = charges[c].sub(4 * i, 4 * j, 4, 4);
        if (s.nonzero_blocks() > 0) present.push_back(s);
      }
      if (!expected) {
        if (!present.empty()) return false;
        continue;
      }
      if (present.size() != 1) return false;
      const BlockOperator want = expected->sign * (expected->adjoint ? B_dag : B);
      if (relation_residual(as_map(present[0]), as_map(want), size, seed, 2) > identity_threshold) return false;
    }
  return true;
}

}  // namespace detail

/// Charges Q_1(N) .. Q_N(N) and H(N) for N = 1..4, with every relation
/// {Q_i, Q_k^+} = delta_ik H, {Q_i, Q_k} = 0 and [Q_i, H] = 0 checked at each level.
/// A level with a failing relation stops the construction; the report names it.
inline ExtendedModel build_extended(const SupportSpec& support, const Grid2D& grid, int n_charges,
                                    std::uint64_t seed = default_seed) {
  if (n_charges < 1 || n_charges > 4) throw InvalidArgument("build_extended: N must lie in 1..4");
  const Hamiltonians2D hs = assemble_hamiltonians(support, grid);
  const ExtendedBase base = extended_base(hs);
  const Eigen::Index n4 = 4 * hs.points();

  ExtendedReport report;
  const auto fail_on = [&](const AlgebraCheck& c) {
    report.checks.push_back(c);
    if (!c.pass() && !report.first_failure) report.first_failure = c.relation;
  };

  // Relations among the seed operators.
  fail_on(detail::check("Q_2 B + B Q_1 = 0", [&](const Vector& x) { return Vector(base.Q2.apply(base.B.apply(x)) + base.B.apply(base.Q1.apply(x))); },
                        detail::zero_map(), n4, seed));
  const BlockOperator Q1_dag = base.Q1.adjoint();
  const BlockOperator Q2_dag = base.Q2.adjoint();
  fail_on(detail::check("Q_2^+ B + B Q_1^+ = 0", [&](const Vector& x) { return Vector(Q2_dag.apply(base.B.apply(x)) + base.B.apply(Q1_dag.apply(x))); },
                        detail::zero_map(), n4, seed));
  fail_on(detail::check("B H_1 - H_2 B = 0", [&](const Vector& x) { return Vector(base.B.apply(base.H1.apply(x)) - base.H2.apply(base.B.apply(x))); },
                        detail::zero_map(), n4, seed));
  fail_on(detail::check("{Q_1^+,Q_1} = B^+ B", detail::anticommutator_map(base.Q1, Q1_dag), detail::as_map(base.H1), n4, seed));
  fail_on(detail::check("{Q_2^+,Q_2} = B B^+", detail::anticommutator_map(base.Q2, Q2_dag), detail::as_map(base.H2), n4, seed));

  ExtendedModel model{base.H1, {base.Q1}, base.B, {}};

  const auto verify_level = [&](int level) {
    const Eigen::Index size = model.H.cols();
    std::vector<BlockOperator> adj;
    for (const auto& q : model.charges) adj.push_back(q.adjoint());
    const std::string at = " at N=" + std::to_string(level);
    for (int i = 0; i < level; ++i)
      for (int k = 0; k < level; ++k) {
        const std::string name = "{Q_" + std::to_string(i + 1) + ",Q_" + std::to_string(k + 1) + "^+}" + at;
        const VectorMap rhs = i == k ? detail::as_map(model.H) : detail::zero_map();
        fail_on(detail::check(name, detail::anticommutator_map(model.charges[i], adj[k]), rhs, size, seed));
      }
    for (int i = 0; i < level; ++i)
      for (int k = i; k < level; ++k)
        fail_on(detail::check("{Q_" + std::to_string(i + 1) + ",Q_" + std::to_string(k + 1) + "}" + at,
                              detail::anticommutator_map(model.charges[i], model.charges[k]), detail::zero_map(), size, seed));
    for (int i = 0; i < level; ++i)
      fail_on(detail::check("[Q_" + std::to_string(i + 1) + ",H]" + at, detail::commutator_map(model.charges[i], model.H),
                            detail::zero_map(), size, seed));
  };

  verify_level(1);
  for (int level = 2; level <= n_charges && report.accepted(); ++level) {
    if (level == 2) {
      model.factor = base.B;
      model.H = BlockOperator::direct_sum(base.H1, base.H2);
      model.charges = {BlockOperator::direct_sum(base.Q1, base.Q2), BlockOperator::lower(base.B)};
      report.sign_conventions.push_back("Q_1(2) = diag(Q_1, Q_2); Q_2(2) = lower(B)");
    } else {
      const BlockOperator& b = model.factor;
      BlockOperator next_factor = BlockOperator::direct_sum(b, b.adjoint());
      const BlockOperator fresh = BlockOperator::lower(next_factor);
      std::vector<BlockOperator> lifted;
      for (std::size_t i = 0; i < model.charges.size(); ++i) {
        const BlockOperator& c = model.charges[i];
        std::string best_name = "none";
        std::optional<BlockOperator> best;
        double best_residual = INFINITY;
        for (auto& [name, partner] : detail::partner_candidates(c)) {
          BlockOperator candidate = BlockOperator::direct_sum(c, partner);
          const double res = std::max(
              relation_residual(detail::anticommutator_map(candidate, fresh), detail::zero_map(), candidate.cols(), seed, 2),
              relation_residual(detail::anticommutator_map(candidate, fresh.adjoint()), detail::zero_map(), candidate.cols(), seed, 2));
          if (res < best_residual) {
            best_residual = res;
            best_name = name;
            best = std::move(candidate);
          }
        }
        if (!best) {
          report.first_failure = "Q_" + std::to_string(i + 1) + " has no diagonal or lower structure at N=" + std::to_string(level);
          break;
        }
        report.sign_conventions.push_back("Q_" + std::to_string(i + 1) + "(" + std::to_string(level) + "): partner " + best_name);
        lifted.push_back(std::move(*best));
      }
      if (!report.accepted()) break;
      lifted.push_back(fresh);
      model.H = BlockOperator::direct_sum(next_factor.adjoint() * next_factor, next_factor * next_factor.adjoint());
      model.factor = std::move(next_factor);
      model.charges = std::move(lifted);
      report.sign_conventions.push_back("Q_" + std::to_string(level) + "(" + std::to_string(level) + ") = lower(B_" +
                                        std::to_string(level) + ")");
    }
    verify_level(level);
  }

  report.n = static_cast<int>(model.charges.size());
  report.block_dimension = model.H.block_rows();
  report.h_pattern = detail::diagonal_pattern(model.H, {&base.H1, &base.H2}, seed);
  report.q1_pattern = detail::diagonal_pattern(model.charges.front(), {&base.Q1, &base.Q2}, seed);
  report.expected_pattern = swap_sequence(model.H.block_rows() / 4);
  // Every copy of H1 or H2 carries the doubly degenerate spectrum of the d = 2 model.
  report.degeneracy = 2 * (model.H.block_rows() / 4);
  if (report.n == 4 && report.accepted()) report.union_layout_matches = detail::union_matches_reference(model.charges, base.B, seed);
  model.report = std::move(report);
  return model;
}

}  // namespace susy
