#pragma once

// JSON views of the numerical reports. Every number is written next to the residual or
// tolerance it was judged by; no timestamps or paths, so equal inputs give equal bytes.

#include <optional>

#include "json.hpp"
#include "susy/cylindrical.hpp"
#include "susy/darboux1d.hpp"
#include "susy/factorops.hpp"
#include "susy/moutard2d.hpp"
#include "susy/spectra.hpp"
#include "susy/superalgebra.hpp"

namespace susy {

using Json = nlohmann::ordered_json;

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

inline Json measured(double value, double tolerance) { return {{"value", value}, {"tolerance", tolerance}}; }

inline void to_json(Json& j, const Rational& r) { j = {{"num", r.num()}, {"den", r.den()}, {"text", r.str()}}; }

inline void to_json(Json& j, const Level& l) {
  j = {{"n", l.n}, {"m", l.m}, {"energy", l.energy}, {"residual", l.residual}, {"bound", l.bound}};
}

inline void to_json(Json& j, const SpectrumReport& s) {
  j = {{"source", s.source},       {"spacing", s.spacing},   {"extent", s.extent},
       {"tolerance", s.tolerance}, {"continuum_edge", s.continuum_edge}, {"levels", s.levels}};
}

inline void to_json(Json& j, const PhaseReport& r) {
  j = {{"lambda", r.lambda},
       {"e0", r.e0},
       {"phase", to_string(r.phase)},
       {"matched_level", optional_json(r.matched_level)},
       {"matched_sector", r.matched_level ? Json(r.matched_sector) : Json(nullptr)},
       {"match_tolerance", r.match_tolerance},
       {"h0", r.h0_spectrum},
       {"h1", r.h1_spectrum}};
}

inline void to_json(Json& j, const MatchedPair& p) { j = {{"a", p.a}, {"b", p.b}, {"shift", p.shift}}; }

inline void to_json(Json& j, const ChannelComparison& c) {
  j = {{"m", c.m},
       {"offset", c.offset},
       {"pairs", c.pairs},
       {"unmatched_a", c.unmatched_a},
       {"unmatched_b", c.unmatched_b},
       {"decay_exponent", optional_json(c.decay_exponent)}};
}

inline void to_json(Json& j, const Coincidence& c) { j = {{"a", c.a}, {"b", c.b}, {"difference", c.difference}}; }

inline void to_json(Json& j, const ComparisonReport& r) {
  j = {{"tolerance", r.tolerance}, {"channels", r.channels}, {"coincidences", r.coincidences}};
}

inline void to_json(Json& j, const AlgebraCheck& c) {
  j = {{"relation", c.relation}, {"residual", c.residual}, {"threshold", c.threshold}, {"pass", c.pass()}};
}

inline void to_json(Json& j, const IntertwiningReport& r) {
  j = {{"q_h0", r.q_h0}, {"p_h1", r.p_h1}, {"h0_qdag", r.h0_qdag}, {"h1_pdag", r.h1_pdag},
       {"h_H", r.hH},    {"H_h", r.Hh},     {"threshold", identity_threshold}};
}

inline void to_json(Json& j, const ExtendedReport& r) {
  j = {{"n", r.n},
       {"accepted", r.accepted()},
       {"first_failure", optional_json(r.first_failure)},
       {"max_residual", measured(r.max_residual(), identity_threshold)},
       {"h_pattern", r.h_pattern},
       {"q1_pattern", r.q1_pattern},
       {"expected_pattern", r.expected_pattern},
       {"union_layout_matches", optional_json(r.union_layout_matches)},
       {"sign_conventions", r.sign_conventions},
       {"degeneracy", r.degeneracy},
       {"block_dimension", r.block_dimension},
       {"checks", r.checks}};
}

inline void to_json(Json& j, const ZeroModeReport& r) {
  j = {{"q_psi1", r.q_psi1},   {"qdag_psi1", r.qdag_psi1}, {"q_psi2", r.q_psi2},   {"qdag_psi2", r.qdag_psi2},
       {"norm1", r.norm1},     {"norm2", r.norm2},         {"overlap", r.overlap}, {"points", r.points}};
}

inline void to_json(Json& j, const MembershipReport& r) {
  j = {{"norm", r.norm},
       {"rho_sigma_sum", r.rho_sigma_sum},
       {"rho_sigma_inner", r.rho_sigma_inner},
       {"rho_residual", r.rho_residual},
       {"sigma_residual", r.sigma_residual},
       {"annihilation_q", r.annihilation_q},
       {"annihilation_p", r.annihilation_p},
       {"points", r.points}};
}

inline void to_json(Json& j, const NormStability& s) {
  j = {{"norm", s.norm}, {"norm_doubled", s.norm_doubled}, {"relative_change", s.relative_change}, {"stable", s.stable}};
}

inline void to_json(Json& j, const ZeroModeNormalizability& z) {
  j = {{"inverse_phi", z.inverse_phi},
       {"inverse_phi_exact", z.inverse_phi_exact},
       {"psi_tilde", z.psi_tilde},
       {"psi_tilde_exact", z.psi_tilde_exact}};
}

inline void to_json(Json& j, const Classification& c) {
  j = {{"inverse_phi_normalizable", c.inverse_normalizable},
       {"matrix_normalizable", c.matrix_normalizable},
       {"gain", to_string(c.gain)}};
}

inline void to_json(Json& j, const PinningReport& r) {
  j = {{"n", r.n},
       {"m", r.m},
       {"k", r.k},
       {"degenerate", r.degenerate},
       {"plus_n", optional_json(r.plus_n)},
       {"level_over_b2", optional_json(r.level_over_b2)},
       {"closed_form_gap", measured(r.closed_form_gap, identity_threshold)},
       {"numeric_minus", optional_json(r.numeric_minus)},
       {"numeric_plus", optional_json(r.numeric_plus)},
       {"numeric_rel_error", r.numeric_minus ? measured(r.numeric_rel_error, 1e-3) : Json(nullptr)}};
}

inline void to_json(Json& j, const SpectrumRow& r) {
  j = {{"branch", to_string(r.branch)},
       {"n", r.n},
       {"m", r.m},
       {"closed_form", r.closed_form},
       {"numeric", r.numeric},
       {"rel_error", r.rel_error},
       {"solver_residual", r.solver_residual},
       {"bound", r.bound}};
}

inline Json table_json(const SpectrumTable& t, double tolerance) {
  return {{"max_rel_error", measured(t.max_rel_error(), tolerance)}, {"rows", t.rows}};
}

}  // namespace susy
