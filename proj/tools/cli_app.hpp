#pragma once

// Command-line front end: flags, optional JSON config, CSV/JSON artifacts, exit codes.
// Exit codes: 0 success, 1 numerical or invariant failure, 2 usage error.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <locale>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "susy/report.hpp"
#include "susy/susy.hpp"

namespace susy::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_numerical = 1;
inline constexpr int exit_usage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A check that ran to completion but missed its tolerance. Artifacts are already written.
class GateFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  double b = 1.0;
  double k = 1.0;
  double lambda = 0.5;
  double kappa = 1.0;
  double alpha = 1.0;
  std::size_t grid = 0;  // points per axis; 0 picks the command default
  double extent = 0.0;   // half width (centered grids) or side length; 0 picks the default
  int nmax = 3;
  int mmax = 2;
  std::vector<int> pin;
  int charges = 2;
  std::string branch = "both";
  double tolerance = 1e-3;  // spectral agreement
  double threshold = identity_threshold;
  double spacing = 0.01;
  double r_max = 0.0;  // 0: per-channel window
  double core = 1.0;   // excised radius in units of 1/b for the core-excised diagnostics
  std::uint64_t seed = default_seed;
  std::filesystem::path out_dir = ".";
};

inline Json config_json(const RunConfig& c) {
  Json j = {{"command", c.command}};
  if (c.command == "pair1d") {
    j.update({{"lambda", c.lambda}, {"kappa", c.kappa}, {"threshold", c.threshold}});
  } else if (c.command == "pair2d") {
    j.update({{"alpha", c.alpha}});
  } else {
    j.update({{"b", c.b}, {"k", c.k}});
  }
  if (c.command == "cylinder" || c.command == "spectrum")
    j.update({{"nmax", c.nmax}, {"mmax", c.mmax}, {"spacing", c.spacing}, {"rmax", c.r_max}, {"tolerance", c.tolerance}});
  if (c.command == "cylinder") j.update({{"core", c.core}, {"pin", c.pin}});
  if (c.command == "spectrum") j["branch"] = c.branch;
  if (c.command == "algebra") j.update({{"n", c.charges}, {"threshold", c.threshold}});
  j.update({{"grid", c.grid}, {"extent", c.extent}, {"seed", c.seed}});
  return j;
}

namespace detail {

inline std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(digits) << v;
  return os.str();
}

/// CSV writer: header row, comma separator, '.' decimal, round-trip precision.
class Csv {
 public:
  Csv(const std::filesystem::path& path, const std::vector<std::string>& header) : os_(path) {
    if (!os_) throw UsageError("cannot write " + path.string());
    os_.imbue(std::locale::classic());
    os_ << std::setprecision(17);
    row(header);
  }
  template <class... T>
  void line(const T&... cells) {
    std::size_t i = 0;
    ((os_ << (i++ ? "," : "") << cells), ...);
    os_ << '\n';
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << '\n';
  }

 private:
  std::ofstream os_;
};

inline void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream os(path);
  if (!os) throw UsageError("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

/// Options that may also come from the config file; flags given on the command line win.
class Bindings {
 public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& key, T& field, const std::string& help) {
    CLI::Option* opt = app->add_option("--" + key, field, help)->capture_default_str();
    entries_[key] = {opt, [&field](const Json& j) { field = j.get<T>(); }};
    return opt;
  }

  void apply(const Json& config) const {
    for (const auto& [key, value] : config.items()) {
      if (key == "out" || key == "seed") continue;  // handled by the caller
      const auto it = entries_.find(key);
      if (it == entries_.end()) throw UsageError("config: unknown key '" + key + "' for this command");
      if (it->second.option->count() > 0) continue;
      try {
        it->second.set(value);
      } catch (const nlohmann::json::exception& e) {
        throw UsageError("config: bad value for '" + key + "': " + e.what());
      }
    }
  }

 private:
  struct Entry {
    CLI::Option* option = nullptr;
    std::function<void(const Json&)> set;
  };
  std::map<std::string, Entry> entries_;
};

inline void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

inline void check_grid(const RunConfig& c, std::size_t min_points = 3) {
  require(c.grid >= min_points, "grid must have at least " + std::to_string(min_points) + " points per axis");
  require(c.extent > 0.0 && std::isfinite(c.extent), "extent must be positive");
}

inline void check_seed(const RunConfig& c) {
  require(c.b > 0.0 && std::isfinite(c.b), "b must be positive, got " + fmt(c.b));
  require(c.k > 0.0 && std::isfinite(c.k), "k must be positive, got " + fmt(c.k));
}

inline void check_spectrum_window(const RunConfig& c) {
  require(c.nmax >= 0 && c.mmax >= 0, "nmax and mmax must be non-negative");
  require(c.spacing > 0.0, "spacing must be positive");
  require(c.r_max >= 0.0, "rmax must be non-negative (0 sizes the box per channel)");
  require(c.tolerance > 0.0, "tolerance must be positive");
}

inline void defaults(RunConfig& c, std::size_t grid, double extent) {
  if (c.grid == 0) c.grid = grid;
  if (c.extent == 0.0) c.extent = extent;
}

/// Worst row of a spectrum table against the tolerance; names the channel on failure.
inline std::optional<std::string> spectrum_breach(const SpectrumTable& t, double tolerance) {
  const SpectrumRow* worst = nullptr;
  for (const auto& r : t.rows)
    if ((r.rel_error > tolerance || !std::isfinite(r.numeric)) && (!worst || r.rel_error > worst->rel_error)) worst = &r;
  if (!worst) return std::nullopt;
  return std::string("channel ") + to_string(worst->branch) + " m=" + std::to_string(worst->m) + " N=" + std::to_string(worst->n) +
         ": relative error " + fmt(worst->rel_error) + " > " + fmt(tolerance);
}

inline void write_spectrum_csv(const std::filesystem::path& path, const SpectrumTable& t) {
  Csv csv(path, {"branch", "n", "m", "closed_form", "numeric", "rel_error", "solver_residual", "bound"});
  for (const auto& r : t.rows)
    csv.line(to_string(r.branch), r.n, r.m, r.closed_form, r.numeric, r.rel_error, r.solver_residual, r.bound ? 1 : 0);
}

// ---------------------------------------------------------------------------

inline int cmd_pair1d(RunConfig& c, std::ostream& out) {
  defaults(c, 4000, 20.0);
  require(c.lambda >= 0.0 && c.lambda <= 1.0, "lambda must lie in [0, 1], got " + fmt(c.lambda));
  require(c.kappa > 0.0 && std::isfinite(c.kappa), "kappa must be positive, got " + fmt(c.kappa));
  check_grid(c);

  const auto support = LambdaSupport::free_particle(c.lambda, c.kappa);
  const Grid1D grid(-c.extent, c.extent, c.grid);
  const auto free = [](double) { return 0.0; };
  const PhaseReport phase = susy_phase(free, support, grid);
  const auto u1 = partner_potential_1d(free, support, grid);

  const SupportSpec spec = support.to_support();
  const IntertwiningReport tw = intertwining_residual(assemble_hamiltonians(spec, grid), c.seed);
  const auto checks = algebra_residuals(build_super_1d(spec, grid), c.seed);

  {
    Csv csv(c.out_dir / "pair1d_potentials.csv", {"x", "u", "u1"});
    for (std::size_t i = 0; i < grid.size(); ++i) csv.line(grid.x(i), 0.0, u1[i]);
  }
  {
    Csv csv(c.out_dir / "pair1d_spectra.csv", {"sector", "index", "energy", "residual", "bound"});
    for (const auto& [name, s] : {std::pair{"h0", &phase.h0_spectrum}, std::pair{"h1", &phase.h1_spectrum}})
      for (const Level& l : s->levels) csv.line(name, l.n, l.energy, l.residual, l.bound ? 1 : 0);
  }
  // Reported, not gated: with residuals taken per unit input norm, round-off grows like h^-3,
  // and this grid is far finer than the one the algebra command gates on.
  Json report = {{"config", config_json(c)},
                 {"phase", phase},
                 {"identities",
                  {{"grid_spacing", grid.spacing()},
                   {"intertwining", {{"q_h0", tw.q_h0}, {"h0_qdag", tw.h0_qdag}, {"threshold", c.threshold}}},
                   {"algebra", checks}}}};
  write_json(c.out_dir / "pair1d_phase.json", report);

  out << "phase=" << to_string(phase.phase);
  if (phase.matched_level) out << " added level " << fmt(phase.matched_level->energy, 8) << " in " << phase.matched_sector;
  out << '\n';
  return exit_ok;
}

inline int cmd_pair2d(RunConfig& c, std::ostream& out) {
  defaults(c, 161, 3.0);
  require(c.alpha > 0.0 && std::isfinite(c.alpha), "alpha must be positive, got " + fmt(c.alpha));
  check_grid(c, 5);

  // A quadrant away from the origin keeps the polar angle single-valued.
  constexpr double lo = 0.5;
  const Grid2D grid(lo, lo + c.extent, c.grid, lo, lo + c.extent, c.grid);
  const double alpha = c.alpha;
  const auto u = [alpha](Point p) { return -alpha / p.radius(); };
  const auto u1 = partner_potential_2d(u, coulomb_ground_support(alpha), grid);
  double partner_error = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) partner_error = std::max(partner_error, std::abs(u1[i] - alpha / grid.point(i).radius()));

  const MoutardPair pair = coulomb_pair(alpha, grid);
  const auto psi1 = moutard_transform(pair, PathOrder::HorizontalFirst);
  const auto psi1_v = moutard_transform(pair, PathOrder::VerticalFirst);
  const double path_gap = (psi1.values() - psi1_v.values()).cwiseAbs().maxCoeff();
  const double eigen_residual = partner_eigen_residual(pair, psi1);
  const double conservation = conservation_residual(pair);

  const double r_max = 60.0 / alpha;
  const auto radial = RadialGrid::staggered(r_max, static_cast<std::size_t>(std::llround(r_max / 0.01)));
  const SpectrumReport repulsive = solve_radial([alpha](double r) { return alpha / r; }, 0, radial, 3);
  const SpectrumReport attractive = solve_radial([alpha](double r) { return -alpha / r; }, 0, radial, 3);
  const std::size_t partner_bound = repulsive.bound_levels().size();

  {
    Csv csv(c.out_dir / "pair2d_fields.csv", {"x", "y", "u", "u1", "psi", "psi1"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Point p = grid.point(i);
      csv.line(p.x, p.y, u(p), u1[i], pair.psi()[i], psi1[i]);
    }
  }
  Json report = {{"config", config_json(c)},
                 {"domain", {{"lo", lo}, {"hi", lo + c.extent}, {"points", c.grid}}},
                 {"e0", pair.e0()},
                 {"partner_potential_error", measured(partner_error, 1e-10)},
                 {"path_gap", path_gap},
                 {"partner_eigen_residual", eigen_residual},
                 {"conservation_residual", conservation},
                 {"partner_bound_levels", partner_bound},
                 {"partner_radial", repulsive},
                 {"seed_radial", attractive}};
  write_json(c.out_dir / "pair2d_report.json", report);

  out << "partner potential error " << fmt(partner_error) << ", path gap " << fmt(path_gap) << ", eigen residual "
      << fmt(eigen_residual) << ", bound levels of +alpha/r: " << partner_bound << '\n';
  if (partner_error > 1e-10) throw GateFailure("partner potential differs from +alpha/r by " + fmt(partner_error));
  if (partner_bound > 0) throw GateFailure("+alpha/r holds a bound level at " + fmt(repulsive.bound_levels()[0].energy));
  return exit_ok;
}

inline int cmd_cylinder(RunConfig& c, std::ostream& out) {
  defaults(c, 128, 20.0);
  check_seed(c);
  check_spectrum_window(c);
  check_grid(c, 8);
  require(c.grid % 2 == 0, "grid must be even so that no node sits on the origin");
  require(c.core >= 0.0, "core must be non-negative");
  if (!c.pin.empty()) {
    require(c.pin.size() == 2, "pin takes two integers N m");
    require(c.pin[0] >= 0 && std::abs(c.pin[1]) < c.pin[0] + 1, "pin needs N >= 0 and |m| < N + 1");
  }

  const CylindricalSeed seed(c.b, c.k);
  const SeedPotentials pot = seed_potentials(seed);
  SpectrumWindow window{c.spacing, std::nullopt};
  if (c.r_max > 0.0) window.r_max = c.r_max;
  const SpectrumTable table = spectrum_table(seed, c.nmax, c.mmax, window);

  // The added level: plus-branch ground at E0, with no minus-branch partner.
  double plus_ground = 0.0;
  double nearest_minus = std::numeric_limits<double>::infinity();
  for (const auto& r : table.rows) {
    if (r.branch == Branch::Plus && r.n == 0 && r.m == 0) plus_ground = r.numeric;
    if (r.branch == Branch::Minus && std::abs(r.numeric - seed.e0()) < std::abs(nearest_minus - seed.e0())) nearest_minus = r.numeric;
  }
  const double added_error = std::abs(plus_ground - seed.e0()) / std::abs(seed.e0());
  const bool absent_from_minus = std::abs(nearest_minus - seed.e0()) / std::abs(seed.e0()) > c.tolerance;

  const Grid2D grid = Grid2D::centered(c.extent, c.grid);
  const auto hs = assemble_hamiltonians(seed.support(), grid);
  const SuperModel model = build_super_2d(hs, seed.support().name);
  const ZeroModeFields fields = zero_mode_fields(seed, grid);
  const double core = c.core / c.b;
  const ZeroModeReport zm_full = zero_modes(model, fields.inverse_phi, fields.psi_tilde);
  const ZeroModeReport zm_core = zero_modes(model, fields.inverse_phi, fields.psi_tilde, {1, core});
  const MembershipReport mem_full = level_membership_diagnostics(normalized(fields.psi_tilde), hs);
  const MembershipReport mem_core = level_membership_diagnostics(normalized(fields.psi_tilde, core), hs, {core, 1e-8});
  const MatrixCandidate candidate = matrix_candidate(cylindrical_pair(seed, grid), 1.0, cylindrical_grad_f(seed));
  const ZeroModeNormalizability norms = zero_mode_normalizability(seed, grid);

  Json report = {{"config", config_json(c)},
                 {"e0", seed.e0()},
                 {"potential_cross_check", measured(pot.cross_check, 1e-10)},
                 {"spectrum", table_json(table, c.tolerance)},
                 {"added_level",
                  {{"plus_ground", plus_ground},
                   {"rel_error", measured(added_error, c.tolerance)},
                   {"nearest_minus", nearest_minus},
                   {"absent_from_minus", absent_from_minus}}},
                 {"classification", asymptotic_classifier(seed.support())},
                 {"normalizability", norms},
                 {"zero_modes", {{"full", zm_full}, {"core_excised", zm_core}, {"core_radius", core}}},
                 {"membership",
                  {{"full", mem_full}, {"core_excised", mem_core}, {"core_radius", core}, {"tolerance", 1e-2}}},
                 {"matrix_candidate_discrepancy", candidate.discrepancy}};
  if (!c.pin.empty()) report["pinning"] = pin_level(c.pin[0], c.pin[1], c.b, {true, c.spacing});

  write_spectrum_csv(c.out_dir / "cylinder_spectrum.csv", table);
  {
    Csv csv(c.out_dir / "cylinder_potentials.csv", {"r", "u", "u1", "phi"});
    for (int i = 1; i <= 400; ++i) {
      const double r = 0.05 * i / c.b;
      csv.line(r, pot.u(r), pot.u1(r), seed.phi(r));
    }
  }
  write_json(c.out_dir / "cylinder_report.json", report);

  out << "max relative deviation " << fmt(table.max_rel_error()) << " over " << table.rows.size() << " levels\n";
  out << "plus ground " << fmt(plus_ground, 8) << " (E0 = " << fmt(seed.e0()) << "), "
      << (absent_from_minus ? "absent from" : "present in") << " the minus spectrum\n";
  if (report.contains("pinning")) {
    const Json& p = report["pinning"];
    out << "pin N=" << c.pin[0] << " m=" << c.pin[1] << ": k=" << p["k"]["text"].get<std::string>();
    if (p["plus_n"].is_null())
      out << ", no plus-branch level coincides\n";
    else
      out << ", minus(N=" << c.pin[0] << ",m=" << c.pin[1] << ") coincides with plus(N=" << p["plus_n"].get<int>() << ",m=" << c.pin[1]
          << ") at " << p["level_over_b2"]["text"].get<std::string>() << " b^2\n";
  }
  if (auto breach = spectrum_breach(table, c.tolerance)) throw GateFailure(*breach);
  return exit_ok;
}

inline int cmd_algebra(RunConfig& c, std::ostream& out) {
  defaults(c, 24, 6.0);
  require(c.charges >= 1 && c.charges <= 4, "n must lie in 1..4, got " + std::to_string(c.charges));
  check_seed(c);
  check_grid(c, 4);
  require(c.grid % 2 == 0, "grid must be even so that no node sits on the origin");
  require(c.threshold > 0.0, "threshold must be positive");

  const SupportSpec support = cylindrical_support(c.b, c.k);
  const Grid2D grid = Grid2D::centered(c.extent, c.grid);
  const auto hs = assemble_hamiltonians(support, grid);
  const IntertwiningReport tw = intertwining_residual(hs, c.seed);
  const auto super1 = algebra_residuals(build_super_1d(LambdaSupport::free_particle(0.5, 1.0).to_support(), Grid1D(-c.extent, c.extent, c.grid)), c.seed);
  const auto super2 = algebra_residuals(build_super_2d(hs, support.name), c.seed);
  const DualReport dual = build_dual(support, grid, c.seed);
  const ExtendedModel ext = build_extended(support, grid, c.charges, c.seed);

  std::vector<AlgebraCheck> all;
  const auto add = [&](const std::string& name, double r) { all.push_back({name, r, c.threshold}); };
  add("q_l h0 = h_lm q_m", tw.q_h0);
  add("p_l h1 = H_lm p_m", tw.p_h1);
  add("h0 q_l^+ = q_m^+ h_ml", tw.h0_qdag);
  add("h1 p_l^+ = p_m^+ H_ml", tw.h1_pdag);
  add("h_mk H_kl = E0 h~_ml", tw.hH);
  add("H_mk h_kl = E0 h~_ml", tw.Hh);
  for (const auto& chk : super1) add(chk.relation + " (1D)", chk.residual);
  for (const auto& chk : super2) add(chk.relation + " (2D)", chk.residual);
  add("dual corner (0,0)", dual.corner_top);
  add("dual corner (3,3)", dual.corner_bottom);
  for (const auto& chk : ext.report.checks) add(chk.relation, chk.residual);

  Json report = {{"config", config_json(c)},
                 {"threshold", c.threshold},
                 {"checks", all},
                 {"dual_middle_difference", dual.middle_difference},
                 {"extended", ext.report}};
  write_json(c.out_dir / "algebra_report.json", report);

  double worst = 0.0;
  for (const auto& chk : all) worst = std::max(worst, chk.residual);
  out << "H: " << ext.report.h_pattern << '\n' << "Q1: " << ext.report.q1_pattern << '\n';
  out << all.size() << " relations, max residual " << fmt(worst) << '\n';
  if (ext.report.first_failure) throw GateFailure("residual breach: " + *ext.report.first_failure);
  for (const auto& chk : all)
    if (!chk.pass()) throw GateFailure("residual breach: " + chk.relation + " = " + fmt(chk.residual) + " > " + fmt(c.threshold));
  return exit_ok;
}

inline int cmd_spectrum(RunConfig& c, std::ostream& out) {
  check_seed(c);
  check_spectrum_window(c);
  require(c.branch == "minus" || c.branch == "plus" || c.branch == "both", "branch must be minus, plus or both");
  std::vector<Branch> branches;
  if (c.branch != "plus") branches.push_back(Branch::Minus);
  if (c.branch != "minus") branches.push_back(Branch::Plus);

  const CylindricalSeed seed(c.b, c.k);
  SpectrumWindow window{c.spacing, std::nullopt};
  if (c.r_max > 0.0) window.r_max = c.r_max;
  const SpectrumTable table = spectrum_table(seed, c.nmax, c.mmax, window, branches);
  Json report = {{"config", config_json(c)}, {"spectrum", table_json(table, c.tolerance)}};
  if (branches.size() == 2) {
    const auto minus = numerical_spectrum(seed, Branch::Minus, c.nmax, c.mmax, window);
    const auto plus = numerical_spectrum(seed, Branch::Plus, c.nmax, c.mmax, window);
    CompareOptions options;
    options.added_energy = seed.e0();
    options.added_tolerance = c.tolerance;
    report["comparison"] = compare_spectra(minus, plus, c.tolerance, options);
  }
  write_spectrum_csv(c.out_dir / "spectrum.csv", table);
  write_json(c.out_dir / "spectrum_report.json", report);
  out << table.rows.size() << " levels, max relative deviation " << fmt(table.max_rel_error()) << '\n';
  if (auto breach = spectrum_breach(table, c.tolerance)) throw GateFailure(*breach);
  return exit_ok;
}

}  // namespace detail

/// Parses argv, runs one command and maps failures to exit codes.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  using namespace detail;
  RunConfig c;
  CLI::App app{"Supersymmetric partner Hamiltonians: construction and numerical checks", "susy"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_flag;
  CLI::Option* out_opt = app.add_option("--out", out_flag, "output directory (beats SUSY_OUT and the config file)");
  app.add_option("--config", config_path, "JSON config file; flags override its entries")->check(CLI::ExistingFile);
  CLI::Option* seed_opt = app.add_option("--seed", c.seed, "seed for the random residual test fields")->capture_default_str();
  app.fallthrough();

  std::map<std::string, Bindings> bindings;
  const auto sub = [&](const std::string& name, const std::string& help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->fallthrough();
    return s;
  };

  CLI::App* pair1d = sub("pair1d", "1D level addition on the free particle");
  auto& b1 = bindings["pair1d"];
  b1.add(pair1d, "lambda", c.lambda, "mixing weight in [0, 1]");
  b1.add(pair1d, "kappa", c.kappa, "E0 = -kappa^2");
  b1.add(pair1d, "grid", c.grid, "points (default 4000)");
  b1.add(pair1d, "extent", c.extent, "half width (default 20)");
  b1.add(pair1d, "threshold", c.threshold, "threshold quoted next to the identity residuals");

  CLI::App* pair2d = sub("pair2d", "Coulomb pair: partner potential and Moutard transform");
  auto& b2 = bindings["pair2d"];
  b2.add(pair2d, "alpha", c.alpha, "coupling of -alpha/r");
  b2.add(pair2d, "grid", c.grid, "points per axis (default 161)");
  b2.add(pair2d, "extent", c.extent, "side of the square [0.5, 0.5 + extent] (default 3)");

  CLI::App* cylinder = sub("cylinder", "cylindrical seed: spectra, zero modes, membership, pinning");
  auto& bc = bindings["cylinder"];
  bc.add(cylinder, "b", c.b, "E0 = -b^2");
  bc.add(cylinder, "k", c.k, "power of 1/r in the support");
  bc.add(cylinder, "nmax", c.nmax, "highest radial quantum number");
  bc.add(cylinder, "mmax", c.mmax, "highest angular channel");
  bc.add(cylinder, "pin", c.pin, "N m: pick k so that minus(N, m) meets a plus level")->expected(2);
  bc.add(cylinder, "spacing", c.spacing, "radial spacing");
  bc.add(cylinder, "rmax", c.r_max, "radial box (0: per-channel window)");
  bc.add(cylinder, "tolerance", c.tolerance, "relative spectral tolerance");
  bc.add(cylinder, "grid", c.grid, "2D points per axis, even (default 128)");
  bc.add(cylinder, "extent", c.extent, "2D half width (default 20)");
  bc.add(cylinder, "core", c.core, "excised radius times b for the core-excised diagnostics");

  CLI::App* algebra = sub("algebra", "exact operator identities and extended charges");
  auto& ba = bindings["algebra"];
  ba.add(algebra, "n", c.charges, "number of charges, 1..4");
  ba.add(algebra, "b", c.b, "support parameter b");
  ba.add(algebra, "k", c.k, "support parameter k");
  ba.add(algebra, "grid", c.grid, "points per axis, even (default 24)");
  ba.add(algebra, "extent", c.extent, "half width (default 6)");
  ba.add(algebra, "threshold", c.threshold, "residual threshold");

  CLI::App* spectrum = sub("spectrum", "radial spectra of the seed and partner potentials");
  auto& bs = bindings["spectrum"];
  bs.add(spectrum, "b", c.b, "E0 = -b^2");
  bs.add(spectrum, "k", c.k, "power of 1/r in the support");
  bs.add(spectrum, "branch", c.branch, "minus, plus or both");
  bs.add(spectrum, "nmax", c.nmax, "highest radial quantum number");
  bs.add(spectrum, "mmax", c.mmax, "highest angular channel");
  bs.add(spectrum, "spacing", c.spacing, "radial spacing");
  bs.add(spectrum, "rmax", c.r_max, "radial box (0: per-channel window)");
  bs.add(spectrum, "tolerance", c.tolerance, "relative spectral tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  c.command = chosen->get_name();
  try {
    std::string config_out;
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      Json config;
      try {
        config = Json::parse(is);
      } catch (const nlohmann::json::exception& e) {
        throw UsageError("config: " + std::string(e.what()));
      }
      require(config.is_object(), "config: top level must be an object");
      bindings[c.command].apply(config);
      if (config.contains("seed") && seed_opt->count() == 0) c.seed = config["seed"].get<std::uint64_t>();
      if (config.contains("out")) config_out = config["out"].get<std::string>();
    }
    const char* env_out = std::getenv("SUSY_OUT");
    if (out_opt->count() > 0)
      c.out_dir = out_flag;
    else if (env_out && *env_out)
      c.out_dir = env_out;
    else if (!config_out.empty())
      c.out_dir = config_out;
    std::filesystem::create_directories(c.out_dir);

    if (c.command == "pair1d") return cmd_pair1d(c, out);
    if (c.command == "pair2d") return cmd_pair2d(c, out);
    if (c.command == "cylinder") return cmd_cylinder(c, out);
    if (c.command == "algebra") return cmd_algebra(c, out);
    return cmd_spectrum(c, out);
  } catch (const UsageError& e) {
    err << c.command << ": " << e.what() << '\n';
    return exit_usage;
  } catch (const InvalidArgument& e) {
    err << c.command << ": " << e.what() << '\n';
    return exit_usage;
  } catch (const nlohmann::json::exception& e) {
    err << c.command << ": config: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << c.command << ": " << e.what() << '\n';
    return exit_usage;
  } catch (const GateFailure& e) {
    err << c.command << ": " << e.what() << '\n';
    return exit_numerical;
  } catch (const Error& e) {
    err << c.command << ": " << e.what() << '\n';
    return exit_numerical;
  }
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"susy"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace susy::cli
