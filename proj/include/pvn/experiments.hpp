#pragma once

// End-to-end runs driven by a RunConfig: solve, sweep, efficiency, scaling.

#include <chrono>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "pvn/efficiency.hpp"
#include "pvn/error.hpp"
#include "pvn/fourier_grid.hpp"
#include "pvn/io/config.hpp"
#include "pvn/io/csv.hpp"
#include "pvn/potentials.hpp"
#include "pvn/pruner.hpp"
#include "pvn/semiclassics.hpp"
#include "pvn/solver.hpp"
#include "pvn/vn_basis.hpp"

namespace pvn {

/// 2-D grids above this many points need the long-running flag.
constexpr int kLongRunningGridPoints = 5000;

using MetaList = std::vector<std::pair<std::string, std::string>>;

struct SolveResult {
  Spectrum spectrum;
  std::optional<CsvTable> cells;
  MetaList meta;
};

namespace detail {

inline std::pair<int, int> lattice_shape(int n, int nx, int np, const char* field) {
  if (nx == 0 && np == 0) return square_factorization(n);
  if (nx <= 0 || np <= 0)
    throw ConfigError(field, 0, "set both lattice sizes of a dimension or neither");
  if (nx * np != n)
    throw ConfigError(field, 0,
                      "lattice " + std::to_string(nx) + "x" + std::to_string(np) +
                          " does not cover a grid of " + std::to_string(n) + " points");
  return {nx, np};
}

inline SolveOptions solve_options(const RunConfig& c) {
  SolveOptions o;
  o.rcond = c.solver.rcond;
  o.spectral_switch = c.solver.spectral_switch;
  return o;
}

inline Grid1D make_grid(double x_min, double length, int n, const char* field) {
  try {
    return Grid1D(x_min, length, n);
  } catch (const ContractViolation& e) {
    throw ConfigError(field, 0, e.what());
  }
}

inline int states_wanted(const RunConfig& c, int basis_size) {
  const int n = c.solver.n_states;
  if (n > basis_size)
    throw ConfigError("solver.n_states", 0,
                      "asks for " + std::to_string(n) + " states from a basis of " +
                          std::to_string(basis_size));
  return n == 0 ? basis_size : n;
}

inline std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : "; ") + s;
  return out;
}

inline CsvTable cells_table_1d(const VnLattice& lat, const PotentialSpec& spec,
                               const PruneMask& mask) {
  CsvTable t{{"flat_index", "x_c", "p_c", "H_cl", "kept"}, {}};
  const std::vector<double> h = center_energies(lat, spec);
  for (int c = 0; c < lat.size(); ++c)
    t.rows.push_back({csv_number(c), csv_number(lat.center_x(c)), csv_number(lat.center_p(c)),
                      csv_number(h[c]), mask.kept[c] ? "1" : "0"});
  return t;
}

inline CsvTable cells_table_2d(const VnLattice& lx, const VnLattice& ly, const PotentialSpec& spec,
                               const PruneMask& mask) {
  CsvTable t{{"flat_index", "x_c", "p_c", "y_c", "py_c", "H_cl", "kept"}, {}};
  const std::vector<double> h = center_energies(lx, ly, spec);
  for (int cy = 0; cy < ly.size(); ++cy)
    for (int cx = 0; cx < lx.size(); ++cx) {
      const int f = cx + lx.size() * cy;
      t.rows.push_back({csv_number(f), csv_number(lx.center_x(cx)), csv_number(lx.center_p(cx)),
                        csv_number(ly.center_x(cy)), csv_number(ly.center_p(cy)), csv_number(h[f]),
                        mask.kept[f] ? "1" : "0"});
    }
  return t;
}

inline PruneRule prune_rule(const RunConfig& c, const VnLattice* lat1d, const PotentialSpec& spec) {
  PruneRule r{c.prune.e_cut, c.prune.margin, c.prune.halo};
  if (c.prune.auto_margin) {
    if (!lat1d)
      throw ConfigError("prune.margin", 0, "margin = auto is defined for 1-D lattices only");
    r.margin = auto_margin(*lat1d, spec, c.prune.e_cut);
  }
  return r;
}

}  // namespace detail

/// Spectrum table with columns index, energy.
inline CsvTable spectrum_table(const Spectrum& s) {
  CsvTable t{{"index", "energy"}, {}};
  for (std::size_t i = 0; i < s.energies.size(); ++i)
    t.rows.push_back({csv_number(static_cast<long long>(i)), csv_number(s.energies[i])});
  return t;
}

/// Flat `key = value` text.
inline std::string format_meta(const MetaList& m) {
  std::string out;
  for (const auto& [k, v] : m) out += k + " = " + v + "\n";
  return out;
}

inline SolveResult run_solve(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const PotentialSpec spec = make_potential(c.potential);
  const BasisLabel basis = basis_from_string(c.solver.basis);
  const SolveOptions sopts = detail::solve_options(c);
  const BasisOptions bopts{c.solver.rcond, c.solver.allow_pseudo_inverse};
  const CenterConvention conv = center_convention_from_string(c.lattice.convention);
  SolveResult res;
  MetaList& meta = res.meta;
  meta.push_back({"basis", c.solver.basis});
  meta.push_back({"dimension", std::to_string(spec.dimension())});
  std::vector<std::string> warnings;
  std::optional<Grid1D> grid1;
  std::optional<Grid2D> grid2;

  if (spec.dimension() == 1) {
    const Grid1D grid = detail::make_grid(c.grid.x_min, c.grid.length, c.grid.n, "grid.n");
    grid1 = grid;
    meta.push_back({"grid_size", std::to_string(grid.size())});
    if (basis == BasisLabel::fgh) {
      const int n = detail::states_wanted(c, grid.size());
      res.spectrum = solve_fgh(grid, spec, n);
    } else {
      const auto [nx, np] = detail::lattice_shape(grid.size(), c.lattice.n_x, c.lattice.n_p, "lattice.n_x");
      const VnLattice lat(grid, nx, np, spec.hbar, c.lattice.alpha, conv);
      meta.push_back({"lattice", std::to_string(nx) + "x" + std::to_string(np)});
      meta.push_back({"alpha", csv_number(lat.alpha())});
      if (basis == BasisLabel::vn) {
        const ContinuousVnMatrices m = continuous_vn_matrices(lat, spec);
        res.spectrum = solve_generalized({m.h, m.s, BasisLabel::vn},
                                         detail::states_wanted(c, lat.size()), sopts);
      } else if (basis == BasisLabel::pvn) {
        const ComplexMatrix g = build_G(lat, grid);
        const GeneralizedProblem p = assemble_pvn(hamiltonian_fgh(grid, spec), g);
        res.spectrum = solve_generalized(p, detail::states_wanted(c, p.size()), sopts);
      } else {
        const BasisMatrices bm = build_basis(lat, grid, bopts);
        warnings.insert(warnings.end(), bm.warnings.begin(), bm.warnings.end());
        const PruneRule rule = detail::prune_rule(c, &lat, spec);
        const PruneMask mask = select_cells(lat, spec, rule);
        meta.push_back({"cond_S", csv_number(bm.cond_s)});
        meta.push_back({"margin", csv_number(rule.margin)});
        meta.push_back({"n_kept", std::to_string(mask.n_kept())});
        res.cells = detail::cells_table_1d(lat, spec, mask);
        if (mask.n_kept() == 0) throw ContractViolation("pruning removed every basis function");
        const GeneralizedProblem p = assemble_bvn(hamiltonian_fgh(grid, spec), bm.b, bm.s_inv, mask);
        res.spectrum = solve_generalized(p, std::min(detail::states_wanted(c, grid.size()), p.size()), sopts);
      }
    }
  } else {
    const Grid2D grid{detail::make_grid(c.grid.x_min, c.grid.length, c.grid.n, "grid.n"),
                      detail::make_grid(c.grid.y_min, c.grid.y_length, c.grid.n_y, "grid.n_y")};
    grid2 = grid;
    meta.push_back({"grid_size", std::to_string(grid.size())});
    if (grid.size() > kLongRunningGridPoints && !c.run.long_running)
      throw ConfigError("run.long_running", 0,
                        "a 2-D grid of " + std::to_string(grid.size()) + " points (> " +
                            std::to_string(kLongRunningGridPoints) +
                            ") needs --long-running");
    if (basis == BasisLabel::fgh) {
      res.spectrum = solve_fgh(grid, spec, detail::states_wanted(c, grid.size()));
    } else if (basis == BasisLabel::vn) {
      throw NotAvailable("continuous vN matrices are 1-D harmonic only");
    } else {
      const auto [nx, np] = detail::lattice_shape(grid.gx.size(), c.lattice.n_x, c.lattice.n_p, "lattice.n_x");
      const auto [ny, npy] = detail::lattice_shape(grid.gy.size(), c.lattice.n_y, c.lattice.n_py, "lattice.n_y");
      const VnLattice lx(grid.gx, nx, np, spec.hbar, c.lattice.alpha, conv);
      const VnLattice ly(grid.gy, ny, npy, spec.hbar, c.lattice.alpha, conv);
      meta.push_back({"lattice", std::to_string(nx) + "x" + std::to_string(np) + " (x) " +
                                     std::to_string(ny) + "x" + std::to_string(npy)});
      const BasisMatrices bx = build_basis(lx, grid.gx, bopts), by = build_basis(ly, grid.gy, bopts);
      warnings.insert(warnings.end(), bx.warnings.begin(), bx.warnings.end());
      warnings.insert(warnings.end(), by.warnings.begin(), by.warnings.end());
      meta.push_back({"cond_S", csv_number(bx.cond_s * by.cond_s)});
      const KroneckerHamiltonian kh(grid, spec);
      if (basis == BasisLabel::pvn) {
        const GeneralizedProblem p = assemble_pvn(kh, bx, by);
        res.spectrum = solve_generalized(p, detail::states_wanted(c, p.size()), sopts);
      } else {
        const PruneRule rule = detail::prune_rule(c, nullptr, spec);
        const PruneMask mask = select_cells(lx, ly, spec, rule);
        meta.push_back({"margin", csv_number(rule.margin)});
        meta.push_back({"n_kept", std::to_string(mask.n_kept())});
        res.cells = detail::cells_table_2d(lx, ly, spec, mask);
        if (mask.n_kept() == 0) throw ContractViolation("pruning removed every basis function");
        const GeneralizedProblem p = assemble_bvn(kh, bx, by, mask);
        res.spectrum = solve_generalized(p, std::min(detail::states_wanted(c, grid.size()), p.size()), sopts);
      }
    }
  }
  meta.push_back({"basis_size", std::to_string(res.spectrum.basis_size)});
  meta.push_back({"n_states", std::to_string(res.spectrum.energies.size())});
  meta.push_back({"metric_condition", csv_number(res.spectrum.metric_condition)});
  meta.push_back({"truncated", std::to_string(res.spectrum.truncated)});

  // comparison against a reference spectrum
  std::string ref_kind = c.solver.reference;
  std::vector<double> ref;
  if (ref_kind == "auto" || ref_kind == "analytic") {
    try {
      ref = analytic_levels(spec, std::max<int>(1, static_cast<int>(res.spectrum.energies.size())) - 1);
      ref_kind = "analytic";
    } catch (const NotAvailable&) {
      if (c.solver.reference == "analytic") throw;
      ref_kind = "none";
    }
  } else if (ref_kind == "fgh") {
    const Spectrum f = grid1 ? solve_fgh(*grid1, spec, static_cast<int>(res.spectrum.energies.size()))
                             : solve_fgh(*grid2, spec, static_cast<int>(res.spectrum.energies.size()));
    ref = f.energies;
  }
  meta.push_back({"reference", ref_kind});
  if (!ref.empty()) {
    const double e_max = c.solver.e_max.value_or(c.prune.e_cut);
    const Accuracy acc{c.solver.digits, accuracy_mode_from_string(c.solver.accuracy)};
    std::size_t n_ref = 0;
    while (n_ref < ref.size() && ref[n_ref] < e_max) ++n_ref;
    meta.push_back({"e_max", csv_number(e_max)});
    meta.push_back({"n_reference", std::to_string(n_ref)});
    meta.push_back({"accuracy", std::to_string(acc.digits) + " " + std::string(to_string(acc.mode))});
    meta.push_back({"n_converged", std::to_string(count_converged(res.spectrum, ref, acc, e_max))});
    meta.push_back({"max_abs_error", csv_number(max_abs_error(res.spectrum.energies, ref, n_ref))});
    meta.push_back({"max_rel_error", csv_number(max_rel_error(res.spectrum.energies, ref, n_ref))});
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  meta.push_back({"wall_time_s", csv_number(wall)});
  meta.push_back({"seed", std::to_string(c.run.seed)});
  meta.push_back({"warnings", detail::join(warnings)});
  return res;
}

/// Error of one level against its closed form as the basis grows.
/// Columns: method, basis_size, energy, abs_error.
inline CsvTable run_sweep(const RunConfig& c) {
  const PotentialSpec spec = make_potential(c.potential);
  if (spec.dimension() != 1) throw ConfigError("potential.kind", 0, "sweeps are 1-D only");
  const int target = c.sweep.target_index;
  const double exact = analytic_levels(spec, target).at(target);
  const SolveOptions sopts = detail::solve_options(c);
  CsvTable t{{"method", "basis_size", "energy", "abs_error"}, {}};
  for (const std::string& method : c.sweep.methods) {
    const BasisLabel basis = basis_from_string(method);
    for (int n : c.sweep.sizes) {
      if (n <= target) continue;
      Grid1D grid = detail::make_grid(c.grid.x_min, c.grid.length, n, "sweep.sizes");
      if (c.sweep.box == "balanced") {
        if (spec.kind != PotentialKind::harmonic)
          throw ConfigError("sweep.box", 0, "the balanced box is defined for harmonic potentials");
        // equal position and momentum extents of the grid in oscillator units
        const double half = std::sqrt(std::numbers::pi * spec.hbar * n /
                                      (2.0 * spec.mass() * spec.param("omega")));
        grid = Grid1D(-half, 2.0 * half, n);
      }
      const auto [nx, np] = square_factorization(n);
      double e = 0.0;
      try {
        if (basis == BasisLabel::fgh) {
          e = solve_fgh(grid, spec, target + 1).energies[target];
        } else {
          const VnLattice lat(grid, nx, np, spec.hbar, c.lattice.alpha,
                              center_convention_from_string(c.lattice.convention));
          GeneralizedProblem p;
          if (basis == BasisLabel::vn) {
            const ContinuousVnMatrices m = continuous_vn_matrices(lat, spec);
            p = {m.h, m.s, BasisLabel::vn};
          } else if (basis == BasisLabel::pvn) {
            p = assemble_pvn(hamiltonian_fgh(grid, spec), build_G(lat, grid));
          } else {
            const BasisMatrices bm = build_basis(lat, grid);
            const PruneMask mask = select_cells(lat, spec, detail::prune_rule(c, &lat, spec));
            p = assemble_bvn(hamiltonian_fgh(grid, spec), bm.b, bm.s_inv, mask);
          }
          if (p.size() <= target) continue;
          e = solve_generalized(p, target + 1, sopts).energies[target];
        }
      } catch (const Error& err) {
        throw Error(method + " at basis size " + std::to_string(n) + ": " + err.what());
      }
      t.rows.push_back({method, csv_number(n), csv_number(e), csv_number(std::abs(e - exact))});
    }
  }
  return t;
}

inline SearchPolicy search_policy(const RunConfig& c) {
  SearchPolicy p = SearchPolicy::desk(c.efficiency.e_max);
  p.accuracy = {c.efficiency.digits, accuracy_mode_from_string(c.efficiency.accuracy)};
  p.max_grid = c.efficiency.max_grid;
  p.halo_max = c.efficiency.halo_max;
  p.halo_step = c.efficiency.halo_step;
  p.lattice_steps = c.efficiency.lattice_steps;
  return p;
}

/// Columns: hbar, method, basis_size, n_converged, ratio, status.
inline CsvTable efficiency_table(const std::vector<EfficiencyPoint>& rows) {
  CsvTable t{{"hbar", "method", "basis_size", "n_converged", "ratio", "status"}, {}};
  for (const EfficiencyPoint& r : rows)
    t.rows.push_back({csv_number(r.hbar), std::string(to_string(r.method)), csv_number(r.basis_size),
                      csv_number(r.n_converged), csv_number(r.ratio), r.status});
  return t;
}

inline CsvTable run_efficiency(const RunConfig& c) {
  const PotentialSpec spec = make_potential(c.potential);
  return efficiency_table(efficiency_scan(spec, c.efficiency.hbars, search_policy(c)));
}

/// Columns: D, V_mc, V_mc_stderr, V_semiclassical, V_exponential_ref,
/// G_exact, G_limit_gD, G_limit_Dg, box_ratio.
inline CsvTable scaling_table(const std::vector<ScalingRow>& rows) {
  CsvTable t{{"D", "V_mc", "V_mc_stderr", "V_semiclassical", "V_exponential_ref", "G_exact",
              "G_limit_gD", "G_limit_Dg", "box_ratio"},
             {}};
  for (const ScalingRow& r : rows)
    t.rows.push_back({csv_number(r.dimension), csv_number(r.v_mc), csv_number(r.v_mc_stderr),
                      csv_number(r.v_semiclassical), csv_number(r.v_exponential_ref),
                      csv_number(r.g_exact), csv_number(r.g_limit_gd), csv_number(r.g_limit_dg),
                      csv_number(r.box_ratio)});
  return t;
}

inline CsvTable run_scaling(const RunConfig& c, std::vector<std::string>* warnings = nullptr) {
  const PotentialSpec spec = make_potential(c.potential);
  if (c.scaling.d_max < c.scaling.d_min)
    throw ConfigError("scaling.d_max", 0, "must be >= scaling.d_min");
  const std::vector<ScalingRow> rows = scaling_report(
      spec, c.scaling.d_min, c.scaling.d_max, c.scaling.energy, {c.scaling.samples, c.run.seed});
  if (warnings)
    for (const ScalingRow& r : rows)
      for (const std::string& w : r.warnings)
        warnings->push_back("D = " + std::to_string(r.dimension) + ": " + w);
  return scaling_table(rows);
}

}  // namespace pvn
