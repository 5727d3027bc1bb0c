#pragma once

// Efficiency ratio (basis functions per converged level) as a function of hbar
// for the Fourier grid and the pruned biorthogonal basis.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pvn/error.hpp"
#include "pvn/fourier_grid.hpp"
#include "pvn/potentials.hpp"
#include "pvn/pruner.hpp"
#include "pvn/semiclassics.hpp"
#include "pvn/solver.hpp"
#include "pvn/vn_basis.hpp"

namespace pvn {

struct EfficiencyPoint {
  double hbar = 0.0;
  BasisLabel method = BasisLabel::fgh;
  int basis_size = 0;
  int n_converged = 0;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";  // ok | budget_exceeded | failed: <reason>
  // the winning configuration
  double x_min = 0.0;
  double length = 0.0;
  int grid_size = 0;
  int lattice_x = 0;
  int lattice_p = 0;
  double halo = 0.0;
};

/// Deterministic search schedule.
///
/// FGH: N = 2 n_ref, 2 n_ref + 2, ... up to max_grid; at each N every box
/// [x_lo - a sqrt(hbar), x_hi + b sqrt(hbar)] of the pad family is tried,
/// where x_lo, x_hi are the turning points at e_max. The first converged
/// (N, box) wins.
///
/// bvN: on the winning FGH box, lattices k x k, k x (k+1), (k+1) x k for
/// k = floor(sqrt(N_fgh)) .. + lattice_steps with even N' >= N_fgh; for each,
/// the halo ladder is climbed at e_cut = e_max until the pruned basis
/// converges. The smallest kept count over all lattices wins.
struct SearchPolicy {
  Accuracy accuracy{4, AccuracyMode::relative};
  double e_max = 11.25;
  std::vector<double> pad_low;
  std::vector<double> pad_high;
  double halo_max = 7.0;
  double halo_step = 0.25;
  int lattice_steps = 14;
  int max_grid = 1024;

  static SearchPolicy desk(double e_max = 11.25) {
    SearchPolicy p;
    p.e_max = e_max;
    for (int i = 0; i < 8; ++i) p.pad_low.push_back(0.3 + (2.0 - 0.3) * i / 7.0);
    for (int i = 0; i < 12; ++i) p.pad_high.push_back(1.0 + (12.0 - 1.0) * i / 11.0);
    return p;
  }
};

namespace detail {

inline bool all_converged(const std::vector<double>& test, const std::vector<double>& ref,
                          const Accuracy& acc, double e_max) {
  return count_converged(test, ref, acc, e_max) == static_cast<int>(ref.size());
}

inline std::optional<Grid1D> search_fgh(const PotentialSpec& spec, const std::vector<double>& ref,
                                        const SearchPolicy& pol) {
  const Interval tp = turning_points(spec, pol.e_max);
  const double s = std::sqrt(spec.hbar);
  const int n_ref = static_cast<int>(ref.size());
  for (int n = std::max(2, 2 * n_ref); n <= pol.max_grid; n += 2)
    for (double lo : pol.pad_low)
      for (double hi : pol.pad_high) {
        const double x_min = tp.lo - lo * s;
        const Grid1D grid(x_min, tp.hi + hi * s - x_min, n);
        const RealMatrix h = hamiltonian_fgh(grid, spec);
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(h, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) continue;
        const RealVector& ev = es.eigenvalues();
        const std::vector<double> e(ev.data(), ev.data() + ev.size());
        if (all_converged(e, ref, pol.accuracy, pol.e_max)) return grid;
      }
  return std::nullopt;
}

}  // namespace detail

/// Reference levels below e_max: analytic where known, otherwise FGH on the
/// widest pad box at max_grid points.
inline std::vector<double> efficiency_reference(const PotentialSpec& spec,
                                                const SearchPolicy& pol) {
  try {
    return analytic_levels_below(spec, pol.e_max);
  } catch (const NotAvailable&) {
  }
  const Interval tp = turning_points(spec, pol.e_max);
  const double s = std::sqrt(spec.hbar);
  const double lo = pol.pad_low.empty() ? 2.0 : pol.pad_low.back();
  const double hi = pol.pad_high.empty() ? 12.0 : pol.pad_high.back();
  const Grid1D grid(tp.lo - lo * s, tp.hi - tp.lo + (lo + hi) * s, pol.max_grid);
  const Spectrum sp = solve_fgh(grid, spec, grid.size());
  std::vector<double> out;
  for (double e : sp.energies)
    if (e < pol.e_max) out.push_back(e);
  return out;
}

/// One FGH row and one bvN row per hbar. Exhausted searches become rows with
/// status budget_exceeded instead of aborting the scan.
inline std::vector<EfficiencyPoint> efficiency_scan(const PotentialSpec& base,
                                                    const std::vector<double>& hbars,
                                                    const SearchPolicy& pol) {
  if (base.dimension() != 1) throw ContractViolation("efficiency scan is 1-D only");
  for (std::size_t i = 0; i < hbars.size(); ++i) {
    if (!(hbars[i] > 0.0)) throw ContractViolation("hbar values must be positive");
    if (i > 0 && !(hbars[i] < hbars[i - 1]))
      throw ContractViolation("hbar values must be strictly descending");
  }
  std::vector<EfficiencyPoint> rows;
  for (double hb : hbars) {
    PotentialSpec spec = base;
    spec.hbar = hb;
    const std::vector<double> ref = efficiency_reference(spec, pol);
    const int n_ref = static_cast<int>(ref.size());
    EfficiencyPoint fp{.hbar = hb, .method = BasisLabel::fgh};
    EfficiencyPoint bp{.hbar = hb, .method = BasisLabel::bvn};
    if (n_ref == 0) {
      fp.status = bp.status = "failed: no levels below e_max";
      rows.push_back(fp);
      rows.push_back(bp);
      continue;
    }
    const std::optional<Grid1D> fgh = detail::search_fgh(spec, ref, pol);
    if (!fgh) {
      fp.status = bp.status = "budget_exceeded";
      rows.push_back(fp);
      rows.push_back(bp);
      continue;
    }
    fp.basis_size = fp.grid_size = fgh->size();
    fp.n_converged = n_ref;
    fp.ratio = static_cast<double>(fp.basis_size) / n_ref;
    fp.x_min = fgh->x_min();
    fp.length = fgh->length();
    rows.push_back(fp);

    bp.status = "budget_exceeded";
    const int k0 = static_cast<int>(std::floor(std::sqrt(fgh->size())));
    for (int k = k0; k <= k0 + pol.lattice_steps; ++k) {
      const int shapes[3][2] = {{k, k}, {k, k + 1}, {k + 1, k}};
      for (const auto& sh : shapes) {
        const int n = sh[0] * sh[1];
        if (n % 2 != 0 || n < fgh->size() || n > pol.max_grid) continue;
        const Grid1D grid(fgh->x_min(), fgh->length(), n);
        const VnLattice lat(grid, sh[0], sh[1], hb);
        BasisMatrices bm;
        try {
          bm = build_basis(lat, grid);
        } catch (const IllConditioned&) {
          continue;
        }
        const ComplexMatrix hfull = hermitian_part(
            ComplexMatrix(bm.b.adjoint() * (hamiltonian_fgh(grid, spec).cast<Complex>() * bm.b)));
        const int n_halo = static_cast<int>(std::floor(pol.halo_max / pol.halo_step + 1e-9));
        for (int ih = 0; ih <= n_halo; ++ih) {
          const double halo = ih * pol.halo_step;
          const PruneMask mask = select_cells(lat, spec, {pol.e_max, 0.0, halo});
          const int kept = mask.n_kept();
          if (kept < n_ref) continue;
          if (bp.status == "ok" && kept >= bp.basis_size) break;
          GeneralizedProblem prob{mask_apply(hfull, mask, MaskMode::both),
                                  hermitian_part(mask_apply(bm.s_inv, mask, MaskMode::both)),
                                  BasisLabel::bvn};
          Spectrum sp;
          try {
            sp = solve_generalized(prob, n_ref);
          } catch (const IllConditioned&) {
            continue;
          }
          if (detail::all_converged(sp.energies, ref, pol.accuracy, pol.e_max)) {
            bp.status = "ok";
            bp.basis_size = kept;
            bp.grid_size = n;
            bp.lattice_x = sh[0];
            bp.lattice_p = sh[1];
            bp.halo = halo;
            bp.x_min = fgh->x_min();
            bp.length = fgh->length();
            break;
          }
        }
      }
    }
    if (bp.status == "ok") {
      bp.n_converged = n_ref;
      bp.ratio = static_cast<double>(bp.basis_size) / n_ref;
    }
    rows.push_back(bp);
  }
  return rows;
}

}  // namespace pvn
