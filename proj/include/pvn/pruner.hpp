#pragma once

// Selection of the lattice cells kept in a pruned biorthogonal basis.
//
// A cell is kept when the classical energy p^2/2m + V(x) comes within
// e_cut + margin somewhere inside its halo: the phase-space ellipsoid of
// radius `halo` measured in the cell Gaussian's own widths (sigma_x, sigma_p)
// around the cell center. halo = 0 tests the center point only.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "pvn/error.hpp"
#include "pvn/linalg.hpp"
#include "pvn/potentials.hpp"
#include "pvn/vn_basis.hpp"

namespace pvn {

struct PruneRule {
  double e_cut = std::numeric_limits<double>::infinity();
  double margin = 0.0;
  double halo = 0.0;
};

/// Kept flags over the flat cell index. In 2-D the flat index is
/// cx + n_cells_x * cy, where cx and cy are the 1-D lattice cell indices.
struct PruneMask {
  std::vector<char> kept;

  int size() const { return static_cast<int>(kept.size()); }
  int n_kept() const { return static_cast<int>(std::count(kept.begin(), kept.end(), 1)); }
  std::vector<int> indices() const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
      if (kept[i]) out.push_back(i);
    return out;
  }
  static PruneMask all(int n) { return {std::vector<char>(n, 1)}; }
};

namespace detail {

constexpr int kHaloAngles = 64;
constexpr int kHaloRadii = 12;
constexpr int kHaloSplits = 24;

/// min V over the position ball of (scaled) radius r around the center:
/// sampled, then refined by golden section around the best sample.
inline double min_potential_1d(const PotentialSpec& spec, double xc, double sx, double r) {
  double best = evaluate(spec, xc);
  if (r <= 0.0) return best;
  const int steps = 4 * kHaloRadii;
  const double h = r * sx / steps;
  int arg = 0;
  for (int k = -steps; k <= steps; ++k) {
    const double v = evaluate(spec, xc + k * h);
    if (v < best) best = v, arg = k;
  }
  double lo = xc + std::max(arg - 1, -steps) * h, hi = xc + std::min(arg + 1, steps) * h;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = evaluate(spec, c), fd = evaluate(spec, d);
  for (int it = 0; it < 60; ++it) {
    if (fc < fd) {
      hi = d, d = c, fd = fc;
      c = hi - g * (hi - lo), fc = evaluate(spec, c);
    } else {
      lo = c, c = d, fc = fd;
      d = lo + g * (hi - lo), fd = evaluate(spec, d);
    }
  }
  return std::min({best, fc, fd});
}

inline double min_potential_2d(const PotentialSpec& spec, double xc, double yc, double sx,
                               double sy, double r) {
  double best = evaluate(spec, xc, yc);
  if (r <= 0.0) return best;
  for (int k = 1; k <= kHaloRadii; ++k) {
    const double u = r * k / kHaloRadii;
    for (int t = 0; t < kHaloAngles; ++t) {
      const double th = 2.0 * std::numbers::pi * t / kHaloAngles;
      best = std::min(best, evaluate(spec, xc + u * sx * std::cos(th), yc + u * sy * std::sin(th)));
    }
  }
  return best;
}

/// min p^2 / 2m over |p - pc| <= r sigma_p.
inline double min_kinetic_1d(double pc, double sp, double r, double mass) {
  const double p = std::max(0.0, std::abs(pc) - r * sp);
  return p * p / (2.0 * mass);
}

/// min (px^2 + py^2) / 2m over the scaled momentum ellipse.
inline double min_kinetic_2d(double px, double py, double spx, double spy, double r,
                             double mass) {
  double best = (px * px + py * py) / (2.0 * mass);
  if (r <= 0.0) return best;
  for (int k = 1; k <= kHaloRadii; ++k) {
    const double u = r * k / kHaloRadii;
    for (int t = 0; t < kHaloAngles; ++t) {
      const double th = 2.0 * std::numbers::pi * t / kHaloAngles;
      const double a = px + u * spx * std::cos(th);
      const double b = py + u * spy * std::sin(th);
      best = std::min(best, (a * a + b * b) / (2.0 * mass));
    }
  }
  // the unconstrained minimum p = 0 when it lies inside the ellipse
  const double q = (px / spx) * (px / spx) + (py / spy) * (py / spy);
  if (q <= r * r) best = 0.0;
  return best;
}

}  // namespace detail

/// Lowest classical energy inside each cell's halo (1-D lattice).
inline std::vector<double> halo_energies(const VnLattice& lattice, const PotentialSpec& spec,
                                         double halo) {
  if (spec.dimension() != 1) throw ContractViolation("1-D lattice used with a 2-D potential");
  const double m = spec.mass();
  const double sx = lattice.width_x(), sp = lattice.width_p();
  std::vector<double> out(lattice.size());
  // position part depends on the x column only
  std::vector<std::vector<double>> vcache(lattice.n_x());
  for (int n = 0; n < lattice.n_x(); ++n) {
    vcache[n].resize(detail::kHaloSplits + 1);
    for (int k = 0; k <= detail::kHaloSplits; ++k)
      vcache[n][k] = detail::min_potential_1d(spec, lattice.center_x(n), sx,
                                              halo * k / detail::kHaloSplits);
  }
  for (int c = 0; c < lattice.size(); ++c) {
    const int n = c % lattice.n_x();
    const double pc = lattice.center_p(c);
    if (halo <= 0.0) {
      out[c] = vcache[n][0] + pc * pc / (2.0 * m);
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= detail::kHaloSplits; ++k) {
      const double rx = halo * k / detail::kHaloSplits;
      const double rp = std::sqrt(std::max(0.0, halo * halo - rx * rx));
      best = std::min(best, vcache[n][k] + detail::min_kinetic_1d(pc, sp, rp, m));
    }
    out[c] = best;
  }
  return out;
}

/// Lowest classical energy inside each 4-D cell halo of a tensor-product lattice.
inline std::vector<double> halo_energies(const VnLattice& lx, const VnLattice& ly,
                                         const PotentialSpec& spec, double halo) {
  if (spec.dimension() != 2) throw ContractViolation("2-D lattices used with a 1-D potential");
  const double m = spec.mass();
  const int ns = detail::kHaloSplits;
  // position part: (x column, y column) -> f(r) samples
  const int nxc = lx.n_x(), nyc = ly.n_x();
  std::vector<double> vpos(static_cast<std::size_t>(nxc) * nyc * (ns + 1));
  for (int j = 0; j < nyc; ++j)
    for (int i = 0; i < nxc; ++i)
      for (int k = 0; k <= ns; ++k)
        vpos[(static_cast<std::size_t>(j) * nxc + i) * (ns + 1) + k] = detail::min_potential_2d(
            spec, lx.center_x(i), ly.center_x(j), lx.width_x(), ly.width_x(), halo * k / ns);
  // momentum part: (x row, y row) -> f at the complementary radius of split k
  const int npx = lx.n_p(), npy = ly.n_p();
  std::vector<double> kmom(static_cast<std::size_t>(npx) * npy * (ns + 1));
  for (int j = 0; j < npy; ++j)
    for (int i = 0; i < npx; ++i)
      for (int k = 0; k <= ns; ++k) {
        const double rx = halo * k / ns;
        const double rp = std::sqrt(std::max(0.0, halo * halo - rx * rx));
        kmom[(static_cast<std::size_t>(j) * npx + i) * (ns + 1) + k] = detail::min_kinetic_2d(
            lx.center_p(i * nxc), ly.center_p(j * nyc), lx.width_p(), ly.width_p(), rp, m);
      }
  std::vector<double> out(static_cast<std::size_t>(lx.size()) * ly.size());
  for (int cy = 0; cy < ly.size(); ++cy)
    for (int cx = 0; cx < lx.size(); ++cx) {
      const std::size_t pos = (static_cast<std::size_t>(cy % nyc) * nxc + cx % nxc) * (ns + 1);
      const std::size_t mom = (static_cast<std::size_t>(cy / nyc) * npx + cx / nxc) * (ns + 1);
      double best = std::numeric_limits<double>::infinity();
      const int kmax = halo > 0.0 ? ns : 0;
      for (int k = 0; k <= kmax; ++k) best = std::min(best, vpos[pos + k] + kmom[mom + k]);
      out[static_cast<std::size_t>(cx) + static_cast<std::size_t>(lx.size()) * cy] = best;
    }
  return out;
}

/// Classical energy at each 1-D cell center.
inline std::vector<double> center_energies(const VnLattice& lattice, const PotentialSpec& spec) {
  return halo_energies(lattice, spec, 0.0);
}

inline std::vector<double> center_energies(const VnLattice& lx, const VnLattice& ly,
                                           const PotentialSpec& spec) {
  return halo_energies(lx, ly, spec, 0.0);
}

inline PruneMask mask_from_energies(const std::vector<double>& energies, const PruneRule& rule) {
  if (std::isnan(rule.e_cut) || std::isnan(rule.margin))
    throw ContractViolation("prune e_cut and margin must be numbers");
  PruneMask mask;
  mask.kept.resize(energies.size());
  const double limit = rule.e_cut + rule.margin;
  for (std::size_t i = 0; i < energies.size(); ++i) mask.kept[i] = energies[i] <= limit ? 1 : 0;
  return mask;
}

inline PruneMask select_cells(const VnLattice& lattice, const PotentialSpec& spec,
                              const PruneRule& rule) {
  return mask_from_energies(halo_energies(lattice, spec, rule.halo), rule);
}

inline PruneMask select_cells(const VnLattice& lx, const VnLattice& ly, const PotentialSpec& spec,
                              const PruneRule& rule) {
  return mask_from_energies(halo_energies(lx, ly, spec, rule.halo), rule);
}

/// One-cell energy scale: max over boundary cells (kept cells with a dropped
/// x or p neighbour under the strict center rule) of
/// |dH/dx| a / 2 + |dH/dp| dp / 2. Gradients by central differences.
inline double auto_margin(const VnLattice& lattice, const PotentialSpec& spec, double e_cut) {
  const std::vector<double> h = center_energies(lattice, spec);
  const double a = lattice.spacing_x(), dp = lattice.spacing_p(), m = spec.mass();
  const int nx = lattice.n_x(), np = lattice.n_p();
  double out = 0.0;
  for (int l = 0; l < np; ++l)
    for (int n = 0; n < nx; ++n) {
      const int c = n + nx * l;
      if (!(h[c] <= e_cut)) continue;
      bool boundary = false;
      const int nb[4][2] = {{n - 1, l}, {n + 1, l}, {n, l - 1}, {n, l + 1}};
      for (auto& q : nb)
        if (q[0] >= 0 && q[0] < nx && q[1] >= 0 && q[1] < np && !(h[q[0] + nx * q[1]] <= e_cut))
          boundary = true;
      if (!boundary) continue;
      const double xc = lattice.center_x(c), pc = lattice.center_p(c);
      const double eps = 1e-5 * std::max(1.0, std::abs(xc));
      const double dv = (evaluate(spec, xc + eps) - evaluate(spec, xc - eps)) / (2.0 * eps);
      out = std::max(out, std::abs(dv) * a / 2.0 + std::abs(pc / m) * dp / 2.0);
    }
  return out;
}

enum class MaskMode { columns, both };

/// Keeps the selected columns (columns) or the principal submatrix (both).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> mask_apply(
    const Eigen::MatrixBase<Derived>& m, const PruneMask& mask, MaskMode mode) {
  if (m.cols() != mask.size() || (mode == MaskMode::both && m.rows() != mask.size()))
    throw ContractViolation("mask length " + std::to_string(mask.size()) +
                            " does not match matrix dimension");
  const std::vector<int> idx = mask.indices();
  const Eigen::Index k = static_cast<Eigen::Index>(idx.size());
  if (mode == MaskMode::columns) {
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(m.rows(), k);
    for (Eigen::Index j = 0; j < k; ++j) out.col(j) = m.col(idx[j]);
    return out;
  }
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(k, k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < k; ++i) out(i, j) = m(idx[i], idx[j]);
  return out;
}

}  // namespace pvn
