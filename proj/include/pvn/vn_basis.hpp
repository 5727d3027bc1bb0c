#pragma once

// Von Neumann lattice of phase-space Gaussians and the periodic (pvN) and
// biorthogonal (bvN) bases built from it on a Fourier grid.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pvn/error.hpp"
#include "pvn/fourier_grid.hpp"
#include "pvn/linalg.hpp"
#include "pvn/potentials.hpp"

namespace pvn {

/// Where Gaussians sit inside their unit cell.
///   cell_center: x_min + a (n + 1/2), -P + dp (l + 1/2)
///   integer:     x_min + a n,         -P + dp l
enum class CenterConvention { cell_center, integer };

inline std::string_view to_string(CenterConvention c) {
  return c == CenterConvention::cell_center ? "cell_center" : "integer";
}

inline CenterConvention center_convention_from_string(std::string_view s) {
  if (s == "cell_center") return CenterConvention::cell_center;
  if (s == "integer") return CenterConvention::integer;
  throw ContractViolation("unknown center convention '" + std::string(s) + "'");
}

/// Nx x Np rectangular lattice covering [x_min, x_min + L] x [-P, P].
/// Flat cell index m = n + Nx * l (position index n runs fastest).
class VnLattice {
 public:
  VnLattice(const Grid1D& grid, int n_x, int n_p, double hbar,
            std::optional<double> alpha = std::nullopt,
            CenterConvention centers = CenterConvention::cell_center)
      : n_x_(n_x), n_p_(n_p), hbar_(hbar), centers_(centers) {
    if (n_x <= 0 || n_p <= 0) throw ContractViolation("lattice dimensions must be positive");
    if (n_x * n_p != grid.size())
      throw ContractViolation("lattice " + std::to_string(n_x) + "x" + std::to_string(n_p) +
                              " does not match grid size " + std::to_string(grid.size()));
    if (!(hbar > 0.0)) throw ContractViolation("hbar must be > 0");
    x_min_ = grid.x_min();
    p_max_ = grid.p_max(hbar);
    a_ = grid.length() / n_x;
    dp_ = 2.0 * p_max_ / n_p;
    alpha_ = alpha.value_or(dp_ / (2.0 * a_ * hbar));
    if (!(alpha_ > 0.0)) throw ContractViolation("Gaussian width alpha must be > 0");
  }

  int n_x() const { return n_x_; }
  int n_p() const { return n_p_; }
  int size() const { return n_x_ * n_p_; }
  double spacing_x() const { return a_; }
  double spacing_p() const { return dp_; }
  double alpha() const { return alpha_; }
  double hbar() const { return hbar_; }
  CenterConvention convention() const { return centers_; }

  /// Position and momentum standard deviations of |g|^2 and its Fourier transform.
  double width_x() const { return 0.5 / std::sqrt(alpha_); }
  double width_p() const { return hbar_ * std::sqrt(alpha_); }

  double center_x(int m) const {
    check(m);
    const double off = centers_ == CenterConvention::cell_center ? 0.5 : 0.0;
    return x_min_ + a_ * ((m % n_x_) + off);
  }
  double center_p(int m) const {
    check(m);
    const double off = centers_ == CenterConvention::cell_center ? 0.5 : 0.0;
    return -p_max_ + dp_ * ((m / n_x_) + off);
  }

 private:
  void check(int m) const {
    if (m < 0 || m >= size())
      throw ContractViolation("cell index " + std::to_string(m) + " out of range");
  }

  int n_x_;
  int n_p_;
  double hbar_;
  CenterConvention centers_;
  double x_min_ = 0.0;
  double p_max_ = 0.0;
  double a_ = 0.0;
  double dp_ = 0.0;
  double alpha_ = 0.0;
};

/// Picks the factorization Nx * Np = N with Nx <= Np closest to square.
inline std::pair<int, int> square_factorization(int n) {
  int best = 1;
  for (int d = 1; d * d <= n; ++d)
    if (n % d == 0) best = d;
  return {best, n / best};
}

/// Coherent state (2a/pi)^(1/4) exp(-a (x - xc)^2 - (i/hbar) pc (x - xc)).
inline Complex gaussian_eval(const VnLattice& lattice, int m, double x) {
  const double xc = lattice.center_x(m);
  const double pc = lattice.center_p(m);
  const double d = x - xc;
  const double amp = std::pow(2.0 * lattice.alpha() / std::numbers::pi, 0.25) *
                     std::exp(-lattice.alpha() * d * d);
  return std::polar(amp, -pc * d / lattice.hbar());
}

/// G_ij = g_j(x_i).
inline ComplexMatrix build_G(const VnLattice& lattice, const Grid1D& grid) {
  if (lattice.size() != grid.size())
    throw ContractViolation("lattice size does not match grid size");
  const int n = grid.size();
  ComplexMatrix g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = gaussian_eval(lattice, j, grid.point(i));
  return g;
}

/// S = G^H G.
inline ComplexMatrix build_overlap(const ComplexMatrix& g) {
  if (g.rows() != g.cols()) throw ContractViolation("G must be square");
  return hermitian_part(ComplexMatrix(g.adjoint() * g));
}

struct OverlapInverse {
  ComplexMatrix s_inv;
  double condition = 1.0;
  int truncated = 0;  // eigen-directions dropped by pseudo-inversion
  std::vector<std::string> warnings;
};

/// S^-1 by Hermitian eigendecomposition. Eigenvalues below
/// rcond * lambda_max are an error unless allow_pseudo_inverse is set, in
/// which case they are dropped with a warning.
inline OverlapInverse invert_overlap(const ComplexMatrix& s, double rcond = 1e-12,
                                     bool allow_pseudo_inverse = false) {
  if (s.rows() != s.cols()) throw ContractViolation("overlap must be square");
  if (!is_hermitian(s, 1e-10)) throw ContractViolation("overlap is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s);
  if (es.info() != Eigen::Success) throw NumericFailure("overlap eigendecomposition failed");
  const RealVector& lam = es.eigenvalues();
  const double lmax = lam.maxCoeff();
  const double lmin = lam.minCoeff();
  OverlapInverse out;
  out.condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  RealVector inv(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    if (lam[k] > rcond * lmax) {
      inv[k] = 1.0 / lam[k];
    } else {
      inv[k] = 0.0;
      ++out.truncated;
    }
  }
  if (out.truncated > 0) {
    if (!allow_pseudo_inverse)
      throw IllConditioned("overlap is numerically singular (cond " +
                               std::to_string(out.condition) + ", " +
                               std::to_string(out.truncated) + " eigenvalues below rcond)",
                           out.condition);
    out.warnings.push_back("overlap pseudo-inverted: dropped " + std::to_string(out.truncated) +
                           " directions, cond " + std::to_string(out.condition));
  }
  const ComplexMatrix& u = es.eigenvectors();
  out.s_inv = hermitian_part(ComplexMatrix(u * inv.cast<Complex>().asDiagonal() * u.adjoint()));
  return out;
}

/// Grid-sampled biorthogonal functions B = G S^-1.
inline ComplexMatrix build_bvn(const ComplexMatrix& g, const ComplexMatrix& s_inv) {
  if (g.cols() != s_inv.rows() || s_inv.rows() != s_inv.cols())
    throw ContractViolation("shape mismatch in build_bvn");
  return g * s_inv;
}

struct BasisOptions {
  double rcond = 1e-12;
  bool allow_pseudo_inverse = false;
};

/// G, S, S^-1 and B for one lattice on one grid.
struct BasisMatrices {
  ComplexMatrix g;
  ComplexMatrix s;
  ComplexMatrix s_inv;
  ComplexMatrix b;
  double cond_s = 1.0;
  std::vector<std::string> warnings;
};

inline BasisMatrices build_basis(const VnLattice& lattice, const Grid1D& grid,
                                 const BasisOptions& opts = {}) {
  BasisMatrices out;
  out.g = build_G(lattice, grid);
  out.s = build_overlap(out.g);
  OverlapInverse inv = invert_overlap(out.s, opts.rcond, opts.allow_pseudo_inverse);
  out.s_inv = std::move(inv.s_inv);
  out.cond_s = inv.condition;
  out.warnings = std::move(inv.warnings);
  out.b = build_bvn(out.g, out.s_inv);
  return out;
}

struct ContinuousVnMatrices {
  ComplexMatrix h;
  ComplexMatrix s;
};

/// H and S of the plain (non-periodic) Gaussians over the whole real line,
/// from closed-form Gaussian integrals. Harmonic potentials only.
inline ContinuousVnMatrices continuous_vn_matrices(const VnLattice& lattice,
                                                   const PotentialSpec& spec) {
  if (spec.kind != PotentialKind::harmonic)
    throw NotAvailable("continuous vN matrices need closed-form integrals; only harmonic "
                       "potentials are supported");
  const int n = lattice.size();
  const double al = lattice.alpha();
  const double hbar = lattice.hbar();
  const double m = spec.mass();
  const double w = spec.param("omega");
  const double norm2 = std::sqrt(2.0 * al / std::numbers::pi);
  const double big_a = 2.0 * al;
  // g_j(x) = c exp(-al x^2 + beta_j x + gamma_j)
  std::vector<Complex> beta(n), gamma(n);
  for (int j = 0; j < n; ++j) {
    const double xc = lattice.center_x(j), pc = lattice.center_p(j);
    beta[j] = Complex(2.0 * al * xc, -pc / hbar);
    gamma[j] = Complex(-al * xc * xc, pc * xc / hbar);
  }
  ContinuousVnMatrices out{ComplexMatrix(n, n), ComplexMatrix(n, n)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Complex b = std::conj(beta[i]) + beta[j];
      const Complex sij = norm2 * std::sqrt(std::numbers::pi / big_a) *
                          std::exp(std::conj(gamma[i]) + gamma[j] + b * b / (4.0 * big_a));
      const Complex mu = b / (2.0 * big_a);
      const Complex x2 = 1.0 / (2.0 * big_a) + mu * mu;
      const Complex slope = beta[j] - 2.0 * al * mu;
      const Complex d2 = slope * slope - al;  // <g_i|g_j''> / S_ij
      out.s(i, j) = sij;
      out.h(i, j) = sij * (-hbar * hbar / (2.0 * m) * d2 + 0.5 * m * w * w * x2);
    }
  out.s = hermitian_part(out.s);
  out.h = hermitian_part(out.h);
  return out;
}

}  // namespace pvn
