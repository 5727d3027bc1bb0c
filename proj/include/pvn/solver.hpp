#pragma once

// Generalized eigenproblems H U = s U E in the pvN and bvN bases.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pvn/error.hpp"
#include "pvn/fourier_grid.hpp"
#include "pvn/linalg.hpp"
#include "pvn/pruner.hpp"
#include "pvn/spectrum.hpp"
#include "pvn/vn_basis.hpp"

namespace pvn {

struct GeneralizedProblem {
  ComplexMatrix h;
  ComplexMatrix s;  // metric
  BasisLabel basis = BasisLabel::pvn;
  int size() const { return static_cast<int>(h.rows()); }
};

/// H = G^H H_fgh G, s = G^H G.
inline GeneralizedProblem assemble_pvn(const RealMatrix& h_fgh, const ComplexMatrix& g) {
  if (h_fgh.rows() != g.rows() || h_fgh.cols() != g.rows())
    throw ContractViolation("assemble_pvn: H_fgh and G shapes disagree");
  GeneralizedProblem p;
  p.h = hermitian_part(ComplexMatrix(g.adjoint() * (h_fgh.cast<Complex>() * g)));
  p.s = build_overlap(g);
  p.basis = BasisLabel::pvn;
  return p;
}

/// H = B_k^H H_fgh B_k, s = (S^-1)_kk for the kept columns k.
inline GeneralizedProblem assemble_bvn(const RealMatrix& h_fgh, const ComplexMatrix& b,
                                       const ComplexMatrix& s_inv, const PruneMask& mask) {
  if (mask.size() != b.cols() || s_inv.rows() != b.cols() || h_fgh.rows() != b.rows())
    throw ContractViolation("assemble_bvn: shapes disagree with mask length");
  const ComplexMatrix bk = mask_apply(b, mask, MaskMode::columns);
  GeneralizedProblem p;
  p.h = hermitian_part(ComplexMatrix(bk.adjoint() * (h_fgh.cast<Complex>() * bk)));
  p.s = hermitian_part(mask_apply(s_inv, mask, MaskMode::both));
  p.basis = BasisLabel::bvn;
  return p;
}

namespace detail {

/// Kept columns f = a_y(:, cy) (x) a_x(:, cx) of a tensor-product basis with
/// metric m_y (x) m_x. H is applied through its Kronecker structure.
inline GeneralizedProblem assemble_tensor(const KroneckerHamiltonian& h, const ComplexMatrix& ax,
                                          const ComplexMatrix& ay, const ComplexMatrix& mx,
                                          const ComplexMatrix& my, const PruneMask& mask,
                                          BasisLabel label) {
  const Eigen::Index ncx = ax.cols(), ncy = ay.cols();
  if (mask.size() != ncx * ncy || h.size() != ax.rows() * ay.rows())
    throw ContractViolation("2-D assembly: shapes disagree with mask length");
  const std::vector<int> idx = mask.indices();
  const Eigen::Index k = static_cast<Eigen::Index>(idx.size());
  const Eigen::Index nx = ax.rows(), ny = ay.rows();
  ComplexMatrix fk(nx * ny, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::Index cx = idx[c] % ncx, cy = idx[c] / ncx;
    Eigen::Map<ComplexMatrix> col(fk.col(c).data(), nx, ny);
    col.noalias() = ax.col(cx) * ay.col(cy).transpose();
  }
  const ComplexMatrix hfk = h.apply_columns(fk);
  GeneralizedProblem p;
  p.h = hermitian_part(ComplexMatrix(fk.adjoint() * hfk));
  p.s.resize(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index jx = idx[j] % ncx, jy = idx[j] / ncx;
    for (Eigen::Index i = 0; i < k; ++i) {
      const Eigen::Index ix = idx[i] % ncx, iy = idx[i] / ncx;
      p.s(i, j) = mx(ix, jx) * my(iy, jy);
    }
  }
  p.s = hermitian_part(p.s);
  p.basis = label;
  return p;
}

}  // namespace detail

/// 2-D bvN problem with B = B_y (x) B_x and S^-1 = S_y^-1 (x) S_x^-1 (x
/// fastest). Only kept columns of B are formed.
inline GeneralizedProblem assemble_bvn(const KroneckerHamiltonian& h, const BasisMatrices& bx,
                                       const BasisMatrices& by, const PruneMask& mask) {
  return detail::assemble_tensor(h, bx.b, by.b, bx.s_inv, by.s_inv, mask, BasisLabel::bvn);
}

/// 2-D pvN problem with G = G_y (x) G_x and S = S_y (x) S_x.
inline GeneralizedProblem assemble_pvn(const KroneckerHamiltonian& h, const BasisMatrices& bx,
                                       const BasisMatrices& by) {
  return detail::assemble_tensor(h, bx.g, by.g, bx.s, by.s,
                                 PruneMask::all(static_cast<int>(bx.g.cols() * by.g.cols())),
                                 BasisLabel::pvn);
}

struct SolveOptions {
  bool want_vectors = false;
  /// metric eigenvalues below rcond * lambda_max are dropped in spectral mode
  double rcond = 1e-12;
  /// Cholesky reduction below this metric condition, spectral reduction above
  double spectral_switch = 1e8;
  double hermitian_tol = 1e-10;
};

namespace detail {

inline Spectrum finish_standard(const ComplexMatrix& a, const ComplexMatrix* back, int n_states,
                                bool want_vectors, BasisLabel label) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
      hermitian_part(a), want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericFailure("Hermitian eigensolver did not converge (size " +
                         std::to_string(a.rows()) + ")");
  Spectrum out;
  out.basis = label;
  const int n = std::min<int>(n_states, static_cast<int>(a.rows()));
  out.energies.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  if (want_vectors) out.eigenvectors = (*back) * es.eigenvectors().leftCols(n);
  return out;
}

}  // namespace detail

/// Ascending eigenvalues of the Hermitian-definite pencil (H, s).
///
/// The metric is reduced by Cholesky when it is well conditioned, otherwise by
/// its eigendecomposition with directions below rcond * lambda_max removed;
/// the number removed is reported in Spectrum::truncated. A metric with a
/// negative eigenvalue beyond rounding is an IllConditioned error.
inline Spectrum solve_generalized(const GeneralizedProblem& prob, int n_states,
                                  const SolveOptions& opts = {}) {
  const int n = prob.size();
  if (prob.s.rows() != n || prob.s.cols() != n || prob.h.cols() != n)
    throw ContractViolation("pencil matrices have different shapes");
  if (n_states < 0 || n_states > n)
    throw ContractViolation("requested " + std::to_string(n_states) + " states from a basis of " +
                            std::to_string(n));
  if (hermiticity_defect(prob.h) > opts.hermitian_tol)
    throw ContractViolation("H is not Hermitian (defect " +
                            std::to_string(hermiticity_defect(prob.h)) + ")");
  if (hermiticity_defect(prob.s) > opts.hermitian_tol)
    throw ContractViolation("metric is not Hermitian");

  Eigen::LLT<ComplexMatrix> llt(prob.s);
  if (llt.info() == Eigen::Success) {
    const RealVector d = llt.matrixL().toDenseMatrix().diagonal().real();
    const double est = std::pow(d.maxCoeff() / d.minCoeff(), 2);
    if (est <= opts.spectral_switch) {
      // L^-1 H L^-H
      ComplexMatrix a = llt.matrixL().solve(prob.h);
      a = llt.matrixL().solve(ComplexMatrix(a.adjoint()));
      ComplexMatrix back;
      if (opts.want_vectors)
        back = llt.matrixU().solve(ComplexMatrix::Identity(n, n));
      Spectrum out = detail::finish_standard(a, &back, n_states, opts.want_vectors, prob.basis);
      out.basis_size = n;
      out.metric_condition = est;
      return out;
    }
  }

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> ms(prob.s);
  if (ms.info() != Eigen::Success) throw NumericFailure("metric eigendecomposition failed");
  const RealVector& lam = ms.eigenvalues();
  const double lmax = lam.maxCoeff();
  if (!(lmax > 0.0)) throw IllConditioned("metric has no positive eigenvalues", 0.0);
  if (lam.minCoeff() < -1e-10 * lmax)
    throw IllConditioned("metric is indefinite (lambda_min = " + std::to_string(lam.minCoeff()) +
                             ")",
                         std::numeric_limits<double>::infinity());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < lam.size(); ++k)
    if (lam[k] > opts.rcond * lmax) keep.push_back(k);
  const Eigen::Index r = static_cast<Eigen::Index>(keep.size());
  if (r < n_states)
    throw IllConditioned("metric rank " + std::to_string(r) + " below requested states",
                         lmax / std::max(lam.minCoeff(), 1e-300));
  ComplexMatrix x(n, r);
  for (Eigen::Index j = 0; j < r; ++j)
    x.col(j) = ms.eigenvectors().col(keep[j]) / std::sqrt(lam[keep[j]]);
  const ComplexMatrix a = x.adjoint() * prob.h * x;
  Spectrum out = detail::finish_standard(a, &x, n_states, opts.want_vectors, prob.basis);
  out.basis_size = n;
  out.metric_condition = lmax / lam[keep.front()];
  out.truncated = static_cast<int>(n - r);
  return out;
}

/// How agreement to `digits` is judged.
///   absolute: |dE| <= 0.5 * 10^-digits
///   relative: |dE| <= 10^-digits * |E_ref|   (significant digits)
enum class AccuracyMode { absolute, relative };

struct Accuracy {
  int digits = 4;
  AccuracyMode mode = AccuracyMode::absolute;

  double tolerance(double reference) const {
    return mode == AccuracyMode::absolute ? 0.5 * std::pow(10.0, -digits)
                                          : std::pow(10.0, -digits) * std::abs(reference);
  }
  bool agrees(double test, double reference) const {
    return std::abs(test - reference) <= tolerance(reference);
  }
};

inline std::string_view to_string(AccuracyMode m) {
  return m == AccuracyMode::absolute ? "absolute" : "relative";
}

inline AccuracyMode accuracy_mode_from_string(std::string_view s) {
  if (s == "absolute") return AccuracyMode::absolute;
  if (s == "relative") return AccuracyMode::relative;
  throw ContractViolation("unknown accuracy mode '" + std::string(s) + "'");
}

/// Number of reference levels below e_max whose index-matched test level
/// agrees to the requested accuracy. Reference levels without a test partner
/// count as failures.
inline int count_converged(const std::vector<double>& test, const std::vector<double>& reference,
                           const Accuracy& acc, double e_max) {
  if (!std::is_sorted(reference.begin(), reference.end()))
    throw ContractViolation("reference levels must be sorted ascending");
  int count = 0;
  for (std::size_t i = 0; i < reference.size() && reference[i] < e_max; ++i)
    if (i < test.size() && acc.agrees(test[i], reference[i])) ++count;
  return count;
}

inline int count_converged(const Spectrum& test, const std::vector<double>& reference,
                           const Accuracy& acc, double e_max) {
  return count_converged(test.energies, reference, acc, e_max);
}

/// Largest |E_test - E_ref| over the first n index-matched levels.
inline double max_abs_error(const std::vector<double>& test, const std::vector<double>& ref,
                            std::size_t n) {
  if (test.size() < n || ref.size() < n) return std::numeric_limits<double>::infinity();
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(test[i] - ref[i]));
  return e;
}

inline double max_rel_error(const std::vector<double>& test, const std::vector<double>& ref,
                            std::size_t n) {
  if (test.size() < n || ref.size() < n) return std::numeric_limits<double>::infinity();
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(test[i] - ref[i]) / std::abs(ref[i]));
  return e;
}

}  // namespace pvn
