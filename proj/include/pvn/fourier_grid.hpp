#pragma once

// Periodic Fourier grid (sinc DVR): grids, the periodic sinc basis, and the
// FGH kinetic, potential and Hamiltonian matrices.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "pvn/error.hpp"
#include "pvn/linalg.hpp"
#include "pvn/potentials.hpp"
#include "pvn/spectrum.hpp"

namespace pvn {

/// Uniform periodic grid x_n = x_min + n * dx, n = 0..N-1, dx = L / N.
/// N must be even.
class Grid1D {
 public:
  Grid1D(double x_min, double length, int n) : x_min_(x_min), length_(length), n_(n) {
    if (!(length > 0.0) || !std::isfinite(length))
      throw ContractViolation("grid length must be > 0");
    if (n <= 0 || n % 2 != 0)
      throw ContractViolation("grid size must be a positive even integer, got " +
                              std::to_string(n));
  }

  double x_min() const { return x_min_; }
  double length() const { return length_; }
  int size() const { return n_; }
  double spacing() const { return length_ / n_; }
  double point(int i) const { return x_min_ + spacing() * i; }

  RealVector points() const {
    RealVector x(n_);
    for (int i = 0; i < n_; ++i) x[i] = point(i);
    return x;
  }

  /// Wavenumber half-extent K = pi / dx.
  double k_max() const { return std::numbers::pi / spacing(); }
  /// Momentum half-extent P = pi hbar / dx.
  double p_max(double hbar) const { return hbar * k_max(); }
  /// 2 L P; equals N h.
  double phase_space_area(double hbar) const { return 2.0 * length_ * p_max(hbar); }

  /// Maps x into [x_min, x_min + L).
  double wrap(double x) const {
    double t = std::fmod(x - x_min_, length_);
    if (t < 0.0) t += length_;
    return x_min_ + t;
  }

 private:
  double x_min_;
  double length_;
  int n_;
};

/// Tensor-product grid; flat index = ix + nx * iy (x runs fastest).
struct Grid2D {
  Grid1D gx;
  Grid1D gy;

  int size() const { return gx.size() * gy.size(); }
  int flat(int ix, int iy) const { return ix + gx.size() * iy; }
  std::pair<int, int> unflat(int k) const { return {k % gx.size(), k / gx.size()}; }
};

/// Periodic sinc function theta_n(x) in Dirichlet closed form,
/// exp(iA/2) sin(NA/2) / (sqrt(LN) sin(A/2)) with A = 2 pi (x - x_n) / L.
/// At x = x_n the value is sqrt(N / L).
inline Complex theta_eval(const Grid1D& grid, int n, double x) {
  if (n < 0 || n >= grid.size())
    throw ContractViolation("theta index " + std::to_string(n) + " out of range");
  const double len = grid.length();
  const double big_n = grid.size();
  // the closed form has period L in x for even N, so reduce to A in [-pi, pi]
  double shifted = grid.wrap(x) - grid.point(n);
  if (shifted > 0.5 * len) shifted -= len;
  if (shifted < -0.5 * len) shifted += len;
  const double a = 2.0 * std::numbers::pi * shifted / len;
  const double norm = 1.0 / std::sqrt(len * big_n);
  const Complex phase = std::polar(1.0, 0.5 * a);
  const double s = std::sin(0.5 * a);
  double dirichlet;
  if (std::abs(a) < 1e-7) {
    dirichlet = big_n * (1.0 - (big_n * big_n - 1.0) * a * a / 24.0);
  } else {
    dirichlet = std::sin(0.5 * big_n * a) / s;
  }
  return phase * (norm * dirichlet);
}

/// FGH kinetic matrix on a periodic grid.
inline RealMatrix kinetic_matrix(const Grid1D& grid, double mass, double hbar) {
  if (!(mass > 0.0)) throw ContractViolation("mass must be > 0");
  const int n = grid.size();
  const double k = grid.k_max();
  const double pref = hbar * hbar / (2.0 * mass);
  const double nn = static_cast<double>(n) * n;
  RealMatrix t(n, n);
  for (int i = 0; i < n; ++i) {
    t(i, i) = pref * k * k / 3.0 * (1.0 + 2.0 / nn);
    for (int j = i + 1; j < n; ++j) {
      const int d = j - i;
      const double s = std::sin(std::numbers::pi * d / n);
      const double sign = (d % 2 == 0) ? 1.0 : -1.0;
      t(i, j) = t(j, i) = pref * 2.0 * k * k / nn * sign / (s * s);
    }
  }
  return t;
}

namespace detail {
inline void check_finite_potential(double v, double x) {
  if (!std::isfinite(v))
    throw SingularPoint("potential is not finite at grid point x = " + std::to_string(x) +
                        "; offset the grid away from the singularity");
}
}  // namespace detail

/// Diagonal V(x_i) of the DVR potential matrix.
inline RealVector potential_matrix(const Grid1D& grid, const PotentialSpec& spec) {
  if (spec.dimension() != 1)
    throw ContractViolation("1-D grid used with a " + std::to_string(spec.dimension()) +
                            "-D potential");
  RealVector v(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    v[i] = evaluate(spec, grid.point(i));
    detail::check_finite_potential(v[i], grid.point(i));
  }
  return v;
}

inline RealVector potential_matrix(const Grid2D& grid, const PotentialSpec& spec) {
  if (spec.dimension() != 2)
    throw ContractViolation("2-D grid used with a 1-D potential");
  RealVector v(grid.size());
  for (int iy = 0; iy < grid.gy.size(); ++iy)
    for (int ix = 0; ix < grid.gx.size(); ++ix) {
      const double val = evaluate(spec, grid.gx.point(ix), grid.gy.point(iy));
      detail::check_finite_potential(val, grid.gx.point(ix));
      v[grid.flat(ix, iy)] = val;
    }
  return v;
}

inline RealMatrix hamiltonian_fgh(const Grid1D& grid, const PotentialSpec& spec) {
  RealMatrix h = kinetic_matrix(grid, spec.mass(), spec.hbar);
  h.diagonal() += potential_matrix(grid, spec);
  return h;
}

/// H = I (x) Tx + Ty (x) I + V on a 2-D grid, applied without forming the
/// N^2 x N^2 matrix. A vector is viewed as an nx-by-ny column-major array.
class KroneckerHamiltonian {
 public:
  KroneckerHamiltonian(const Grid2D& grid, const PotentialSpec& spec)
      : nx_(grid.gx.size()),
        ny_(grid.gy.size()),
        tx_(kinetic_matrix(grid.gx, spec.mass(), spec.hbar)),
        ty_(kinetic_matrix(grid.gy, spec.mass(), spec.hbar)),
        v_(potential_matrix(grid, spec)) {}

  int size() const { return nx_ * ny_; }
  const RealMatrix& tx() const { return tx_; }
  const RealMatrix& ty() const { return ty_; }
  const RealVector& potential() const { return v_; }

  template <typename Scalar>
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply(
      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& in) const {
    if (in.size() != size()) throw ContractViolation("vector length mismatch in H apply");
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Eigen::Map<const Mat> x(in.data(), nx_, ny_);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(size());
    Eigen::Map<Mat> y(out.data(), nx_, ny_);
    y.noalias() = tx_.template cast<Scalar>() * x;
    y.noalias() += x * ty_.template cast<Scalar>();  // Ty symmetric
    out.array() += v_.array().template cast<Scalar>() * in.array();
    return out;
  }

  /// Applies H to every column of a block.
  ComplexMatrix apply_columns(const ComplexMatrix& in) const {
    if (in.rows() != size()) throw ContractViolation("block row count mismatch in H apply");
    const ComplexMatrix txc = tx_.cast<Complex>();
    const ComplexMatrix tyc = ty_.cast<Complex>();
    ComplexMatrix out(in.rows(), in.cols());
    for (Eigen::Index c = 0; c < in.cols(); ++c) {
      Eigen::Map<const ComplexMatrix> x(in.col(c).data(), nx_, ny_);
      Eigen::Map<ComplexMatrix> y(out.col(c).data(), nx_, ny_);
      y.noalias() = txc * x;
      y.noalias() += x * tyc;
      out.col(c).array() += v_.array().cast<Complex>() * in.col(c).array();
    }
    return out;
  }

  RealMatrix dense() const {
    RealMatrix h = kron(RealMatrix::Identity(ny_, ny_), tx_) +
                   kron(ty_, RealMatrix::Identity(nx_, nx_));
    h.diagonal() += v_;
    return h;
  }

 private:
  int nx_;
  int ny_;
  RealMatrix tx_;
  RealMatrix ty_;
  RealVector v_;
};

/// Dense 2-D FGH Hamiltonian. Use KroneckerHamiltonian for large grids.
inline RealMatrix hamiltonian_fgh(const Grid2D& grid, const PotentialSpec& spec) {
  return KroneckerHamiltonian(grid, spec).dense();
}

/// Lowest eigenvalues of a real symmetric matrix.
inline Spectrum solve_symmetric(const RealMatrix& h, int n_states, bool want_vectors,
                                BasisLabel label) {
  if (n_states < 0 || n_states > h.rows())
    throw ContractViolation("requested " + std::to_string(n_states) + " states from a basis of " +
                            std::to_string(h.rows()));
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(
      h, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericFailure("symmetric eigensolver did not converge (size " +
                         std::to_string(h.rows()) + ")");
  Spectrum out;
  out.basis = label;
  out.basis_size = static_cast<int>(h.rows());
  out.energies.assign(es.eigenvalues().data(), es.eigenvalues().data() + n_states);
  if (want_vectors) out.eigenvectors = es.eigenvectors().leftCols(n_states).cast<Complex>();
  return out;
}

inline Spectrum solve_fgh(const Grid1D& grid, const PotentialSpec& spec, int n_states,
                          bool want_vectors = false) {
  return solve_symmetric(hamiltonian_fgh(grid, spec), n_states, want_vectors, BasisLabel::fgh);
}

inline Spectrum solve_fgh(const Grid2D& grid, const PotentialSpec& spec, int n_states,
                          bool want_vectors = false) {
  return solve_symmetric(hamiltonian_fgh(grid, spec), n_states, want_vectors, BasisLabel::fgh);
}

}  // namespace pvn
