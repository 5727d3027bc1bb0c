// Acceptance suite. `acceptance N` runs criterion N, `acceptance` runs all.
// Each criterion prints one PASS/FAIL line; the exit status is nonzero if
// any selected criterion fails.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "pvn/pvn.hpp"

using namespace pvn;

namespace {

// ---------------------------------------------------------------------------
// Test-side oracles. None of these call the library's numerical kernels.

/// Periodic kinetic matrix as an explicit plane-wave sum with the two Nyquist
/// modes at half weight.
Eigen::MatrixXd oracle_kinetic(double length, int n, double mass, double hbar) {
  const double dx = length / n;
  Eigen::MatrixXd t(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int q = -n / 2; q <= n / 2; ++q) {
        const double k = 2.0 * std::numbers::pi * q / length;
        const double w = (q == -n / 2 || q == n / 2) ? 0.5 : 1.0;
        s += w * hbar * hbar * k * k / (2.0 * mass) * std::cos(k * (i - j) * dx);
      }
      t(i, j) = s / n;
    }
  return t;
}

std::vector<double> oracle_fgh_1d(double x_min, double length, int n, double mass, double hbar,
                                  const std::function<double(double)>& v) {
  Eigen::MatrixXd h = oracle_kinetic(length, n, mass, hbar);
  for (int i = 0; i < n; ++i) h(i, i) += v(x_min + i * length / n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + n};
}

std::vector<double> oracle_fgh_2d(double x_min, double lx, int nx, double y_min, double ly,
                                  int ny, double mass, double hbar,
                                  const std::function<double(double, double)>& v) {
  const Eigen::MatrixXd tx = oracle_kinetic(lx, nx, mass, hbar);
  const Eigen::MatrixXd ty = oracle_kinetic(ly, ny, mass, hbar);
  const int n = nx * ny;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const int r = ix + nx * iy;
      for (int jx = 0; jx < nx; ++jx) h(r, jx + nx * iy) += tx(ix, jx);
      for (int jy = 0; jy < ny; ++jy) h(r, ix + nx * jy) += ty(iy, jy);
      h(r, r) += v(x_min + ix * lx / nx, y_min + iy * ly / ny);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + n};
}

/// Bound Morse levels for V = D (1 - exp(-beta x))^2.
std::vector<double> oracle_morse_levels(double depth, double beta, double mass, double hbar) {
  const double w = beta * std::sqrt(2.0 * depth / mass);
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double q = hbar * w * (k + 0.5);
    const double e = q - q * q / (4.0 * depth);
    if (e >= depth || (!out.empty() && e <= out.back())) break;
    out.push_back(e);
  }
  return out;
}

/// Closed phase-space area of the Morse orbit at energy E.
double oracle_morse_area(double depth, double beta, double mass, double e) {
  return 2.0 * std::numbers::pi * std::sqrt(2.0 * mass) / beta *
         (std::sqrt(depth) - std::sqrt(depth - e));
}

/// Number of D-tuples of non-negative integers with sum <= g.
long long oracle_tuples(int g, int d) {
  if (d == 0) return 1;
  long long s = 0;
  for (int k = 0; k <= g; ++k) s += oracle_tuples(g - k, d - 1);
  return s;
}

double oracle_factorial(int d) {
  double f = 1.0;
  for (int i = 2; i <= d; ++i) f *= i;
  return f;
}

// ---------------------------------------------------------------------------

struct Verdict {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [FAILED]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double balanced_half_width(int n, double mass, double omega, double hbar) {
  return std::sqrt(std::numbers::pi * hbar * n / (2.0 * mass * omega));
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]) / std::abs(b[i]));
  return m;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

constexpr double kMorseDepth = 12.0, kMorseBeta = 0.5, kMorseMass = 6.0;

// 1. pvN generalized eigenvalues equal the FGH eigenvalues.
Verdict criterion_1() {
  Verdict v;
  const PotentialSpec spec = harmonic();
  for (int n : {8, 16, 32}) {
    const double xh = balanced_half_width(n, 1.0, 1.0, 1.0);
    const Grid1D grid(-xh, 2.0 * xh, n);
    const auto [nx, np] = square_factorization(n);
    const VnLattice lat(grid, nx, np, 1.0);
    const Spectrum s = solve_generalized(assemble_pvn(hamiltonian_fgh(grid, spec), build_G(lat, grid)), n);
    const std::vector<double> ref =
        oracle_fgh_1d(-xh, 2.0 * xh, n, 1.0, 1.0, [](double x) { return 0.5 * x * x; });
    const bool complete = static_cast<int>(s.energies.size()) == n;
    const double err = complete ? max_rel_diff(s.energies, ref, n) : INFINITY;
    v.check(err <= 1e-8, "N=" + std::to_string(n) + " max rel diff " + fmt("%.2e", err));
  }
  return v;
}

// 2. pvN at N=16 against the exact level, the continuous vN baseline, and
//    the kinetic spectrum against the quadratic ladder.
Verdict criterion_2() {
  Verdict v;
  const int n = 16;
  const PotentialSpec spec = harmonic();
  const double xh = balanced_half_width(n, 1.0, 1.0, 1.0);
  const Grid1D grid(-xh, 2.0 * xh, n);
  const VnLattice lat(grid, 4, 4, 1.0);
  const ComplexMatrix g = build_G(lat, grid);

  const Spectrum pvn = solve_generalized(assemble_pvn(hamiltonian_fgh(grid, spec), g), n);
  const double e_pvn = std::abs(pvn.energies.at(7) - 7.5);
  v.check(e_pvn <= 1e-5, "pvN |E7-7.5| " + fmt("%.3e", e_pvn) + " (need <= 1e-5)");

  const ContinuousVnMatrices c = continuous_vn_matrices(lat, spec);
  const Spectrum vn = solve_generalized({c.h, c.s, BasisLabel::vn}, n);
  const double e_vn = std::abs(vn.energies.at(7) - 7.5);
  v.check(e_vn >= 1e-2, "vN |E7-7.5| " + fmt("%.3e", e_vn) + " (need >= 1e-2)");

  const Spectrum kin = solve_generalized(assemble_pvn(kinetic_matrix(grid, 1.0, 1.0), g), n);
  std::vector<double> ladder;
  for (int j = -n / 2 + 1; j <= n / 2; ++j) {
    const double k = 2.0 * std::numbers::pi * j / grid.length();
    ladder.push_back(0.5 * k * k);
  }
  std::sort(ladder.begin(), ladder.end());
  const double e_kin = max_abs_diff(kin.energies, ladder, n);
  v.check(e_kin <= 1e-8, "kinetic ladder max diff " + fmt("%.2e", e_kin));
  return v;
}

// 3. Morse on the Fourier grid, 100 points on [-1.6, 20.1].
Verdict criterion_3() {
  Verdict v;
  const PotentialSpec spec = morse(kMorseDepth, kMorseBeta, kMorseMass);
  const std::vector<double> ref = oracle_morse_levels(kMorseDepth, kMorseBeta, kMorseMass, 1.0);
  v.check(ref.size() == 24, std::to_string(ref.size()) + " bound levels");
  const Spectrum s = solve_fgh(Grid1D(-1.6, 21.7, 100), spec, static_cast<int>(ref.size()));
  const Accuracy acc{4, AccuracyMode::relative};
  int ok = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) ok += acc.agrees(s.energies.at(i), ref[i]);
  v.check(ok == static_cast<int>(ref.size()), std::to_string(ok) + "/24 levels to 4 digits");
  v.detail += "; max rel err " + fmt("%.3e", max_rel_diff(s.energies, ref, ref.size())) +
              ", max abs err " + fmt("%.3e", max_abs_diff(s.energies, ref, ref.size()));
  return v;
}

// 4. Morse pruned bvN on a 10 x 10 lattice, alpha = 0.5.
Verdict criterion_4() {
  Verdict v;
  const PotentialSpec spec = morse(kMorseDepth, kMorseBeta, kMorseMass);
  const Grid1D grid(-1.6, 21.7, 100);
  const VnLattice lat(grid, 10, 10, 1.0, 0.5);
  const BasisMatrices bm = build_basis(lat, grid);
  const PruneMask mask = select_cells(lat, spec, PruneRule{kMorseDepth, 0.0, 3.5});
  const int kept = mask.n_kept();
  v.check(kept >= 44 && kept <= 52, "basis size " + std::to_string(kept) + " (need 44..52)");
  const Spectrum s = solve_generalized(assemble_bvn(hamiltonian_fgh(grid, spec), bm.b, bm.s_inv, mask), kept);
  const std::vector<double> ref = oracle_morse_levels(kMorseDepth, kMorseBeta, kMorseMass, 1.0);
  const Accuracy acc{4, AccuracyMode::relative};
  int ok = 0;
  for (std::size_t i = 0; i < ref.size() && i < s.energies.size(); ++i)
    ok += acc.agrees(s.energies[i], ref[i]);
  v.check(ok == static_cast<int>(ref.size()), std::to_string(ok) + "/24 levels to 4 digits");
  v.detail += "; max rel err " + fmt("%.3e", max_rel_diff(s.energies, ref, ref.size())) +
              ", max abs err " + fmt("%.3e", max_abs_diff(s.energies, ref, ref.size()));
  return v;
}

// 5. Efficiency trend over hbar in {1, 0.5, 0.25}.
Verdict criterion_5() {
  Verdict v;
  const auto rows = efficiency_scan(morse(kMorseDepth, kMorseBeta, kMorseMass), {1.0, 0.5, 0.25},
                                    SearchPolicy::desk());
  std::vector<double> fgh, bvn;
  for (const auto& r : rows) {
    (r.method == BasisLabel::fgh ? fgh : bvn).push_back(r.ratio);
    if (r.status != "ok") v.check(false, "hbar " + fmt("%g", r.hbar) + " " + r.status);
  }
  if (fgh.size() != 3 || bvn.size() != 3) {
    v.check(false, "scan returned " + std::to_string(rows.size()) + " rows");
    return v;
  }
  v.check(bvn[0] > bvn[1] && bvn[1] > bvn[2],
          "bvN ratios " + fmt("%.3f", bvn[0]) + ", " + fmt("%.3f", bvn[1]) + ", " + fmt("%.3f", bvn[2]) +
              " strictly decreasing");
  v.check(bvn[2] < 1.5, "final bvN ratio < 1.5");
  bool ge = true;
  for (int i = 0; i < 3; ++i) ge = ge && fgh[i] >= bvn[i];
  v.check(ge, "FGH ratios " + fmt("%.3f", fgh[0]) + ", " + fmt("%.3f", fgh[1]) + ", " + fmt("%.3f", fgh[2]) +
                  " >= bvN at every hbar");
  return v;
}

// 6. Triangle potential on a 64 x 64 grid.
Verdict criterion_6() {
  Verdict v;
  const double mass = 96.0, e_cut = 0.5;
  const PotentialSpec spec = triangle2d(mass);
  const Grid2D grid{Grid1D(-4.0, 10.5, 64), Grid1D(-5.25, 10.5, 64)};
  const VnLattice lx(grid.gx, 8, 8, 1.0), ly(grid.gy, 8, 8, 1.0);
  const BasisMatrices bx = build_basis(lx, grid.gx), by = build_basis(ly, grid.gy);
  const PruneMask mask = select_cells(lx, ly, spec, PruneRule{e_cut, 0.0, 4.0});
  const int kept = mask.n_kept();
  v.check(kept <= 0.4 * grid.size(),
          std::to_string(kept) + "/" + std::to_string(grid.size()) + " functions (" +
              fmt("%.1f", 100.0 * kept / grid.size()) + "%, need <= 40%)");
  const Spectrum s = solve_generalized(assemble_bvn(KroneckerHamiltonian(grid, spec), bx, by, mask), kept);

  const std::vector<double> ref = oracle_fgh_2d(
      -4.0, 10.5, 64, -5.25, 10.5, 64, mass, 1.0,
      [&](double x, double y) { return evaluate(spec, x, y); });
  std::size_t n_ref = 0;
  while (n_ref < ref.size() && ref[n_ref] < e_cut) ++n_ref;
  v.check(n_ref >= 80, std::to_string(n_ref) + " reference levels below e_cut");
  const double err = s.energies.size() >= n_ref ? max_abs_diff(s.energies, ref, n_ref) : INFINITY;
  v.check(err <= 1e-3, "max abs err " + fmt("%.3e", err) + " (need <= 1e-3)");
  return v;
}

// 7. Exact state counts against enumeration.
Verdict criterion_7() {
  Verdict v;
  int mismatches = 0, cases = 0;
  std::vector<double> levels;
  for (int k = 0; k <= 40; ++k) levels.push_back(k + 0.5);
  for (int d = 1; d <= 4; ++d)
    for (int g = 0; g <= 12; ++g) {
      ++cases;
      const BigInt exact = state_count_exact(g, d);
      const long long tuples = oracle_tuples(g, d);
      const long long enumerated = state_count_bruteforce(levels, d, g + 0.5 * d);
      if (exact != BigInt(tuples) || enumerated != tuples) ++mismatches;
    }
  v.check(mismatches == 0, std::to_string(cases - mismatches) + "/" + std::to_string(cases) +
                               " (g, D) cases equal");
  const BigInt c = state_count_exact(30, 2);
  v.check(c == 496 && oracle_tuples(30, 2) == 496, "C(32,2) = " + c.str());
  return v;
}

// 8. Monte Carlo phase-space volumes.
Verdict criterion_8() {
  Verdict v;
  const double e = 8.0;
  const double vh = 2.0 * std::numbers::pi * e;
  const PotentialSpec h = harmonic();
  for (int d : {1, 2, 3}) {
    const double xm = std::sqrt(2.0 * e);
    const VolumeEstimate est =
        mc_phase_volume(h, d, e, PhaseSpaceBox::cube({-xm, xm}, xm, d), 1'000'000, 1000 + d);
    const double exact = std::pow(vh, d) / oracle_factorial(d);
    const double z = std::abs(est.value - exact) / est.std_error;
    v.check(z <= 3.0, "harmonic D=" + std::to_string(d) + " " + fmt("%.6g", est.value) + " vs " +
                          fmt("%.6g", exact) + " (" + fmt("%.2f", z) + " sigma)");
  }
  const PotentialSpec m = morse(kMorseDepth, kMorseBeta, kMorseMass);
  const double vm = oracle_morse_area(kMorseDepth, kMorseBeta, kMorseMass, e);
  const VolumeEstimate est = mc_phase_volume(m, 2, e, minimal_enclosing_box(m, e, 2), 1'000'000, 2002);
  v.check(est.value + 3.0 * est.std_error < vm * vm / 2.0,
          "Morse D=2 " + fmt("%.6g", est.value) + " +- " + fmt("%.2g", est.std_error) + " < v^2/2 = " +
              fmt("%.6g", vm * vm / 2.0));
  return v;
}

// 9. Harmonic packing ratio.
Verdict criterion_9() {
  Verdict v;
  const double s = packing_ratio_1d(harmonic(), 8.0);
  const double err = std::abs(s - std::numbers::pi / 4.0);
  v.check(err <= 1e-6, "s = " + fmt("%.12f", s) + ", |s - pi/4| = " + fmt("%.2e", err));
  return v;
}

// 10. Basis identities and congruence invariance.
Verdict criterion_10() {
  Verdict v;
  struct Case {
    const char* name;
    double x_min, length;
    int n, nx, np;
    std::optional<double> alpha;
  };
  const Case cases[] = {{"harmonic 16 (4x4)", -5.013, 10.026, 16, 4, 4, std::nullopt},
                        {"harmonic 32 (4x8)", -7.09, 14.18, 32, 4, 8, std::nullopt},
                        {"morse 100 (10x10)", -1.6, 21.7, 100, 10, 10, 0.5},
                        {"grid 24 (6x4)", -3.0, 9.0, 24, 6, 4, 0.8}};
  double worst = 0.0;
  for (const Case& c : cases) {
    const Grid1D grid(c.x_min, c.length, c.n);
    const VnLattice lat(grid, c.nx, c.np, 1.0, c.alpha);
    const BasisMatrices bm = build_basis(lat, grid);
    const int n = lat.size();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const double e1 = (bm.g.adjoint() * bm.b - id).cwiseAbs().maxCoeff();
    const double e2 = (bm.b.adjoint() * bm.b - bm.s_inv).cwiseAbs().maxCoeff();
    const double e3 = (bm.g.adjoint() * bm.g - bm.s).cwiseAbs().maxCoeff();
    // S^-1 checked against S directly
    const double e4 = (bm.s * bm.s_inv - id).cwiseAbs().maxCoeff();
    const double e = std::max({e1, e2, e3, e4});
    worst = std::max(worst, e);
    v.check(e <= 1e-8, std::string(c.name) + " " + fmt("%.1e", e));
  }

  std::mt19937_64 rng(20260101);
  std::normal_distribution<double> nd;
  const int n = 12;
  auto random = [&] {
    ComplexMatrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = Complex(nd(rng), nd(rng));
    return a;
  };
  double worst_rel = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix x = random();
    const ComplexMatrix h = (x + x.adjoint()) / 2.0;
    const ComplexMatrix y = random();
    const ComplexMatrix s = y.adjoint() * y + ComplexMatrix::Identity(n, n);
    const ComplexMatrix t = random() + 3.0 * ComplexMatrix::Identity(n, n);
    const Spectrum a = solve_generalized({h, s, BasisLabel::pvn}, n);
    const Spectrum b = solve_generalized({t.adjoint() * h * t, t.adjoint() * s * t, BasisLabel::pvn}, n);
    // independent reference: S^-1/2 H S^-1/2
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s);
    const ComplexMatrix w = es.operatorInverseSqrt();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> er(w * h * w, Eigen::EigenvaluesOnly);
    for (int i = 0; i < n; ++i) {
      const double r = er.eigenvalues()[i];
      const double scale = std::max(1.0, std::abs(r));
      worst_rel = std::max({worst_rel, std::abs(a.energies[i] - r) / scale,
                            std::abs(b.energies[i] - r) / scale});
    }
  }
  v.check(worst_rel <= 1e-9, "congruence n=12 max rel diff " + fmt("%.1e", worst_rel));
  return v;
}

struct Criterion {
  Verdict (*run)();
  double limit_s;
};

const Criterion kCriteria[] = {{criterion_1, 1.0},   {criterion_2, 5.0},  {criterion_3, 5.0},
                               {criterion_4, 5.0},   {criterion_5, 600.0}, {criterion_6, 900.0},
                               {criterion_7, 10.0},  {criterion_8, 120.0}, {criterion_9, 1.0},
                               {criterion_10, 10.0}};

bool run_one(int k) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = kCriteria[k - 1].run();
  } catch (const std::exception& e) {
    v.check(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double limit = kCriteria[k - 1].limit_s;
  v.check(secs < limit, "runtime " + fmt("%.2f", secs) + " s (limit " + fmt("%g", limit) + " s)");
  std::printf("criterion %d: %s: %s\n", k, v.pass ? "PASS" : "FAIL", v.detail.c_str());
  std::fflush(stdout);
  return v.pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (k < 1 || k > 10) {
      std::fprintf(stderr, "usage: acceptance [1-10 ...]\n");
      return 2;
    }
    which.push_back(k);
  }
  if (which.empty())
    for (int k = 1; k <= 10; ++k) which.push_back(k);
  bool all = true;
  for (int k : which) all = run_one(k) && all;
  return all ? 0 : 1;
}
