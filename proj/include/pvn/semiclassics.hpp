#pragma once

// Semiclassical scaling analysis: Monte Carlo phase-space volumes, packing
// ratios of 1-D energy shells and harmonic state counting.

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pvn/error.hpp"
#include "pvn/potentials.hpp"

namespace pvn {

using BigInt = boost::multiprecision::cpp_int;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// Per-dimension [x_lo, x_hi] x [-p_max, p_max].
struct PhaseSpaceBox {
  std::vector<Interval> x;
  std::vector<double> p_max;

  int dimension() const { return static_cast<int>(x.size()); }

  void validate() const {
    if (x.empty() || x.size() != p_max.size())
      throw ContractViolation("phase-space box needs matching x and p intervals");
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!(x[i].width() > 0.0) || !(p_max[i] > 0.0))
        throw ContractViolation("phase-space box has an empty interval");
  }
  double volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) v *= x[i].width() * 2.0 * p_max[i];
    return v;
  }
  /// The same 1-D box repeated D times.
  static PhaseSpaceBox cube(Interval x, double p_max, int d) {
    return {std::vector<Interval>(d, x), std::vector<double>(d, p_max)};
  }
};

struct VolumeEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  std::int64_t hits = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::int64_t kSampleBlock = 1 << 16;

}  // namespace detail

/// Volume of {sum_i p_i^2/2m + V(x_i) <= E} inside the box by uniform
/// sampling. Samples come in fixed blocks, each with a generator seeded from
/// (seed, block index), so the estimate depends only on seed and n_samples.
inline VolumeEstimate mc_phase_volume(const PotentialSpec& spec, int dimension, double energy,
                                      const PhaseSpaceBox& box, std::int64_t n_samples,
                                      std::uint64_t seed) {
  if (spec.dimension() != 1)
    throw ContractViolation("mc_phase_volume sums a 1-D potential over dimensions");
  if (dimension <= 0 || box.dimension() != dimension)
    throw ContractViolation("box dimension does not match D");
  if (n_samples <= 0) throw ContractViolation("n_samples must be positive");
  box.validate();
  const double m = spec.mass();
  std::int64_t hits = 0, edge_hits = 0;
  std::vector<double> x(dimension), p(dimension);
  const double shell = 1e-3;
  for (std::int64_t start = 0, block = 0; start < n_samples; start += detail::kSampleBlock, ++block) {
    std::mt19937_64 rng(detail::splitmix64(seed ^ detail::splitmix64(static_cast<std::uint64_t>(block))));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::int64_t count = std::min(detail::kSampleBlock, n_samples - start);
    for (std::int64_t s = 0; s < count; ++s) {
      double h = 0.0;
      bool near_edge = false;
      for (int i = 0; i < dimension; ++i) {
        const double ux = unit(rng), up = unit(rng);
        x[i] = box.x[i].lo + ux * box.x[i].width();
        p[i] = box.p_max[i] * (2.0 * up - 1.0);
        h += p[i] * p[i] / (2.0 * m) + evaluate(spec, x[i]);
        near_edge = near_edge || ux < shell || ux > 1.0 - shell || up < shell || up > 1.0 - shell;
      }
      if (h <= energy) {
        ++hits;
        if (near_edge) ++edge_hits;
      }
    }
  }
  if (hits == 0)
    throw DegenerateEstimate("no Monte Carlo samples fell inside the energy shell");
  VolumeEstimate out;
  const double f = static_cast<double>(hits) / static_cast<double>(n_samples);
  out.value = box.volume() * f;
  out.std_error = box.volume() * std::sqrt(f * (1.0 - f) / static_cast<double>(n_samples));
  out.n_samples = n_samples;
  out.hits = hits;
  out.seed = seed;
  if (static_cast<double>(edge_hits) > 1e-3 * static_cast<double>(hits))
    out.warnings.push_back("energy shell reaches the box boundary (" + std::to_string(edge_hits) +
                           " of " + std::to_string(hits) + " hits); the box may clip it");
  return out;
}

/// Location and value of the well bottom.
struct WellMinimum {
  double x = 0.0;
  double v = 0.0;
};

inline WellMinimum well_minimum(const PotentialSpec& spec) {
  switch (spec.kind) {
    case PotentialKind::harmonic:
    case PotentialKind::morse: return {0.0, 0.0};
    case PotentialKind::tabulated: {
      const auto& t = *spec.table;
      const auto it = std::min_element(t.v.begin(), t.v.end());
      const std::size_t i = static_cast<std::size_t>(it - t.v.begin());
      return {t.x[i], t.v[i]};
    }
    default:
      throw NotAvailable("no finite well minimum for " + std::string(to_string(spec.kind)));
  }
}

/// Classical turning points on either side of the well bottom at energy E.
inline Interval turning_points(const PotentialSpec& spec, double energy) {
  const WellMinimum w = well_minimum(spec);
  if (!(energy > w.v)) throw ContractViolation("energy must lie above the potential minimum");
  auto find = [&](double dir) {
    double step = 1e-3;
    double inside = w.x, outside = w.x + dir * step;
    while (evaluate(spec, outside) < energy) {
      inside = outside;
      step *= 2.0;
      outside = w.x + dir * step;
      if (step > 1e8)
        throw UnboundedOrbit("classical motion at E = " + std::to_string(energy) +
                             " is not bounded");
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (inside + outside);
      if (mid == inside || mid == outside) break;
      (evaluate(spec, mid) < energy ? inside : outside) = mid;
    }
    return 0.5 * (inside + outside);
  };
  return {find(-1.0), find(1.0)};
}

/// 1-D phase-space area below E, 2 * integral of sqrt(2m(E - V)) between
/// the turning points.
inline double phase_area_1d(const PotentialSpec& spec, double energy) {
  const Interval tp = turning_points(spec, energy);
  const double m = spec.mass();
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto momentum = [&](double x) {
    const double k = energy - evaluate(spec, x);
    return k > 0.0 ? std::sqrt(2.0 * m * k) : 0.0;
  };
  return 2.0 * integrator.integrate(momentum, tp.lo, tp.hi);
}

/// Smallest box holding the shell: turning points x p_max(E).
inline PhaseSpaceBox minimal_enclosing_box(const PotentialSpec& spec, double energy,
                                           int dimension = 1) {
  const Interval tp = turning_points(spec, energy);
  const double pm = std::sqrt(2.0 * spec.mass() * (energy - well_minimum(spec).v));
  return PhaseSpaceBox::cube(tp, pm, dimension);
}

/// Ratio of the phase-space area below E to the area of a box: the minimal
/// enclosing one unless a box is given.
inline double packing_ratio_1d(const PotentialSpec& spec, double energy,
                               const std::optional<PhaseSpaceBox>& box = std::nullopt) {
  const double v = phase_area_1d(spec, energy);
  const PhaseSpaceBox b = box ? *box : minimal_enclosing_box(spec, energy);
  if (b.dimension() != 1) throw ContractViolation("packing ratio needs a 1-D box");
  b.validate();
  return v / b.volume();
}

/// Number of D-dimensional isotropic oscillator states with at most g quanta,
/// (g + D)! / (g! D!).
inline BigInt state_count_exact(int g, int d) {
  if (g < 0 || d <= 0) throw ContractViolation("state count needs g >= 0 and D >= 1");
  // C(g + D, k) built up incrementally stays integral at every step
  BigInt c = 1;
  const int k = std::min(g, d);
  for (int i = 1; i <= k; ++i) {
    c *= (g + d - k + i);
    c /= i;
  }
  return c;
}

struct StateCountLimits {
  double log_semiclassical = 0.0;  // ln(g^D / D!)
  double log_polynomial = 0.0;     // ln(D^g / g!)
  double semiclassical() const { return std::exp(log_semiclassical); }
  double polynomial() const { return std::exp(log_polynomial); }
};

/// g^D / D! (valid for g >> D) and D^g / g! (valid for D >> g), in log form.
inline StateCountLimits state_count_limits(int g, int d) {
  if (g < 0 || d <= 0) throw ContractViolation("state count needs g >= 0 and D >= 1");
  const double ninf = -std::numeric_limits<double>::infinity();
  StateCountLimits out;
  out.log_semiclassical = (g == 0 ? ninf : d * std::log(static_cast<double>(g))) -
                          std::lgamma(d + 1.0);
  out.log_polynomial = g * std::log(static_cast<double>(d)) - std::lgamma(g + 1.0);
  return out;
}

/// Counts D-tuples of 1-D levels with sum <= E by enumeration over the sorted
/// level list. Throws BudgetExceeded after `budget` visited nodes.
inline std::int64_t state_count_bruteforce(std::vector<double> levels, int d, double energy,
                                           std::int64_t budget = 100'000'000) {
  if (d <= 0) throw ContractViolation("D must be positive");
  std::sort(levels.begin(), levels.end());
  if (levels.empty()) return 0;
  const double slack = 1e-12 * std::max(1.0, std::abs(energy));
  std::int64_t visited = 0;
  std::function<std::int64_t(int, double)> rec = [&](int remaining, double left) -> std::int64_t {
    if (remaining == 0) return 1;
    std::int64_t total = 0;
    for (double e : levels) {
      // every later coordinate needs at least the lowest level
      if (e + (remaining - 1) * levels.front() > left + slack) break;
      if (++visited > budget)
        throw BudgetExceeded("state enumeration exceeded " + std::to_string(budget) + " nodes");
      total += rec(remaining - 1, left - e);
    }
    return total;
  };
  return rec(d, energy);
}

struct ScalingRow {
  int dimension = 0;
  double v_mc = 0.0;
  double v_mc_stderr = 0.0;
  double v_semiclassical = 0.0;
  double v_exponential_ref = 0.0;
  double g_exact = 0.0;
  double g_limit_gd = 0.0;
  double g_limit_dg = 0.0;
  double box_ratio = 0.0;
  std::vector<std::string> warnings;
};

struct ScalingOptions {
  std::int64_t samples_per_dimension = 1'000'000;
  std::uint64_t seed = 1;
};

/// Per D: Monte Carlo volume of the summed potential below E in the D-fold
/// minimal box, v^D / D!, v^D, harmonic state counts at g = floor(v / h), and
/// V_mc / a^D.
inline std::vector<ScalingRow> scaling_report(const PotentialSpec& spec, int d_min, int d_max,
                                              double energy, const ScalingOptions& opts = {}) {
  if (d_min < 1 || d_max < d_min) throw ContractViolation("bad dimension range");
  const double v = phase_area_1d(spec, energy);
  const PhaseSpaceBox one = minimal_enclosing_box(spec, energy);
  const double a = one.volume();
  const int g = static_cast<int>(std::floor(v / (2.0 * std::numbers::pi * spec.hbar) * (1.0 + 1e-12)));
  std::vector<ScalingRow> rows;
  for (int d = d_min; d <= d_max; ++d) {
    ScalingRow r;
    r.dimension = d;
    const PhaseSpaceBox box = PhaseSpaceBox::cube(one.x[0], one.p_max[0], d);
    const VolumeEstimate est = mc_phase_volume(
        spec, d, energy, box, opts.samples_per_dimension,
        detail::splitmix64(opts.seed + static_cast<std::uint64_t>(d)));
    r.v_mc = est.value;
    r.v_mc_stderr = est.std_error;
    r.warnings = est.warnings;
    r.v_exponential_ref = std::pow(v, d);
    r.v_semiclassical = std::exp(d * std::log(v) - std::lgamma(d + 1.0));
    r.g_exact = state_count_exact(g, d).convert_to<double>();
    const StateCountLimits lim = state_count_limits(g, d);
    r.g_limit_gd = lim.semiclassical();
    r.g_limit_dg = lim.polynomial();
    r.box_ratio = est.value / std::pow(a, d);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace pvn
