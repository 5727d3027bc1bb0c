#pragma once

// Benchmark potentials, their classical Hamiltonians and closed-form spectra.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pvn/error.hpp"

namespace pvn {

enum class PotentialKind { harmonic, morse, triangle2d, coulomb1d, tabulated };

inline std::string_view to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::harmonic: return "harmonic";
    case PotentialKind::morse: return "morse";
    case PotentialKind::triangle2d: return "triangle2d";
    case PotentialKind::coulomb1d: return "coulomb1d";
    case PotentialKind::tabulated: return "tabulated";
  }
  return "?";
}

inline PotentialKind potential_kind_from_string(std::string_view s) {
  if (s == "harmonic") return PotentialKind::harmonic;
  if (s == "morse") return PotentialKind::morse;
  if (s == "triangle2d") return PotentialKind::triangle2d;
  if (s == "coulomb1d") return PotentialKind::coulomb1d;
  if (s == "tabulated") return PotentialKind::tabulated;
  throw ContractViolation("unknown potential kind '" + std::string(s) + "'");
}

/// Samples (x, V) of a tabulated potential, x strictly increasing.
struct PotentialTable {
  std::vector<double> x;
  std::vector<double> v;
};

/// Parameter names: mass, omega (harmonic), depth and beta (morse), charge (coulomb1d).
struct PotentialSpec {
  PotentialKind kind = PotentialKind::harmonic;
  std::map<std::string, double> params;
  double hbar = 1.0;
  std::shared_ptr<const PotentialTable> table;

  double param(const std::string& name) const {
    auto it = params.find(name);
    if (it == params.end())
      throw ContractViolation(std::string(to_string(kind)) + " potential needs parameter '" +
                              name + "'");
    return it->second;
  }
  double mass() const { return param("mass"); }
  int dimension() const { return kind == PotentialKind::triangle2d ? 2 : 1; }

  void validate() const {
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw ContractViolation("hbar must be > 0");
    auto positive = [&](const char* name) {
      const double v = param(name);
      if (!(v > 0.0) || !std::isfinite(v))
        throw ContractViolation(std::string("parameter '") + name + "' must be > 0");
    };
    positive("mass");
    switch (kind) {
      case PotentialKind::harmonic: positive("omega"); break;
      case PotentialKind::morse:
        positive("depth");
        positive("beta");
        break;
      case PotentialKind::coulomb1d: positive("charge"); break;
      case PotentialKind::tabulated:
        if (!table || table->x.size() < 2 || table->x.size() != table->v.size())
          throw ContractViolation("tabulated potential needs >= 2 (x, V) samples");
        for (std::size_t i = 1; i < table->x.size(); ++i)
          if (!(table->x[i] > table->x[i - 1]))
            throw ContractViolation("tabulated x values must be strictly increasing");
        break;
      case PotentialKind::triangle2d: break;
    }
  }
};

inline PotentialSpec harmonic(double mass = 1.0, double omega = 1.0, double hbar = 1.0) {
  return {PotentialKind::harmonic, {{"mass", mass}, {"omega", omega}}, hbar, nullptr};
}

inline PotentialSpec morse(double depth, double beta, double mass, double hbar = 1.0) {
  return {PotentialKind::morse, {{"depth", depth}, {"beta", beta}, {"mass", mass}}, hbar, nullptr};
}

inline PotentialSpec triangle2d(double mass, double hbar = 1.0) {
  return {PotentialKind::triangle2d, {{"mass", mass}}, hbar, nullptr};
}

inline PotentialSpec coulomb1d(double charge, double mass, double hbar = 1.0) {
  return {PotentialKind::coulomb1d, {{"charge", charge}, {"mass", mass}}, hbar, nullptr};
}

inline PotentialSpec tabulated(PotentialTable table, double mass, double hbar = 1.0) {
  PotentialSpec s{PotentialKind::tabulated, {{"mass", mass}}, hbar,
                  std::make_shared<const PotentialTable>(std::move(table))};
  s.validate();
  return s;
}

/// Two-column CSV (x, V) with one header row.
inline PotentialTable load_potential_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("cannot open potential table '" + path + "'");
  PotentialTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) continue;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x = 0, v = 0;
    if (!(ss >> x >> v))
      throw ContractViolation(path + ":" + std::to_string(lineno) + ": expected two numbers");
    t.x.push_back(x);
    t.v.push_back(v);
  }
  return t;
}

namespace detail {

inline double triangle_alpha(double theta) {
  const double c = (1.0 - std::cos(3.0 * theta)) / 4.0;
  return c * c + 0.05;
}

inline double interpolate(const PotentialTable& t, double x) {
  if (x <= t.x.front()) return t.v.front();
  if (x >= t.x.back()) return t.v.back();
  auto hi = std::upper_bound(t.x.begin(), t.x.end(), x);
  const std::size_t j = static_cast<std::size_t>(hi - t.x.begin());
  const double w = (x - t.x[j - 1]) / (t.x[j] - t.x[j - 1]);
  return (1.0 - w) * t.v[j - 1] + w * t.v[j];
}

}  // namespace detail

/// V(x). triangle2d takes Cartesian (x, y). Tabulated potentials are held
/// constant beyond the table ends.
inline double evaluate(const PotentialSpec& spec, std::span<const double> x) {
  if (static_cast<int>(x.size()) != spec.dimension())
    throw ContractViolation(std::string(to_string(spec.kind)) + " potential expects dimension " +
                            std::to_string(spec.dimension()) + ", got " +
                            std::to_string(x.size()));
  switch (spec.kind) {
    case PotentialKind::harmonic: {
      const double m = spec.param("mass"), w = spec.param("omega");
      return 0.5 * m * w * w * x[0] * x[0];
    }
    case PotentialKind::morse: {
      const double e = 1.0 - std::exp(-spec.param("beta") * x[0]);
      return spec.param("depth") * e * e;
    }
    case PotentialKind::triangle2d: {
      const double r2 = x[0] * x[0] + x[1] * x[1];
      const double e = 1.0 - std::exp(-detail::triangle_alpha(std::atan2(x[1], x[0])) * r2);
      return e * e;
    }
    case PotentialKind::coulomb1d: {
      if (x[0] == 0.0)
        throw SingularPoint("coulomb1d potential is singular at x = 0; offset the grid");
      if (x[0] < 0.0) return std::numeric_limits<double>::infinity();
      return -spec.param("charge") / x[0];
    }
    case PotentialKind::tabulated: return detail::interpolate(*spec.table, x[0]);
  }
  return 0.0;
}

inline double evaluate(const PotentialSpec& spec, double x) {
  return evaluate(spec, std::span<const double>(&x, 1));
}

inline double evaluate(const PotentialSpec& spec, double x, double y) {
  const double xy[2] = {x, y};
  return evaluate(spec, std::span<const double>(xy, 2));
}

struct PhasePoint {
  std::vector<double> x;
  std::vector<double> p;
};

inline double classical_hamiltonian(const PotentialSpec& spec, const PhasePoint& pt) {
  if (pt.x.size() != pt.p.size())
    throw ContractViolation("phase point has mismatched x and p lengths");
  const double m = spec.mass();
  double kinetic = 0.0;
  for (double p : pt.p) kinetic += p * p;
  return kinetic / (2.0 * m) + evaluate(spec, std::span<const double>(pt.x));
}

/// Harmonic frequency of the Morse well, beta * sqrt(2 D / m).
inline double morse_frequency(const PotentialSpec& spec) {
  return spec.param("beta") * std::sqrt(2.0 * spec.param("depth") / spec.mass());
}

/// Largest bound Morse quantum number, floor(sqrt(2 m D) / (beta hbar) - 1/2).
inline int morse_max_quantum_number(const PotentialSpec& spec) {
  const double lam = std::sqrt(2.0 * spec.mass() * spec.param("depth")) /
                     (spec.param("beta") * spec.hbar);
  double top = lam - 0.5;
  int n = static_cast<int>(std::floor(top));
  // E_n is increasing only while n + 1/2 < lam
  if (static_cast<double>(n) == top) --n;
  return n;
}

/// Closed-form levels E_0..E_nmax. Morse levels stop at the last bound state.
inline std::vector<double> analytic_levels(const PotentialSpec& spec, int n_max) {
  std::vector<double> out;
  if (n_max < 0) return out;
  switch (spec.kind) {
    case PotentialKind::harmonic: {
      const double hw = spec.hbar * spec.param("omega");
      for (int n = 0; n <= n_max; ++n) out.push_back(hw * (n + 0.5));
      return out;
    }
    case PotentialKind::morse: {
      const double hw = spec.hbar * morse_frequency(spec);
      const double d = spec.param("depth");
      const int top = std::min(n_max, morse_max_quantum_number(spec));
      for (int n = 0; n <= top; ++n) {
        const double q = hw * (n + 0.5);
        out.push_back(q - q * q / (4.0 * d));
      }
      return out;
    }
    default:
      throw NotAvailable("no closed-form spectrum for " + std::string(to_string(spec.kind)));
  }
}

/// All bound Morse levels, or harmonic levels below e_max.
inline std::vector<double> analytic_levels_below(const PotentialSpec& spec, double e_max) {
  std::vector<double> out;
  if (spec.kind == PotentialKind::harmonic) {
    const double hw = spec.hbar * spec.param("omega");
    for (int n = 0; hw * (n + 0.5) < e_max; ++n) out.push_back(hw * (n + 0.5));
    return out;
  }
  for (double e : analytic_levels(spec, 1 << 30))
    if (e < e_max) out.push_back(e);
  return out;
}

}  // namespace pvn
