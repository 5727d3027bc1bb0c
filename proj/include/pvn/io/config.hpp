#pragma once

// Run configuration: line-oriented `key = value` text with [section] headers.
// '#' starts a comment. See docs/FORMATS.md for the key list.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pvn/error.hpp"
#include "pvn/potentials.hpp"
#include "pvn/solver.hpp"
#include "pvn/spectrum.hpp"
#include "pvn/vn_basis.hpp"

namespace pvn {

struct PotentialConfig {
  std::string kind = "harmonic";
  double mass = 1.0;
  double omega = 1.0;
  double depth = 12.0;
  double beta = 0.5;
  double charge = 1.0;
  double hbar = 1.0;
  std::string table;  // CSV path for kind = tabulated
  bool operator==(const PotentialConfig&) const = default;
};

struct GridConfig {
  double x_min = -5.0;
  double length = 10.0;
  int n = 16;
  // second dimension (2-D potentials only)
  double y_min = -5.0;
  double y_length = 10.0;
  int n_y = 16;
  bool operator==(const GridConfig&) const = default;
};

struct LatticeConfig {
  int n_x = 0;  // 0: nearest-to-square factorization of the grid size
  int n_p = 0;
  int n_y = 0;
  int n_py = 0;
  std::optional<double> alpha;
  std::string convention = "cell_center";
  bool operator==(const LatticeConfig&) const = default;
};

struct PruneConfig {
  double e_cut = std::numeric_limits<double>::infinity();
  bool auto_margin = false;
  double margin = 0.0;
  double halo = 0.0;
  bool operator==(const PruneConfig&) const = default;
};

struct SolverConfig {
  std::string basis = "fgh";
  int n_states = 0;  // 0: all
  double rcond = 1e-12;
  double spectral_switch = 1e8;
  bool allow_pseudo_inverse = false;
  int digits = 4;
  std::string accuracy = "relative";
  std::optional<double> e_max;  // levels compared with the reference; default e_cut
  std::string reference = "auto";  // auto | analytic | fgh | none
  bool operator==(const SolverConfig&) const = default;
};

struct OutputConfig {
  std::string dir = "out";
  bool timestamp = true;
  bool operator==(const OutputConfig&) const = default;
};

struct RunSection {
  std::uint64_t seed = 1;
  bool long_running = false;
  bool operator==(const RunSection&) const = default;
};

struct SweepConfig {
  std::vector<int> sizes = {8, 10, 12, 14, 16, 18, 20, 22, 24};
  int target_index = 7;
  std::vector<std::string> methods = {"fgh", "pvn", "vn"};
  std::string box = "balanced";  // balanced | grid
  bool operator==(const SweepConfig&) const = default;
};

struct EfficiencyConfig {
  std::vector<double> hbars = {1.0, 0.5, 0.25};
  int digits = 4;
  std::string accuracy = "relative";
  double e_max = 11.25;
  int max_grid = 1024;
  double halo_max = 7.0;
  double halo_step = 0.25;
  int lattice_steps = 14;
  bool operator==(const EfficiencyConfig&) const = default;
};

struct ScalingConfig {
  double energy = 8.0;
  int d_min = 1;
  int d_max = 4;
  std::int64_t samples = 1'000'000;
  bool operator==(const ScalingConfig&) const = default;
};

struct RunConfig {
  PotentialConfig potential;
  GridConfig grid;
  LatticeConfig lattice;
  PruneConfig prune;
  SolverConfig solver;
  OutputConfig output;
  RunSection run;
  SweepConfig sweep;
  EfficiencyConfig efficiency;
  ScalingConfig scaling;
  bool operator==(const RunConfig&) const = default;

  int dimension() const { return potential.kind == "triangle2d" ? 2 : 1; }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class ValueReader {
 public:
  ValueReader(std::string field, std::string text, int line)
      : field_(std::move(field)), text_(std::move(text)), line_(line) {}

  double real() const {
    if (text_ == "inf" || text_ == "+inf") return std::numeric_limits<double>::infinity();
    if (text_ == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(text_, &pos);
    } catch (const std::exception&) {
      fail("expected a number, got '" + text_ + "'");
    }
    if (pos != text_.size()) fail("expected a number, got '" + text_ + "'");
    if (std::isnan(v)) fail("NaN is not allowed");
    return v;
  }
  long long integer() const {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(text_, &pos);
    } catch (const std::exception&) {
      fail("expected an integer, got '" + text_ + "'");
    }
    if (pos != text_.size()) fail("expected an integer, got '" + text_ + "'");
    return v;
  }
  bool boolean() const {
    if (text_ == "true" || text_ == "yes" || text_ == "1") return true;
    if (text_ == "false" || text_ == "no" || text_ == "0") return false;
    fail("expected true or false, got '" + text_ + "'");
  }
  std::string word(std::initializer_list<const char*> allowed) const {
    for (const char* a : allowed)
      if (text_ == a) return text_;
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
    fail("'" + text_ + "' is not one of: " + list);
  }
  const std::string& text() const { return text_; }
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(field_, line_, msg); }

 private:
  std::string field_;
  std::string text_;
  int line_;
};

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string raw, section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("", lineno, "unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"potential", "grid",   "lattice", "prune",      "solver",
                                    "output",    "run",    "sweep",   "efficiency", "scaling"};
      bool ok = false;
      for (const char* k : known) ok = ok || section == k;
      if (!ok) throw ConfigError(section, lineno, "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("", lineno, "expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(key, lineno, "key outside of a [section]");
    const std::string field = section + "." + key;
    const detail::ValueReader v(field, val, lineno);
    auto positive_int = [&]() {
      const long long n = v.integer();
      if (n <= 0) v.fail("must be a positive integer");
      return static_cast<int>(n);
    };

    if (section == "potential") {
      auto& p = c.potential;
      if (key == "kind") p.kind = v.word({"harmonic", "morse", "triangle2d", "coulomb1d", "tabulated"});
      else if (key == "mass") p.mass = v.real();
      else if (key == "omega") p.omega = v.real();
      else if (key == "depth") p.depth = v.real();
      else if (key == "beta") p.beta = v.real();
      else if (key == "charge") p.charge = v.real();
      else if (key == "hbar") p.hbar = v.real();
      else if (key == "table") p.table = val;
      else v.fail("unknown key");
    } else if (section == "grid") {
      auto& g = c.grid;
      if (key == "x_min") g.x_min = v.real();
      else if (key == "length") g.length = v.real();
      else if (key == "n") g.n = positive_int();
      else if (key == "y_min") g.y_min = v.real();
      else if (key == "y_length") g.y_length = v.real();
      else if (key == "n_y") g.n_y = positive_int();
      else v.fail("unknown key");
    } else if (section == "lattice") {
      auto& l = c.lattice;
      if (key == "n_x") l.n_x = positive_int();
      else if (key == "n_p") l.n_p = positive_int();
      else if (key == "n_y") l.n_y = positive_int();
      else if (key == "n_py") l.n_py = positive_int();
      else if (key == "alpha") l.alpha = v.text() == "auto" ? std::nullopt : std::optional(v.real());
      else if (key == "convention") l.convention = v.word({"cell_center", "integer"});
      else v.fail("unknown key");
    } else if (section == "prune") {
      auto& r = c.prune;
      if (key == "e_cut") r.e_cut = v.real();
      else if (key == "margin") {
        r.auto_margin = v.text() == "auto";
        r.margin = r.auto_margin ? 0.0 : v.real();
      } else if (key == "halo") r.halo = v.real();
      else v.fail("unknown key");
    } else if (section == "solver") {
      auto& s = c.solver;
      if (key == "basis") s.basis = v.word({"fgh", "pvn", "bvn", "vn"});
      else if (key == "n_states") {
        const long long n = v.integer();
        if (n < 0) v.fail("must be >= 0");
        s.n_states = static_cast<int>(n);
      } else if (key == "rcond") s.rcond = v.real();
      else if (key == "spectral_switch") s.spectral_switch = v.real();
      else if (key == "allow_pseudo_inverse") s.allow_pseudo_inverse = v.boolean();
      else if (key == "digits") s.digits = positive_int();
      else if (key == "accuracy") s.accuracy = v.word({"absolute", "relative"});
      else if (key == "e_max") s.e_max = v.real();
      else if (key == "reference") s.reference = v.word({"auto", "analytic", "fgh", "none"});
      else v.fail("unknown key");
    } else if (section == "output") {
      if (key == "dir") c.output.dir = val;
      else if (key == "timestamp") c.output.timestamp = v.boolean();
      else v.fail("unknown key");
    } else if (section == "run") {
      if (key == "seed") {
        const long long s = v.integer();
        if (s < 0) v.fail("must be >= 0");
        c.run.seed = static_cast<std::uint64_t>(s);
      } else if (key == "long_running") c.run.long_running = v.boolean();
      else v.fail("unknown key");
    } else if (section == "sweep") {
      auto& w = c.sweep;
      if (key == "sizes") {
        w.sizes.clear();
        for (const std::string& s : detail::split_list(val)) {
          const detail::ValueReader item(field, s, lineno);
          const long long n = item.integer();
          if (n <= 0 || n % 2 != 0) item.fail("sizes must be positive even integers");
          w.sizes.push_back(static_cast<int>(n));
        }
        if (w.sizes.empty()) v.fail("needs at least one size");
      } else if (key == "target_index") {
        const long long n = v.integer();
        if (n < 0) v.fail("must be >= 0");
        w.target_index = static_cast<int>(n);
      } else if (key == "methods") {
        w.methods.clear();
        for (const std::string& s : detail::split_list(val))
          w.methods.push_back(detail::ValueReader(field, s, lineno).word({"fgh", "pvn", "bvn", "vn"}));
        if (w.methods.empty()) v.fail("needs at least one method");
      } else if (key == "box") w.box = v.word({"balanced", "grid"});
      else v.fail("unknown key");
    } else if (section == "efficiency") {
      auto& e = c.efficiency;
      if (key == "hbars") {
        e.hbars.clear();
        for (const std::string& s : detail::split_list(val))
          e.hbars.push_back(detail::ValueReader(field, s, lineno).real());
        if (e.hbars.empty()) v.fail("needs at least one value");
      } else if (key == "digits") e.digits = positive_int();
      else if (key == "accuracy") e.accuracy = v.word({"absolute", "relative"});
      else if (key == "e_max") e.e_max = v.real();
      else if (key == "max_grid") e.max_grid = positive_int();
      else if (key == "halo_max") e.halo_max = v.real();
      else if (key == "halo_step") e.halo_step = v.real();
      else if (key == "lattice_steps") e.lattice_steps = positive_int();
      else v.fail("unknown key");
    } else if (section == "scaling") {
      auto& s = c.scaling;
      if (key == "energy") s.energy = v.real();
      else if (key == "d_min") s.d_min = positive_int();
      else if (key == "d_max") s.d_max = positive_int();
      else if (key == "samples") {
        const long long n = v.integer();
        if (n <= 0) v.fail("must be positive");
        s.samples = n;
      } else v.fail("unknown key");
    }
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Canonical text form; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const RunConfig& c) {
  using detail::format_double;
  std::ostringstream o;
  auto kv = [&](const char* k, const std::string& v) { o << k << " = " << v << "\n"; };
  auto num = [&](const char* k, double v) { kv(k, format_double(v)); };
  auto boolean = [&](const char* k, bool v) { kv(k, v ? "true" : "false"); };
  o << "[potential]\n";
  kv("kind", c.potential.kind);
  num("mass", c.potential.mass);
  num("omega", c.potential.omega);
  num("depth", c.potential.depth);
  num("beta", c.potential.beta);
  num("charge", c.potential.charge);
  num("hbar", c.potential.hbar);
  if (!c.potential.table.empty()) kv("table", c.potential.table);
  o << "\n[grid]\n";
  num("x_min", c.grid.x_min);
  num("length", c.grid.length);
  kv("n", std::to_string(c.grid.n));
  num("y_min", c.grid.y_min);
  num("y_length", c.grid.y_length);
  kv("n_y", std::to_string(c.grid.n_y));
  o << "\n[lattice]\n";
  if (c.lattice.n_x > 0) kv("n_x", std::to_string(c.lattice.n_x));
  if (c.lattice.n_p > 0) kv("n_p", std::to_string(c.lattice.n_p));
  if (c.lattice.n_y > 0) kv("n_y", std::to_string(c.lattice.n_y));
  if (c.lattice.n_py > 0) kv("n_py", std::to_string(c.lattice.n_py));
  kv("alpha", c.lattice.alpha ? format_double(*c.lattice.alpha) : "auto");
  kv("convention", c.lattice.convention);
  o << "\n[prune]\n";
  num("e_cut", c.prune.e_cut);
  kv("margin", c.prune.auto_margin ? "auto" : format_double(c.prune.margin));
  num("halo", c.prune.halo);
  o << "\n[solver]\n";
  kv("basis", c.solver.basis);
  kv("n_states", std::to_string(c.solver.n_states));
  num("rcond", c.solver.rcond);
  num("spectral_switch", c.solver.spectral_switch);
  boolean("allow_pseudo_inverse", c.solver.allow_pseudo_inverse);
  kv("digits", std::to_string(c.solver.digits));
  kv("accuracy", c.solver.accuracy);
  if (c.solver.e_max) num("e_max", *c.solver.e_max);
  kv("reference", c.solver.reference);
  o << "\n[output]\n";
  kv("dir", c.output.dir);
  boolean("timestamp", c.output.timestamp);
  o << "\n[run]\n";
  kv("seed", std::to_string(c.run.seed));
  boolean("long_running", c.run.long_running);
  o << "\n[sweep]\n";
  std::string list;
  for (int s : c.sweep.sizes) list += (list.empty() ? "" : ", ") + std::to_string(s);
  kv("sizes", list);
  kv("target_index", std::to_string(c.sweep.target_index));
  list.clear();
  for (const auto& m : c.sweep.methods) list += (list.empty() ? "" : ", ") + m;
  kv("methods", list);
  kv("box", c.sweep.box);
  o << "\n[efficiency]\n";
  list.clear();
  for (double h : c.efficiency.hbars) list += (list.empty() ? "" : ", ") + format_double(h);
  kv("hbars", list);
  kv("digits", std::to_string(c.efficiency.digits));
  kv("accuracy", c.efficiency.accuracy);
  num("e_max", c.efficiency.e_max);
  kv("max_grid", std::to_string(c.efficiency.max_grid));
  num("halo_max", c.efficiency.halo_max);
  num("halo_step", c.efficiency.halo_step);
  kv("lattice_steps", std::to_string(c.efficiency.lattice_steps));
  o << "\n[scaling]\n";
  num("energy", c.scaling.energy);
  kv("d_min", std::to_string(c.scaling.d_min));
  kv("d_max", std::to_string(c.scaling.d_max));
  kv("samples", std::to_string(c.scaling.samples));
  return o.str();
}

/// PotentialSpec described by the [potential] section.
inline PotentialSpec make_potential(const PotentialConfig& p) {
  PotentialSpec s;
  try {
    s.kind = potential_kind_from_string(p.kind);
    s.hbar = p.hbar;
    s.params["mass"] = p.mass;
    switch (s.kind) {
      case PotentialKind::harmonic: s.params["omega"] = p.omega; break;
      case PotentialKind::morse:
        s.params["depth"] = p.depth;
        s.params["beta"] = p.beta;
        break;
      case PotentialKind::coulomb1d: s.params["charge"] = p.charge; break;
      case PotentialKind::tabulated:
        if (p.table.empty()) throw ConfigError("potential.table", 0, "tabulated potential needs a table path");
        s.table = std::make_shared<const PotentialTable>(load_potential_table(p.table));
        break;
      case PotentialKind::triangle2d: break;
    }
    s.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const ContractViolation& e) {
    throw ConfigError("potential", 0, e.what());
  }
  return s;
}

}  // namespace pvn
