// pvn: command-line front end.
//
//   pvn solve      --config FILE [--out DIR]   eigenvalues.csv, cells.csv (bvn), meta.txt
//   pvn sweep      --config FILE [--out DIR]   convergence.csv
//   pvn efficiency --config FILE [--out DIR]   efficiency.csv
//   pvn scaling    --config FILE [--out DIR]   scaling.csv
//   pvn plot       --input CSV --kind KIND [--out FILE.svg]
//
// Exit status: 0 when every requested output was written, 2 for usage or
// configuration errors, 1 for any other failure.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "pvn/pvn.hpp"

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  bool long_running = false;
  bool quiet = false;
  bool no_timestamp = false;
  std::string input;
  std::string kind;
};

pvn::RunConfig load(const Globals& g) {
  if (g.config.empty()) throw pvn::ConfigError("--config", 0, "this command needs --config FILE");
  pvn::RunConfig c = pvn::load_config(g.config);
  if (g.out) c.output.dir = *g.out;
  if (g.seed) c.run.seed = *g.seed;
  if (g.long_running) c.run.long_running = true;
  if (g.no_timestamp) c.output.timestamp = false;
  return c;
}

void report(const Globals& g, const std::string& msg) {
  if (!g.quiet) std::cout << msg << "\n";
}

void write_meta(const fs::path& path, const pvn::MetaList& meta, const pvn::RunConfig& c) {
  std::string text = pvn::format_meta(meta);
  std::istringstream cfg(pvn::serialize_config(c));
  std::string line, section;
  while (std::getline(cfg, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    text += "config." + section + "." + line + "\n";
  }
  pvn::write_file_atomic(path, text);
}

int cmd_solve(const Globals& g) {
  const pvn::RunConfig c = load(g);
  const pvn::SolveResult r = pvn::run_solve(c);
  const fs::path dir = c.output.dir;
  pvn::write_csv(dir / "eigenvalues.csv", pvn::spectrum_table(r.spectrum));
  if (r.cells) pvn::write_csv(dir / "cells.csv", *r.cells);
  write_meta(dir / "meta.txt", r.meta, c);
  for (const auto& [k, v] : r.meta)
    if (k == "n_kept" || k == "n_converged" || k == "max_abs_error" || k == "max_rel_error" ||
        k == "basis_size")
      report(g, k + " = " + v);
  report(g, "wrote " + (dir / "eigenvalues.csv").string());
  return 0;
}

int cmd_sweep(const Globals& g) {
  const pvn::RunConfig c = load(g);
  const fs::path path = fs::path(c.output.dir) / "convergence.csv";
  pvn::write_csv(path, pvn::run_sweep(c));
  report(g, "wrote " + path.string());
  return 0;
}

int cmd_efficiency(const Globals& g) {
  const pvn::RunConfig c = load(g);
  const pvn::CsvTable t = pvn::run_efficiency(c);
  const fs::path path = fs::path(c.output.dir) / "efficiency.csv";
  pvn::write_csv(path, t);
  for (const auto& row : t.rows)
    report(g, "hbar " + row[0] + " " + row[1] + ": " + row[2] + " functions / " + row[3] +
                  " levels = " + row[4] + " (" + row[5] + ")");
  report(g, "wrote " + path.string());
  return 0;
}

int cmd_scaling(const Globals& g) {
  const pvn::RunConfig c = load(g);
  std::vector<std::string> warnings;
  const pvn::CsvTable t = pvn::run_scaling(c, &warnings);
  const fs::path path = fs::path(c.output.dir) / "scaling.csv";
  pvn::write_csv(path, t);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  report(g, "wrote " + path.string() + " (seed " + std::to_string(c.run.seed) + ")");
  return 0;
}

int cmd_plot(const Globals& g) {
  const pvn::PlotKind kind = pvn::plot_kind_from_string(g.kind);
  const pvn::CsvTable t = pvn::read_csv(g.input);
  const std::string svg = pvn::render_plot(t, kind, {!g.no_timestamp});
  fs::path out = g.out ? fs::path(*g.out) : fs::path(g.input).replace_extension(".svg");
  pvn::write_file_atomic(out, svg);
  report(g, "wrote " + out.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic and biorthogonal von Neumann basis eigensolver"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Run configuration file");
  app.add_option("--out", g.out, "Output directory (plot: output SVG file)");
  app.add_option("--seed", g.seed, "Random seed, overrides run.seed");
  app.add_flag("--long-running", g.long_running, "Allow 2-D grids above 5000 points");
  app.add_flag("--quiet", g.quiet, "Only print errors");
  app.add_flag("--no-timestamp", g.no_timestamp, "Omit the generation time from SVG output");

  auto* solve = app.add_subcommand("solve", "Solve one eigenproblem");
  auto* sweep = app.add_subcommand("sweep", "Target-level error versus basis size");
  auto* eff = app.add_subcommand("efficiency", "Efficiency ratio versus hbar");
  auto* scaling = app.add_subcommand("scaling", "Phase-space volume and state-count scaling");
  auto* plot = app.add_subcommand("plot", "Render a CSV output as SVG");
  plot->add_option("--input", g.input, "CSV file")->required();
  plot->add_option("--kind", g.kind, "convergence | efficiency | scaling | cells")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(g);
    if (sweep->parsed()) return cmd_sweep(g);
    if (eff->parsed()) return cmd_efficiency(g);
    if (scaling->parsed()) return cmd_scaling(g);
    if (plot->parsed()) return cmd_plot(g);
  } catch (const pvn::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
