#pragma once

// CSV tables: 17 significant digits, atomic writes, header-checked reads.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pvn/error.hpp"

namespace pvn {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
  /// Index of a required column; the error names it.
  int require(const std::string& name) const {
    const int c = column(name);
    if (c < 0) throw ContractViolation("CSV is missing column '" + name + "'");
    return c;
  }
  double number(std::size_t row, int col) const {
    const std::string& s = rows.at(row).at(col);
    try {
      return std::stod(s);
    } catch (const std::exception&) {
      throw ContractViolation("CSV row " + std::to_string(row + 2) + ": '" + s +
                              "' is not a number");
    }
  }
};

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_number(long long v) { return std::to_string(v); }
inline std::string csv_number(int v) { return std::to_string(v); }

/// Writes text to path through a temporary file in the same directory and a
/// rename, so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw Error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

inline std::string format_csv(const CsvTable& t) {
  std::ostringstream o;
  for (std::size_t i = 0; i < t.header.size(); ++i) o << (i ? "," : "") << t.header[i];
  o << "\n";
  for (const auto& r : t.rows) {
    if (r.size() != t.header.size())
      throw ContractViolation("CSV row has " + std::to_string(r.size()) + " fields, header has " +
                              std::to_string(t.header.size()));
    for (std::size_t i = 0; i < r.size(); ++i) o << (i ? "," : "") << r[i];
    o << "\n";
  }
  return o.str();
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& t) {
  write_file_atomic(path, format_csv(t));
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("cannot open '" + path.string() + "'");
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string f;
    while (std::getline(ss, f, ',')) {
      if (!f.empty() && f.back() == '\r') f.pop_back();
      out.push_back(f);
    }
    return out;
  };
  if (!std::getline(in, line) || line.empty())
    throw ContractViolation("'" + path.string() + "' is empty");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto r = split(line);
    if (r.size() != t.header.size())
      throw ContractViolation("'" + path.string() + "': row " + std::to_string(t.rows.size() + 2) +
                              " has " + std::to_string(r.size()) + " fields");
    t.rows.push_back(std::move(r));
  }
  return t;
}

}  // namespace pvn
