#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pvn/error.hpp"
#include "pvn/linalg.hpp"

namespace pvn {

enum class BasisLabel { fgh, vn, pvn, bvn };

inline std::string_view to_string(BasisLabel b) {
  switch (b) {
    case BasisLabel::fgh: return "fgh";
    case BasisLabel::vn: return "vn";
    case BasisLabel::pvn: return "pvn";
    case BasisLabel::bvn: return "bvn";
  }
  return "?";
}

inline BasisLabel basis_from_string(std::string_view s) {
  if (s == "fgh") return BasisLabel::fgh;
  if (s == "vn") return BasisLabel::vn;
  if (s == "pvn") return BasisLabel::pvn;
  if (s == "bvn") return BasisLabel::bvn;
  throw ContractViolation("unknown basis '" + std::string(s) + "'");
}

/// Ascending eigenvalues of one basis calculation.
struct Spectrum {
  std::vector<double> energies;
  std::optional<ComplexMatrix> eigenvectors;  // columns are coefficient vectors
  BasisLabel basis = BasisLabel::fgh;
  int basis_size = 0;
  double metric_condition = 1.0;  // cond of the metric actually factored
  int truncated = 0;              // metric directions dropped by spectral reduction
};

}  // namespace pvn
