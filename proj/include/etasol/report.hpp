#pragma once

#include <string>
#include <utility>
#include <vector>

#include "etasol/tensor.hpp"

namespace etasol {

/// Outcome of checking one identity, at a single point or merged over a sweep.
/// An informational report is recorded but not asserted: either the identity
/// is reported for reference only or its hypotheses failed.
struct IdentityReport {
  std::string name;
  double max_residual = 0.0;
  std::vector<double> worst_point;
  double tolerance = 0.0;
  bool pass = true;
  bool informational = false;
  std::string note;
  std::vector<double> residuals;  // per point, filled by sweeps on request
  std::vector<std::pair<std::string, double>> extras;

  bool failed() const noexcept { return !informational && !pass; }
  /// Value of a named extra, NaN when absent.
  double extra(const std::string& key) const;

  friend bool operator==(const IdentityReport&, const IdentityReport&) = default;
};

/// Single-point report; pass is max_residual <= tolerance (false for NaN).
IdentityReport make_report(std::string name, double residual, std::span<const double> point, double tolerance);

/// Same, marked informational with a note.
IdentityReport not_applicable(std::string name, double residual, std::span<const double> point, double tolerance,
                              std::string why);

/// Merge per-point reports of one identity, given in point order. The worst
/// point is the first point attaining the largest residual among asserted
/// points; points where the identity was not applicable are counted in the note.
IdentityReport merge_reports(const std::vector<IdentityReport>& per_point, bool keep_residuals = false);

/// Merge a sweep given as one report list per point (same names in the same
/// order at every point).
std::vector<IdentityReport> merge_sweep(const std::vector<std::vector<IdentityReport>>& per_point,
                                        bool keep_residuals = false);

bool all_pass(const std::vector<IdentityReport>& reports);

}  // namespace etasol
