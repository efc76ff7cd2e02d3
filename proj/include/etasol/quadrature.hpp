#pragma once

// Trapezoid quadrature on periodic boxes (flat tori), exact for trigonometric
// polynomials of degree below resolution / 2.

#include <functional>
#include <span>
#include <vector>

#include "etasol/manifold.hpp"
#include "etasol/report.hpp"
#include "etasol/sampling.hpp"

namespace etasol {

class PeriodicGrid {
 public:
  /// Throws ValidationError for resolution < 8, non-positive periods or mismatched sizes.
  PeriodicGrid(std::vector<double> lower, std::vector<double> periods, int resolution);
  /// Grid over a periodic chart's domain box. Throws PreconditionError when the chart is not periodic.
  static PeriodicGrid over(const ManifoldSpec& torus, int resolution);

  int dim() const noexcept { return static_cast<int>(lower_.size()); }
  const std::vector<double>& lower() const noexcept { return lower_; }
  const std::vector<double>& periods() const noexcept { return periods_; }
  int resolution() const noexcept { return resolution_; }
  std::size_t node_count() const noexcept { return count_; }
  /// Node k in row-major order (last axis fastest).
  Point node(std::size_t k) const;
  double cell_volume() const;

 private:
  std::vector<double> lower_;
  std::vector<double> periods_;
  int resolution_;
  std::size_t count_;
};

using ScalarField = std::function<double(std::span<const double>)>;

/// Pairwise (cascade) sum in a fixed order.
double pairwise_sum(std::span<const double> values);

/// Throws PreconditionError when f differs by more than 1e-10 (relative to
/// max(1, |f|)) between opposite faces of the box.
void require_periodic(const PeriodicGrid& grid, const ScalarField& f, const char* what = "field");

/// Sum of f over the nodes times the cell volume (flat measure).
double integrate(const PeriodicGrid& grid, const ScalarField& f);

/// Integral of f against sqrt(det g) of the chart.
double integrate(const PeriodicGrid& grid, const ManifoldSpec& m, const Expr& f);

/// |integral of div X| ("divergence-theorem").
IdentityReport check_divergence_theorem(const PeriodicGrid& grid, const ManifoldSpec& m, std::span<const Expr> field,
                                        double tol = 1e-8);

/// |integral <grad s, grad f> + integral s Lap f| ("integration-by-parts").
/// Extras: "gradient_pairing" and "laplacian_pairing" (the two integrals).
IdentityReport check_parts(const PeriodicGrid& grid, const ManifoldSpec& m, const Expr& s, const Expr& f,
                           double tol = 1e-8);

}  // namespace etasol
