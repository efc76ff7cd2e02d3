#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "etasol/geometry.hpp"
#include "etasol/report.hpp"

namespace etasol {

/// Per-identity multiple of the base tolerance. Unknown names get 1.
double tolerance_factor(std::string_view identity) noexcept;
inline double scaled_tolerance(std::string_view identity, double base) noexcept {
  return base * tolerance_factor(identity);
}

/// Gamma^k_{ij} from central differences of the plain metric values with step h,
/// inverted with Eigen. Indexed (k, i, j).
TensorValue christoffel_finite_difference(const ManifoldSpec& m, std::span<const double> p, double h = 1e-5);

/// Structural invariants of the metric and its curvature at one point:
/// metric-symmetry, frame-orthonormality (only with a frame), metric-compatibility,
/// riemann-antisymmetry, first-bianchi, ricci-symmetry, contracted-bianchi and
/// christoffel-finite-difference.
std::vector<IdentityReport> structural_checks(const ManifoldSpec& m, const LocalGeometry& geo, double base_tol);

}  // namespace etasol
