#pragma once

// Verification drivers behind the CLI commands.

#include <cstdint>
#include <string>
#include <vector>

#include "etasol/spec_io.hpp"

namespace etasol {

const char* version() noexcept;

struct CheckOptions {
  std::uint64_t seed = 42;
  std::size_t points = 200;
  double tolerance = 1e-8;  // base tolerance, scaled per identity
  unsigned threads = 0;     // 0: hardware concurrency
  bool keep_residuals = false;
};

/// Per-point identities at one chart point, in report order. `sol` is the
/// soliton on the chart (may be null); `base_sol` is the soliton on the base
/// of a warped product (may be null).
std::vector<IdentityReport> point_identities(const SpecDocument& doc, const CompiledSoliton* sol,
                                             const CompiledSoliton* base_sol, std::span<const double> p,
                                             double tol);

/// Structural checks, the applicable soliton suites, and for warped products
/// the lemma and construction checks. The result does not depend on the
/// thread count. Throws SingularMetricError or DomainError for bad inputs.
CheckReport run_check(const SpecDocument& doc, const CheckOptions& opt);

struct FitOptions {
  std::uint64_t seed = 42;
  std::size_t points = 200;
  FitMode mode = FitMode::Eta;
};

/// fit_constants over seeded samples of the chart. Throws PreconditionError without a potential.
FitResult run_fit(const SpecDocument& doc, const FitOptions& opt);

struct DescribeSummary {
  std::string name;
  int dim = 0;
  std::size_t points = 0;
  double scal_min = 0.0;
  double scal_max = 0.0;
  double einstein_deviation = 0.0;  // max |S - (scal / n) g|_g
  double condition_max = 0.0;
  bool has_frame = false;
  double frame_defect = 0.0;        // max |E g E^T - I|
  std::vector<double> sample_point; // first sample
  TensorValue frame_ricci;          // S in the frame at the first sample
};

DescribeSummary run_describe(const SpecDocument& doc, std::uint64_t seed, std::size_t points);

}  // namespace etasol
