#pragma once

// JSON spec documents (plain manifolds and warped products) and JSON reports.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "etasol/report.hpp"
#include "etasol/soliton.hpp"
#include "etasol/warped.hpp"

namespace etasol {

struct ExpectedValue {
  std::string name;
  double value = 0.0;
  std::string source;  // where the number comes from
};

/// A loaded spec: either a manifold or a warped product, with optional
/// soliton data (on the manifold, or on the base of a warped product).
struct SpecDocument {
  std::string name;
  std::string description;
  std::optional<ManifoldSpec> manifold;
  std::optional<WarpedProductSpec> warped;
  std::optional<SolitonSpec> soliton;
  std::vector<ExpectedValue> expected;

  bool is_warped() const noexcept { return warped.has_value(); }
  /// The chart that gets sampled: the manifold, or the assembled product.
  const ManifoldSpec& chart() const;
  /// Soliton data on chart(); for a warped product f is lifted and an
  /// explicit xi gets zero fiber components.
  std::optional<SolitonSpec> chart_soliton() const;
  /// Expected value by name, or nullopt.
  std::optional<double> expected_value(std::string_view key) const;
};

/// Throws SpecError naming the JSON location ("/metric/1/0: ...") of the problem.
SpecDocument parse_spec(const nlohmann::json& j);
SpecDocument parse_spec_text(std::string_view text);
/// Throws SpecError when the file cannot be read.
SpecDocument load_spec_file(const std::string& path);

nlohmann::json manifold_to_json(const ManifoldSpec& m);
nlohmann::json spec_to_json(const SpecDocument& d);

struct CheckReport {
  std::string version;
  std::string spec;
  std::uint64_t seed = 0;
  std::size_t points = 0;
  double tolerance = 0.0;
  std::optional<double> lambda;
  std::optional<double> mu;
  std::vector<IdentityReport> identities;
  bool pass = true;

  friend bool operator==(const CheckReport&, const CheckReport&) = default;
};

/// Report JSON with "schema": 1. Non-finite numbers are written as null.
nlohmann::ordered_json report_to_json(const CheckReport& r);
/// Throws SpecError on a malformed report or an unknown schema.
CheckReport report_from_json(const nlohmann::ordered_json& j);
/// Two-space indented JSON followed by a newline.
std::string dump_report(const CheckReport& r);

}  // namespace etasol
