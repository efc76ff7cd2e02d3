#pragma once

// Built-in fixtures, shipped in the same JSON format the CLI reads.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "etasol/sampling.hpp"
#include "etasol/spec_io.hpp"

namespace etasol {

/// Catalog ids in sorted order.
std::vector<std::string> catalog_ids();

bool catalog_contains(std::string_view id);

/// The parsed entry; entries are parsed once and shared. Throws SpecError for an unknown id.
const SpecDocument& catalog_get(std::string_view id);

/// The fixture's JSON text.
std::string_view catalog_source(std::string_view id);

/// Seeded uniform points in the domain box of the entry's chart.
std::vector<Point> sample_points(const SpecDocument& entry, std::uint64_t seed, std::size_t count);

}  // namespace etasol
