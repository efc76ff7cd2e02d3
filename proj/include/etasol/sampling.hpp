#pragma once

#include <cstdint>
#include <vector>

#include "etasol/expr.hpp"

namespace etasol {

using Point = std::vector<double>;

/// `count` points uniform in the box, drawn from a 64-bit Mersenne Twister
/// seeded with `seed`. Throws ValidationError when count is 0.
std::vector<Point> sample_points(const Box& box, std::uint64_t seed, std::size_t count);

/// Regular lattice with `per_axis` nodes per coordinate, corners included.
std::vector<Point> lattice_points(const Box& box, int per_axis);

}  // namespace etasol
