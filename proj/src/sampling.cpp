#include "etasol/sampling.hpp"

#include <random>

#include "etasol/error.hpp"

namespace etasol {

std::vector<Point> sample_points(const Box& box, std::uint64_t seed, std::size_t count) {
  if (count == 0) throw ValidationError("sample count must be at least 1");
  std::mt19937_64 rng(seed);
  // 53 random bits mapped to [0, 1); std::uniform_real_distribution is not
  // specified bit-for-bit across standard libraries.
  auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<Point> pts(count, Point(box.dim()));
  for (auto& p : pts) {
    for (std::size_t i = 0; i < box.dim(); ++i) {
      p[i] = box.lower[i] + uniform() * (box.upper[i] - box.lower[i]);
    }
  }
  return pts;
}

std::vector<Point> lattice_points(const Box& box, int per_axis) {
  if (per_axis < 2) throw ValidationError("lattice needs at least 2 nodes per axis");
  const std::size_t n = box.dim();
  std::vector<Point> pts;
  std::vector<int> idx(n, 0);
  while (true) {
    Point p(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * idx[i] / (per_axis - 1);
    }
    pts.push_back(std::move(p));
    std::size_t a = 0;
    while (a < n && ++idx[a] == per_axis) idx[a++] = 0;
    if (a == n) break;
  }
  return pts;
}

}  // namespace etasol
