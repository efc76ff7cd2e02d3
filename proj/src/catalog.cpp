#include "etasol/catalog.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

namespace etasol {

namespace {

struct RawEntry {
  const char* id;
  const char* json;
};

constexpr RawEntry kRaw[] = {
#include "catalog_data.inc"
};

const RawEntry* find_raw(std::string_view id) {
  for (const auto& e : kRaw) {
    if (id == e.id) return &e;
  }
  return nullptr;
}

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::string, std::unique_ptr<SpecDocument>, std::less<>>& cache() {
  static std::map<std::string, std::unique_ptr<SpecDocument>, std::less<>> c;
  return c;
}

}  // namespace

std::vector<std::string> catalog_ids() {
  std::vector<std::string> ids;
  for (const auto& e : kRaw) ids.emplace_back(e.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

bool catalog_contains(std::string_view id) { return find_raw(id) != nullptr; }

std::string_view catalog_source(std::string_view id) {
  const RawEntry* raw = find_raw(id);
  if (!raw) throw SpecError("unknown catalog id '" + std::string(id) + "'");
  return raw->json;
}

const SpecDocument& catalog_get(std::string_view id) {
  const RawEntry* raw = find_raw(id);
  if (!raw) throw SpecError("unknown catalog id '" + std::string(id) + "'");
  std::lock_guard lock(cache_mutex());
  auto& c = cache();
  auto it = c.find(id);
  if (it == c.end()) {
    SpecDocument doc;
    try {
      doc = parse_spec_text(raw->json);
    } catch (const SpecError& e) {
      throw SpecError("catalog entry '" + std::string(id) + "': " + e.what());
    }
    it = c.emplace(std::string(id), std::make_unique<SpecDocument>(std::move(doc))).first;
  }
  return *it->second;
}

std::vector<Point> sample_points(const SpecDocument& entry, std::uint64_t seed, std::size_t count) {
  return sample_points(entry.chart().domain(), seed, count);
}

}  // namespace etasol
