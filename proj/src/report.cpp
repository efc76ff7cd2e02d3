#include "etasol/report.hpp"

#include <cmath>
#include <limits>

#include "etasol/error.hpp"

namespace etasol {

double IdentityReport::extra(const std::string& key) const {
  for (const auto& [k, v] : extras) {
    if (k == key) return v;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

IdentityReport make_report(std::string name, double residual, std::span<const double> point, double tolerance) {
  IdentityReport r;
  r.name = std::move(name);
  r.max_residual = residual;
  r.worst_point.assign(point.begin(), point.end());
  r.tolerance = tolerance;
  r.pass = residual <= tolerance;
  return r;
}

IdentityReport not_applicable(std::string name, double residual, std::span<const double> point, double tolerance,
                              std::string why) {
  IdentityReport r = make_report(std::move(name), residual, point, tolerance);
  r.informational = true;
  r.note = std::move(why);
  return r;
}

namespace {

bool worse(double candidate, double current) {
  if (std::isnan(candidate)) return !std::isnan(current);
  return candidate > current;
}

}  // namespace

IdentityReport merge_reports(const std::vector<IdentityReport>& per_point, bool keep_residuals) {
  if (per_point.empty()) throw PreconditionError("nothing to merge");
  std::size_t asserted = 0;
  for (const auto& r : per_point) asserted += r.informational ? 0 : 1;
  const bool use_all = asserted == 0;

  IdentityReport out;
  out.name = per_point.front().name;
  out.tolerance = per_point.front().tolerance;
  out.informational = use_all;
  bool first = true;
  std::size_t worst_index = 0;
  for (std::size_t i = 0; i < per_point.size(); ++i) {
    const auto& r = per_point[i];
    if (r.name != out.name) throw PreconditionError("merging reports of different identities");
    if (keep_residuals) out.residuals.push_back(r.max_residual);
    if (!use_all && r.informational) continue;
    if (first || worse(r.max_residual, out.max_residual)) {
      out.max_residual = r.max_residual;
      out.worst_point = r.worst_point;
      out.extras = r.extras;
      worst_index = i;
      first = false;
    }
  }
  out.pass = out.max_residual <= out.tolerance;
  const std::size_t skipped = per_point.size() - asserted;
  if (use_all) {
    out.note = per_point[worst_index].note;
    if (per_point.size() > 1 && !out.note.empty()) out.note += " (at every sampled point)";
  } else if (skipped > 0) {
    out.note = "not applicable at " + std::to_string(skipped) + " of " + std::to_string(per_point.size()) +
               " points: " + [&] {
                 for (const auto& r : per_point) {
                   if (r.informational) return r.note;
                 }
                 return std::string();
               }();
  } else {
    out.note = per_point[worst_index].note;
  }
  return out;
}

std::vector<IdentityReport> merge_sweep(const std::vector<std::vector<IdentityReport>>& per_point,
                                        bool keep_residuals) {
  if (per_point.empty()) return {};
  const std::size_t k = per_point.front().size();
  std::vector<IdentityReport> out;
  out.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<IdentityReport> column;
    column.reserve(per_point.size());
    for (const auto& row : per_point) {
      if (row.size() != k) throw PreconditionError("sweep rows report different identity counts");
      column.push_back(row[j]);
    }
    out.push_back(merge_reports(column, keep_residuals));
  }
  return out;
}

bool all_pass(const std::vector<IdentityReport>& reports) {
  for (const auto& r : reports) {
    if (r.failed()) return false;
  }
  return true;
}

}  // namespace etasol
