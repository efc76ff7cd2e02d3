#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "etasol/expr.hpp"
#include "etasol/jet.hpp"

namespace etasol {

using ExprMatrix = std::vector<std::vector<Expr>>;

/// A chart with a metric: coordinates, a sampling box, the metric as an
/// expression matrix and optionally an orthonormal frame (row a holds the
/// coordinate components of E_a).
class ManifoldSpec {
 public:
  ManifoldSpec(std::string name, std::vector<std::string> coords, Box domain, ExprMatrix metric,
               std::optional<ExprMatrix> frame = std::nullopt, bool periodic = false);

  const std::string& name() const noexcept { return name_; }
  int dim() const noexcept { return static_cast<int>(coords_.size()); }
  const std::vector<std::string>& coords() const noexcept { return coords_; }
  const Box& domain() const noexcept { return domain_; }
  bool periodic() const noexcept { return periodic_; }

  const ExprMatrix& metric() const noexcept { return metric_; }
  const Expr& metric(int i, int j) const { return metric_[std::size_t(i)][std::size_t(j)]; }
  bool has_frame() const noexcept { return frame_.has_value(); }
  const ExprMatrix& frame() const;

  /// Bind an expression over this chart's coordinates.
  CompiledExpr compile(const Expr& e) const { return CompiledExpr(e, coords_); }

  /// Metric jets from the upper triangle, mirrored (row-major n x n).
  std::vector<Jet3> metric_jets(std::span<const double> p) const;

  /// Every metric entry evaluated on its own (both triangles), row-major.
  std::vector<double> metric_values_raw(std::span<const double> p) const;

  /// Frame components E_a^i, row-major. Throws PreconditionError without a frame.
  std::vector<double> frame_values(std::span<const double> p) const;

  /// Same spec under a new name with the metric multiplied by a positive constant.
  ManifoldSpec scaled(double factor, std::string new_name) const;

 private:
  struct Compiled {
    std::vector<CompiledExpr> metric;  // row-major
    std::vector<CompiledExpr> frame;   // row-major, empty without a frame
  };

  std::string name_;
  std::vector<std::string> coords_;
  Box domain_;
  ExprMatrix metric_;
  std::optional<ExprMatrix> frame_;
  bool periodic_ = false;
  std::shared_ptr<const Compiled> compiled_;
};

/// True for names usable as coordinates: [A-Za-z_][A-Za-z0-9_]*, not a constant or function.
bool is_valid_coordinate_name(const std::string& name);

}  // namespace etasol
