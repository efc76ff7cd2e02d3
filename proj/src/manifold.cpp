#include "etasol/manifold.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace etasol {

bool is_valid_coordinate_name(const std::string& name) {
  if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
  for (char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  static const std::set<std::string> kReserved = {"pi", "e", "exp", "ln", "sin", "cos", "sqrt", "pow"};
  return kReserved.count(name) == 0;
}

namespace {

void check_matrix_shape(const ExprMatrix& m, std::size_t n, const std::string& what) {
  if (m.size() != n) {
    throw ValidationError(what + " must have " + std::to_string(n) + " rows, has " + std::to_string(m.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) {
      throw ValidationError(what + " row " + std::to_string(i) + " must have " + std::to_string(n) + " entries");
    }
  }
}

}  // namespace

ManifoldSpec::ManifoldSpec(std::string name, std::vector<std::string> coords, Box domain, ExprMatrix metric,
                           std::optional<ExprMatrix> frame, bool periodic)
    : name_(std::move(name)),
      coords_(std::move(coords)),
      domain_(std::move(domain)),
      metric_(std::move(metric)),
      frame_(std::move(frame)),
      periodic_(periodic) {
  const std::size_t n = coords_.size();
  if (n == 0 || n > static_cast<std::size_t>(kMaxVars)) {
    throw ValidationError("dimension must be in [1, " + std::to_string(kMaxVars) + "], got " + std::to_string(n));
  }
  std::set<std::string> seen;
  for (const auto& c : coords_) {
    if (!is_valid_coordinate_name(c)) throw ValidationError("invalid coordinate name '" + c + "'");
    if (!seen.insert(c).second) throw ValidationError("duplicate coordinate '" + c + "'");
  }
  if (domain_.lower.size() != n || domain_.upper.size() != n) {
    throw ValidationError("domain must give an interval for each of the " + std::to_string(n) + " coordinates");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(domain_.lower[i] < domain_.upper[i])) {
      throw ValidationError("empty domain interval for coordinate '" + coords_[i] + "'");
    }
  }
  check_matrix_shape(metric_, n, "metric");
  if (frame_) check_matrix_shape(*frame_, n, "frame");

  auto compiled = std::make_shared<Compiled>();
  auto compile_matrix = [&](const ExprMatrix& m, std::vector<CompiledExpr>& out, const std::string& what) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        try {
          validate_powers_on_box(m[i][j], coords_, domain_);
          out.emplace_back(m[i][j], coords_);
        } catch (const ValidationError& err) {
          throw ValidationError(what + "[" + std::to_string(i) + "][" + std::to_string(j) + "]: " + err.what());
        }
      }
    }
  };
  compile_matrix(metric_, compiled->metric, "metric");
  if (frame_) compile_matrix(*frame_, compiled->frame, "frame");
  compiled_ = std::move(compiled);
}

const ExprMatrix& ManifoldSpec::frame() const {
  if (!frame_) throw PreconditionError("manifold '" + name_ + "' declares no frame");
  return *frame_;
}

std::vector<Jet3> ManifoldSpec::metric_jets(std::span<const double> p) const {
  const int n = dim();
  std::vector<Jet3> g(std::size_t(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      g[std::size_t(i * n + j)] = compiled_->metric[std::size_t(i * n + j)].eval_jet<3>(p);
      if (j != i) g[std::size_t(j * n + i)] = g[std::size_t(i * n + j)];
    }
  }
  return g;
}

std::vector<double> ManifoldSpec::metric_values_raw(std::span<const double> p) const {
  std::vector<double> g;
  g.reserve(compiled_->metric.size());
  for (const auto& c : compiled_->metric) g.push_back(c.eval(p));
  return g;
}

std::vector<double> ManifoldSpec::frame_values(std::span<const double> p) const {
  if (!frame_) throw PreconditionError("manifold '" + name_ + "' declares no frame");
  std::vector<double> e;
  e.reserve(compiled_->frame.size());
  for (const auto& c : compiled_->frame) e.push_back(c.eval(p));
  return e;
}

ManifoldSpec ManifoldSpec::scaled(double factor, std::string new_name) const {
  if (!(factor > 0.0)) throw ValidationError("metric scale factor must be positive");
  ExprMatrix m = metric_;
  for (auto& row : m) {
    for (auto& e : row) e = Expr::number(factor) * e;
  }
  std::optional<ExprMatrix> frame;
  if (frame_) {
    frame = *frame_;
    const double s = 1.0 / std::sqrt(factor);
    for (auto& row : *frame) {
      for (auto& e : row) e = Expr::number(s) * e;
    }
  }
  return ManifoldSpec(std::move(new_name), coords_, domain_, std::move(m), std::move(frame), periodic_);
}

}  // namespace etasol
