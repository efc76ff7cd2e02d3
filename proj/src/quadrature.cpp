#include "etasol/quadrature.hpp"

#include <cmath>

#include "etasol/geometry.hpp"

namespace etasol {

PeriodicGrid::PeriodicGrid(std::vector<double> lower, std::vector<double> periods, int resolution)
    : lower_(std::move(lower)), periods_(std::move(periods)), resolution_(resolution), count_(1) {
  if (lower_.empty() || lower_.size() != periods_.size()) {
    throw ValidationError("grid needs one lower bound and one period per axis");
  }
  if (resolution_ < 8) throw ValidationError("grid resolution must be at least 8, got " + std::to_string(resolution_));
  for (double p : periods_) {
    if (!(p > 0.0) || !std::isfinite(p)) throw ValidationError("grid periods must be positive and finite");
  }
  for (std::size_t a = 0; a < lower_.size(); ++a) count_ *= static_cast<std::size_t>(resolution_);
}

PeriodicGrid PeriodicGrid::over(const ManifoldSpec& torus, int resolution) {
  if (!torus.periodic()) throw PreconditionError("manifold '" + torus.name() + "' is not a periodic chart");
  const Box& b = torus.domain();
  std::vector<double> periods;
  for (std::size_t i = 0; i < b.dim(); ++i) periods.push_back(b.upper[i] - b.lower[i]);
  return PeriodicGrid(b.lower, std::move(periods), resolution);
}

Point PeriodicGrid::node(std::size_t k) const {
  const int n = dim();
  Point p(std::size_t(n), 0.0);
  for (int a = n - 1; a >= 0; --a) {
    const std::size_t i = k % std::size_t(resolution_);
    k /= std::size_t(resolution_);
    p[std::size_t(a)] = lower_[std::size_t(a)] + periods_[std::size_t(a)] * double(i) / double(resolution_);
  }
  return p;
}

double PeriodicGrid::cell_volume() const {
  double v = 1.0;
  for (double p : periods_) v *= p / double(resolution_);
  return v;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

void require_periodic(const PeriodicGrid& grid, const ScalarField& f, const char* what) {
  const int n = grid.dim();
  // For each axis, compare f on the face x_a = lower_a with the face x_a = lower_a + period_a.
  for (int a = 0; a < n; ++a) {
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
      Point p = grid.node(k);
      if (p[std::size_t(a)] != grid.lower()[std::size_t(a)]) continue;
      const double v0 = f(p);
      p[std::size_t(a)] += grid.periods()[std::size_t(a)];
      const double v1 = f(p);
      if (!std::isfinite(v0) || !std::isfinite(v1)) {
        throw PreconditionError(std::string(what) + " is not finite on the grid");
      }
      if (std::abs(v0 - v1) > 1e-10 * std::max(1.0, std::abs(v0))) {
        throw PreconditionError(std::string(what) + " is not periodic along axis " + std::to_string(a) + ": " +
                                std::to_string(v0) + " vs " + std::to_string(v1));
      }
    }
  }
}

namespace {

std::vector<double> node_values(const PeriodicGrid& grid, const ScalarField& f) {
  std::vector<double> v(grid.node_count());
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] = f(grid.node(k));
    if (!std::isfinite(v[k])) throw DomainError("integrand is not finite at a grid node");
  }
  return v;
}

double volume_factor(const LocalGeometry& geo) {
  const TensorValue g = geo.metric();
  const int n = geo.dim();
  // Determinant by Gaussian elimination with partial pivoting.
  std::vector<double> a = g.data;
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(a[std::size_t(r * n + c)]) > std::abs(a[std::size_t(piv * n + c)])) piv = r;
    }
    if (piv != c) {
      for (int k = 0; k < n; ++k) std::swap(a[std::size_t(c * n + k)], a[std::size_t(piv * n + k)]);
      det = -det;
    }
    const double d = a[std::size_t(c * n + c)];
    det *= d;
    for (int r = c + 1; r < n; ++r) {
      const double factor = a[std::size_t(r * n + c)] / d;
      for (int k = c; k < n; ++k) a[std::size_t(r * n + k)] -= factor * a[std::size_t(c * n + k)];
    }
  }
  return std::sqrt(det);
}

/// sum over nodes of w(p) sqrt(det g)(p) times the cell volume, with w built from the local geometry.
double integrate_geometric(const PeriodicGrid& grid, const ManifoldSpec& m,
                           const std::function<double(const LocalGeometry&)>& w) {
  std::vector<double> v(grid.node_count());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Point p = grid.node(k);
    LocalGeometry geo(m, p);
    v[k] = w(geo) * volume_factor(geo);
    if (!std::isfinite(v[k])) throw DomainError("integrand is not finite at a grid node");
  }
  return pairwise_sum(v) * grid.cell_volume();
}

void require_chart(const PeriodicGrid& grid, const ManifoldSpec& m) {
  if (grid.dim() != m.dim()) throw DimensionError("grid and manifold dimensions differ");
}

ScalarField as_field(const CompiledExpr& c) {
  return [&c](std::span<const double> p) { return c.eval(p); };
}

}  // namespace

double integrate(const PeriodicGrid& grid, const ScalarField& f) {
  require_periodic(grid, f, "integrand");
  const auto v = node_values(grid, f);
  return pairwise_sum(v) * grid.cell_volume();
}

double integrate(const PeriodicGrid& grid, const ManifoldSpec& m, const Expr& f) {
  require_chart(grid, m);
  const CompiledExpr c = m.compile(f);
  require_periodic(grid, as_field(c), "integrand");
  return integrate_geometric(grid, m, [&](const LocalGeometry& geo) { return c.eval(geo.point()); });
}

IdentityReport check_divergence_theorem(const PeriodicGrid& grid, const ManifoldSpec& m, std::span<const Expr> field,
                                        double tol) {
  require_chart(grid, m);
  if (field.size() != std::size_t(m.dim())) throw DimensionError("vector field needs one component per coordinate");
  std::vector<CompiledExpr> x;
  for (const auto& e : field) x.push_back(m.compile(e));
  for (const auto& c : x) require_periodic(grid, as_field(c), "vector field component");
  const double total = integrate_geometric(grid, m, [&](const LocalGeometry& geo) {
    std::vector<Jet1> xj;
    for (const auto& c : x) xj.push_back(c.eval_jet<1>(geo.point()));
    return divergence_vector<1>(geo, xj).value();
  });
  IdentityReport r = make_report("divergence-theorem", std::abs(total), {}, tol);
  r.extras = {{"integral", total}};
  return r;
}

IdentityReport check_parts(const PeriodicGrid& grid, const ManifoldSpec& m, const Expr& s, const Expr& f, double tol) {
  require_chart(grid, m);
  const CompiledExpr cs = m.compile(s);
  const CompiledExpr cf = m.compile(f);
  require_periodic(grid, as_field(cs), "s");
  require_periodic(grid, as_field(cf), "f");
  const int n = m.dim();
  const double pairing = integrate_geometric(grid, m, [&](const LocalGeometry& geo) {
    const Jet1 sj = cs.eval_jet<1>(geo.point());
    const Jet1 fj = cf.eval_jet<1>(geo.point());
    const auto& ginv = geo.g_inv<0>();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) acc += ginv[geo.idx(i, j)].value() * sj.d(i) * fj.d(j);
    }
    return acc;
  });
  const double lap_pairing = integrate_geometric(grid, m, [&](const LocalGeometry& geo) {
    const Jet2 fj = cf.eval_jet<2>(geo.point());
    const auto hess = hessian<2>(geo, fj);
    const auto& ginv = geo.g_inv<0>();
    double lap = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) lap += ginv[geo.idx(i, j)].value() * hess[geo.idx(i, j)].value();
    }
    return cs.eval(geo.point()) * lap;
  });
  IdentityReport r = make_report("integration-by-parts", std::abs(pairing + lap_pairing), {}, tol);
  r.extras = {{"gradient_pairing", pairing}, {"laplacian_pairing", lap_pairing}};
  return r;
}

}  // namespace etasol
