#include "etasol/warped.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "etasol/checks.hpp"
#include "etasol/sampling.hpp"

namespace etasol {

namespace {

std::vector<std::string> rename_fiber(const ManifoldSpec& base, const ManifoldSpec& fiber) {
  std::set<std::string> taken(base.coords().begin(), base.coords().end());
  std::vector<std::string> out;
  for (const auto& c : fiber.coords()) {
    std::string name = c;
    while (taken.count(name) != 0) name += "_f";
    taken.insert(name);
    out.push_back(name);
  }
  return out;
}

}  // namespace

WarpedProductSpec::WarpedProductSpec(std::string name, ManifoldSpec base, ManifoldSpec fiber, Expr warp,
                                     std::optional<SolitonSpec> soliton)
    : name_(std::move(name)),
      base_(std::move(base)),
      fiber_(std::move(fiber)),
      warp_(std::move(warp)),
      soliton_(std::move(soliton)) {
  if (fiber_.dim() < 2) throw ValidationError("warped product needs a fiber of dimension at least 2");
  if (base_.dim() + fiber_.dim() > kMaxVars) {
    throw ValidationError("product dimension exceeds " + std::to_string(kMaxVars));
  }
  try {
    validate_powers_on_box(warp_, base_.coords(), base_.domain());
    phi_ = CompiledExpr(warp_, base_.coords());
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("warp: ") + e.what());
  }
  for (const auto& p : lattice_points(base_.domain(), 5)) {
    const double v = phi_.eval(p);
    if (!(v > 0.0)) {
      throw ValidationError("warp function must be positive on the base domain, got " + detail::format_value(v));
    }
  }
  if (soliton_) CompiledSoliton(base_, *soliton_);
  fiber_coords_ = rename_fiber(base_, fiber_);
  product_.emplace(build_warped(*this));
}

ManifoldSpec build_warped(const WarpedProductSpec& w) {
  const ManifoldSpec& B = w.base();
  const ManifoldSpec& F = w.fiber();
  const int n = B.dim();
  const int m = F.dim();
  std::vector<std::pair<std::string, std::string>> mapping;
  std::vector<std::string> fiber_coords = w.product_fiber_coords();
  if (fiber_coords.empty()) fiber_coords = rename_fiber(B, F);
  for (int a = 0; a < m; ++a) mapping.emplace_back(F.coords()[std::size_t(a)], fiber_coords[std::size_t(a)]);

  std::vector<std::string> coords = B.coords();
  coords.insert(coords.end(), fiber_coords.begin(), fiber_coords.end());
  Box box = B.domain();
  box.lower.insert(box.lower.end(), F.domain().lower.begin(), F.domain().lower.end());
  box.upper.insert(box.upper.end(), F.domain().upper.begin(), F.domain().upper.end());

  const bool unit = w.trivial_warp();
  const Expr phi2 = pow(w.warp(), Expr::number(2.0));
  ExprMatrix g(std::size_t(n + m), std::vector<Expr>(std::size_t(n + m), Expr::number(0.0)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g[std::size_t(i)][std::size_t(j)] = B.metric(i, j);
  }
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const Expr gf = F.metric(a, b).rename(mapping);
      g[std::size_t(n + a)][std::size_t(n + b)] = unit || gf.is_number(0.0) ? gf : phi2 * gf;
    }
  }

  std::optional<ExprMatrix> frame;
  if (B.has_frame() && F.has_frame()) {
    frame.emplace(std::size_t(n + m), std::vector<Expr>(std::size_t(n + m), Expr::number(0.0)));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) (*frame)[std::size_t(i)][std::size_t(j)] = B.frame()[std::size_t(i)][std::size_t(j)];
    }
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        const Expr e = F.frame()[std::size_t(a)][std::size_t(b)].rename(mapping);
        (*frame)[std::size_t(n + a)][std::size_t(n + b)] = unit || e.is_number(0.0) ? e : e / w.warp();
      }
    }
  }
  const std::string name = w.name().empty() ? B.name() + " x " + F.name() : w.name();
  return ManifoldSpec(name, std::move(coords), std::move(box), std::move(g), std::move(frame),
                      B.periodic() && F.periodic());
}

namespace {

struct WarpAt {
  double phi = 0.0;
  double lap = 0.0;
  double grad2 = 0.0;           // |grad phi|^2
  std::vector<double> dphi;     // d_i phi
  std::vector<double> hess;     // Hess phi, row-major
};

WarpAt warp_at(const WarpedProductSpec& w, const LocalGeometry& geo) {
  const int n = geo.dim();
  const Jet2 ph = w.compiled_warp().eval_jet<2>(geo.point());
  if (!(ph.value() > 0.0)) {
    throw DomainError("warp function must be positive, got " + detail::format_value(ph.value()));
  }
  WarpAt out;
  out.phi = ph.value();
  const auto h = hessian<2>(geo, ph);
  const auto& gi = geo.g_inv<0>();
  for (int i = 0; i < n; ++i) out.dphi.push_back(ph.d(i));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t a = geo.idx(i, j);
      out.hess.push_back(h[a].value());
      out.lap += gi[a].value() * h[a].value();
      out.grad2 += gi[a].value() * out.dphi[std::size_t(i)] * out.dphi[std::size_t(j)];
    }
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> split(const WarpedProductSpec& w, std::span<const double> p) {
  if (static_cast<int>(p.size()) != w.n() + w.m()) {
    throw DimensionError("product point needs " + std::to_string(w.n() + w.m()) + " coordinates, got " +
                         std::to_string(p.size()));
  }
  return {std::vector<double>(p.begin(), p.begin() + w.n()), std::vector<double>(p.begin() + w.n(), p.end())};
}

}  // namespace

LemmaBlocks lemma_ricci_at(const WarpedProductSpec& w, std::span<const double> base_point,
                           std::span<const double> fiber_point) {
  const int n = w.n();
  const int m = w.m();
  const LocalGeometry gb(w.base(), base_point);
  const LocalGeometry gf(w.fiber(), fiber_point);
  const WarpAt wa = warp_at(w, gb);

  LemmaBlocks out;
  out.base = gb.ricci();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out.base(i, j) -= m / wa.phi * wa.hess[gb.idx(i, j)];
  }
  out.mixed.assign(std::size_t(n * m), 0.0);
  out.fiber = gf.ricci();
  const double c = wa.lap / wa.phi + (m - 1) * wa.grad2 / (wa.phi * wa.phi);
  const auto& g_f = gf.g<0>();
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) out.fiber(a, b) -= c * wa.phi * wa.phi * g_f[gf.idx(a, b)].value();
  }
  return out;
}

TensorValue assemble(const LemmaBlocks& blocks, std::span<const double> product_point) {
  const int n = blocks.base.dim;
  const int m = blocks.fiber.dim;
  TensorValue t = TensorValue::zeros(0, 2, n + m, product_point);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) t(i, j) = blocks.base(i, j);
  }
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < m; ++a) {
      t(i, n + a) = blocks.mixed[std::size_t(i * m + a)];
      t(n + a, i) = blocks.mixed[std::size_t(i * m + a)];
    }
  }
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) t(n + a, n + b) = blocks.fiber(a, b);
  }
  return t;
}

IdentityReport verify_lemma(const WarpedProductSpec& w, std::span<const std::vector<double>> samples, double tol) {
  const double t = scaled_tolerance("warped-ricci-lemma", tol);
  std::vector<IdentityReport> per;
  for (const auto& p : samples) {
    const auto [pb, pf] = split(w, p);
    TensorValue d = ricci_at(w.product(), p).ricci;
    d -= assemble(lemma_ricci_at(w, pb, pf), p);
    per.push_back(make_report("warped-ricci-lemma", max_abs(d), p, t));
  }
  if (per.empty()) throw PreconditionError("no sample points");
  return merge_reports(per);
}

namespace {

double k_with(const WarpedProductSpec& w, const LocalGeometry& gb, const CompiledExpr& f, double lambda) {
  const int n = gb.dim();
  const WarpAt wa = warp_at(w, gb);
  const Jet1 fj = f.eval_jet<1>(gb.point());
  const auto& gi = gb.g_inv<0>();
  double grad_f_phi = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) grad_f_phi += gi[gb.idx(i, j)].value() * fj.d(i) * wa.dphi[std::size_t(j)];
  }
  return -lambda * wa.phi * wa.phi + wa.phi * wa.lap + (w.m() - 1) * wa.grad2 - wa.phi * grad_f_phi;
}

}  // namespace

double k_at(const WarpedProductSpec& w, const Expr& f, double lambda, std::span<const double> base_point) {
  const LocalGeometry gb(w.base(), base_point);
  return k_with(w, gb, w.base().compile(f), lambda);
}

std::vector<IdentityReport> construction_verify(const WarpedProductSpec& w, const Expr& f, double lambda, double mu,
                                                std::span<const std::vector<double>> samples, double tol) {
  if (samples.empty()) throw PreconditionError("no sample points");
  const CompiledExpr fb = w.base().compile(f);
  const int m = w.m();

  // Base equation.
  std::vector<IdentityReport> base_reports;
  // Fiber: S_F - k g_F with k from the matching base point.
  std::vector<double> ks;
  std::vector<TensorValue> fiber_res;
  std::vector<TensorValue> fiber_g;
  for (const auto& p : samples) {
    const auto [pb, pf] = split(w, p);
    const LocalGeometry gb(w.base(), pb);
    const TensorValue r = base_equation_residual(gb, fb, w.compiled_warp(), m, lambda, mu);
    base_reports.push_back(
        make_report("warped-base-equation", max_abs(r), p, scaled_tolerance("warped-base-equation", tol)));
    const double k = k_with(w, gb, fb, lambda);
    ks.push_back(k);
    const LocalGeometry gf(w.fiber(), pf);
    TensorValue res = gf.ricci();
    const TensorValue gF = gf.metric();
    TensorValue kg = gF;
    kg *= k;
    res -= kg;
    fiber_res.push_back(std::move(res));
    fiber_g.push_back(gF);
  }
  std::vector<IdentityReport> out;
  out.push_back(merge_reports(base_reports));

  {
    const double t = scaled_tolerance("warped-fiber-einstein", tol);
    const auto [kmin, kmax] = std::minmax_element(ks.begin(), ks.end());
    const double spread = *kmax - *kmin;
    // Best c with S_F - k g_F = c g_F, and how far the residual is from that form.
    double num = 0.0, den = 0.0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      for (std::size_t a = 0; a < fiber_g[s].data.size(); ++a) {
        num += fiber_res[s].data[a] * fiber_g[s].data[a];
        den += fiber_g[s].data[a] * fiber_g[s].data[a];
      }
    }
    const double c = den > 0.0 ? num / den : 0.0;
    double ratio_dev = 0.0;
    double worst = -1.0;
    std::size_t worst_at = 0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      const double r = max_abs(fiber_res[s]);
      if (r > worst || std::isnan(r)) {
        worst = r;
        worst_at = s;
      }
      for (std::size_t a = 0; a < fiber_g[s].data.size(); ++a) {
        ratio_dev = std::max(ratio_dev, std::abs(fiber_res[s].data[a] - c * fiber_g[s].data[a]));
      }
    }
    IdentityReport r = make_report("warped-fiber-einstein", worst, samples[worst_at], t);
    r.extras = {{"k", ks.front()}, {"k_spread", spread}, {"fiber_ratio", c}, {"fiber_ratio_deviation", ratio_dev}};
    if (!(spread <= t)) {
      r.pass = false;
      r.note = "k non-constant across base points (spread " + detail::format_value(spread) + ")";
    } else if (!r.pass) {
      r.note = "S_F - k g_F = c g_F with c = " + detail::format_value(c);
    }
    out.push_back(std::move(r));
  }

  {
    const ManifoldSpec& M = w.product();
    SolitonSpec lifted;
    lifted.potential = f;
    lifted.lambda = lambda;
    lifted.mu = mu;
    const CompiledSoliton cs(M, lifted);
    std::vector<IdentityReport> per;
    for (const auto& p : samples) {
      const LocalGeometry geo(M, p);
      const SolitonPoint sp(geo, cs);
      per.push_back(make_report("warped-product-soliton", max_abs(sp.gradient_residual()), p,
                                scaled_tolerance("warped-product-soliton", tol)));
    }
    out.push_back(merge_reports(per));
  }
  return out;
}

LiftedSoliton lift_product_soliton(const ManifoldSpec& base, const SolitonSpec& sol, const ManifoldSpec& fiber,
                                   double tol, std::size_t fiber_checks) {
  if (!sol.potential) throw PreconditionError("lifting needs a potential function");
  double worst = 0.0;
  for (const auto& q : sample_points(fiber.domain(), 1, fiber_checks)) {
    const LocalGeometry gf(fiber, q);
    TensorValue d = gf.ricci();
    TensorValue lg = gf.metric();
    lg *= sol.lambda;
    d += lg;
    worst = std::max(worst, max_abs(d));
  }
  if (!(worst <= tol)) {
    throw PreconditionError("fiber '" + fiber.name() + "' is not Einstein with S_F = -lambda g_F (deviation " +
                            detail::format_value(worst) + ")");
  }
  const WarpedProductSpec w(base.name() + " x " + fiber.name(), base, fiber, Expr::number(1.0), sol);
  return {w.product(), sol};
}

}  // namespace etasol
