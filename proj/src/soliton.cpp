#include "etasol/soliton.hpp"

#include <algorithm>
#include <cmath>

#include "etasol/checks.hpp"

namespace etasol {

namespace {

template <int K>
std::vector<double> values(const std::vector<Jet<K>>& v) {
  std::vector<double> r;
  r.reserve(v.size());
  for (const auto& x : v) r.push_back(x.value());
  return r;
}

IdentityReport report(const char* name, double residual, const LocalGeometry& geo, double base_tol) {
  return make_report(name, residual, geo.point(), scaled_tolerance(name, base_tol));
}

IdentityReport gated(const char* name, double residual, const LocalGeometry& geo, double base_tol, bool applicable,
                     const char* why) {
  if (applicable) return report(name, residual, geo, base_tol);
  return not_applicable(name, residual, geo.point(), scaled_tolerance(name, base_tol), why);
}

constexpr const char* kNoSoliton = "soliton equation does not hold";
constexpr const char* kNoKenmotsu = "nabla xi = I - eta (x) xi does not hold";

}  // namespace

CompiledSoliton::CompiledSoliton(const ManifoldSpec& m, const SolitonSpec& sol) : lambda_(sol.lambda), mu_(sol.mu) {
  if (!sol.potential && !sol.xi) throw ValidationError("soliton needs a potential or a vector field");
  if (!std::isfinite(sol.lambda) || !std::isfinite(sol.mu)) throw ValidationError("soliton constants must be finite");
  if (sol.potential) {
    validate_powers_on_box(*sol.potential, m.coords(), m.domain());
    f_.emplace(*sol.potential, m.coords());
  }
  if (sol.xi) {
    if (static_cast<int>(sol.xi->size()) != m.dim()) {
      throw ValidationError("vector field needs " + std::to_string(m.dim()) + " components, has " +
                            std::to_string(sol.xi->size()));
    }
    for (const auto& e : *sol.xi) {
      validate_powers_on_box(e, m.coords(), m.domain());
      xi_.emplace_back(e, m.coords());
    }
  }
}

const CompiledExpr& CompiledSoliton::potential() const {
  if (!f_) throw PreconditionError("soliton has no potential function");
  return *f_;
}

TensorValue base_equation_residual(const LocalGeometry& geo, const CompiledExpr& f, const CompiledExpr& phi, int m,
                                   double lambda, double mu) {
  const int n = geo.dim();
  const auto& p = geo.point();
  const Jet2 fj = f.eval_jet<2>(p);
  const Jet2 pj = phi.eval_jet<2>(p);
  if (!(pj.value() > 0.0)) {
    throw DomainError("warp function must be positive, got " + detail::format_value(pj.value()));
  }
  const auto hf = hessian<2>(geo, fj);
  const auto hp = hessian<2>(geo, pj);
  const TensorValue S = geo.ricci();
  const auto& g = geo.g<0>();
  TensorValue r = TensorValue::zeros(0, 2, n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t a = geo.idx(i, j);
      r(i, j) = S(i, j) + hf[a].value() - m / pj.value() * hp[a].value() + lambda * g[a].value() +
                mu * fj.d(i) * fj.d(j);
    }
  }
  return r;
}

SolitonPoint::SolitonPoint(const LocalGeometry& geo, const CompiledSoliton& sol)
    : geo_(&geo), sol_(&sol), n_(geo.dim()) {
  const auto& p = geo.point();
  if (sol.has_potential()) {
    f_ = sol.potential().eval_jet<3>(p);
    for (int k = 0; k < n_; ++k) df_.push_back(partial(f_, k));
    grad_ = raise_index<2>(geo, std::span<const Jet2>(df_));
    hess_ = hessian<3>(geo, f_);
    lap_ = trace<1>(geo, std::span<const Jet1>(hess_));
    nabla_grad_ = covariant_derivative_vector<2>(geo, std::span<const Jet2>(grad_));
    const auto& g = geo.g<2>();
    grad_norm2_ = Jet2(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) grad_norm2_ += g[geo.idx(i, j)] * grad_[std::size_t(i)] * grad_[std::size_t(j)];
    }
  }
  if (sol.has_explicit_xi()) {
    for (const auto& c : sol.xi()) xi_.push_back(c.eval_jet<2>(p));
  } else {
    xi_ = grad_;
  }
}

void SolitonPoint::require_potential(const char* what) const {
  if (!sol_->has_potential()) throw PreconditionError(std::string(what) + " needs a potential function");
}

void SolitonPoint::require_mu(const char* what) const {
  if (sol_->mu() == 0.0) throw PreconditionError(std::string(what) + " is not applicable for mu = 0");
}

TensorValue SolitonPoint::eta_residual() const {
  const auto& geo = *geo_;
  const auto L = lie_derivative_metric<2>(geo, std::span<const Jet2>(xi_));
  const TensorValue S = geo.ricci();
  const auto& g = geo.g<0>();
  const auto x = values(xi_);
  std::vector<double> eta(std::size_t(n_), 0.0);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) eta[std::size_t(i)] += g[geo.idx(i, j)].value() * x[std::size_t(j)];
  }
  const double lambda = sol_->lambda();
  const double mu = sol_->mu();
  TensorValue r = TensorValue::zeros(0, 2, n_, geo.point());
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      const std::size_t a = geo.idx(i, j);
      r(i, j) = L[a].value() + 2.0 * S(i, j) + 2.0 * lambda * g[a].value() +
                2.0 * mu * eta[std::size_t(i)] * eta[std::size_t(j)];
    }
  }
  return r;
}

TensorValue SolitonPoint::gradient_residual() const {
  require_potential("the gradient soliton equation");
  const auto& geo = *geo_;
  const TensorValue S = geo.ricci();
  const auto& g = geo.g<0>();
  const double lambda = sol_->lambda();
  const double mu = sol_->mu();
  TensorValue r = TensorValue::zeros(0, 2, n_, geo.point());
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      const std::size_t a = geo.idx(i, j);
      r(i, j) = hess_[a].value() + S(i, j) + lambda * g[a].value() +
                mu * df_[std::size_t(i)].value() * df_[std::size_t(j)].value();
    }
  }
  return r;
}

double SolitonPoint::traced_residual() const {
  const auto& geo = *geo_;
  const auto& g = geo.g<0>();
  const auto x = values(xi_);
  double norm2 = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) norm2 += g[geo.idx(i, j)].value() * x[std::size_t(i)] * x[std::size_t(j)];
  }
  const double div = divergence_vector<2>(geo, std::span<const Jet2>(xi_)).value();
  return div + geo.scal() + n_ * sol_->lambda() + sol_->mu() * norm2;
}

bool SolitonPoint::soliton_holds(double tol) const {
  if (sol_->has_potential()) return max_abs(gradient_residual()) <= scaled_tolerance("gradient-soliton", tol);
  return max_abs(eta_residual()) <= scaled_tolerance("eta-soliton", tol);
}

namespace {

double kenmotsu_hypothesis_residual(int n, const std::vector<Jet1>& nabla, const std::vector<Jet2>& df,
                                    const std::vector<Jet2>& grad) {
  double r = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < n; ++a) {
      const double v = nabla[std::size_t(i * n + a)].value() - (i == a ? 1.0 : 0.0) +
                       df[std::size_t(i)].value() * grad[std::size_t(a)].value();
      r = std::max(r, std::abs(v));
    }
  }
  return r;
}

}  // namespace

bool SolitonPoint::kenmotsu_holds(double tol) const {
  require_potential("the Kenmotsu condition");
  return kenmotsu_hypothesis_residual(n_, nabla_grad_, df_, grad_) <= scaled_tolerance("kenmotsu-hypothesis", tol);
}

IdentityReport SolitonPoint::eta_soliton(double tol) const {
  return report("eta-soliton", max_abs(eta_residual()), *geo_, tol);
}

IdentityReport SolitonPoint::gradient_soliton(double tol) const {
  return report("gradient-soliton", max_abs(gradient_residual()), *geo_, tol);
}

IdentityReport SolitonPoint::eta_gradient_consistency(double tol) const {
  TensorValue d = eta_residual();
  d -= 2.0 * gradient_residual();
  return report("eta-gradient-consistency", max_abs(d), *geo_, tol);
}

IdentityReport SolitonPoint::xi_matches_grad_f(double tol) const {
  require_potential("comparing xi with grad f");
  if (!sol_->has_explicit_xi()) throw PreconditionError("comparing xi with grad f needs an explicit xi");
  double r = 0.0;
  for (int i = 0; i < n_; ++i) {
    r = std::max(r, std::abs(xi_[std::size_t(i)].value() - grad_[std::size_t(i)].value()));
  }
  return report("xi-matches-grad-f", r, *geo_, tol);
}

IdentityReport SolitonPoint::hessian_symmetry(double tol) const {
  require_potential("Hessian symmetry");
  const auto& geo = *geo_;
  const auto& g = geo.g<0>();
  // A_ij = g(nabla_i xi, d_j)
  std::vector<double> A(std::size_t(n_ * n_), 0.0);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      for (int k = 0; k < n_; ++k) A[geo.idx(i, j)] += g[geo.idx(j, k)].value() * nabla_grad_[geo.idx(i, k)].value();
    }
  }
  double r = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) r = std::max(r, std::abs(A[geo.idx(i, j)] - A[geo.idx(j, i)]));
  }
  return report("hessian-symmetry", r, geo, tol);
}

IdentityReport SolitonPoint::traced_soliton(double tol) const {
  return report("traced-soliton", std::abs(traced_residual()), *geo_, tol);
}

IdentityReport SolitonPoint::traced_consistency(double tol) const {
  const auto& geo = *geo_;
  const TensorValue e = eta_residual();
  const auto& gi = geo.g_inv<0>();
  double half_trace = 0.0;
  for (std::size_t a = 0; a < e.data.size(); ++a) half_trace += 0.5 * gi[a].value() * e.data[a];
  return report("traced-consistency", std::abs(traced_residual() - half_trace), geo, tol);
}

namespace {

// |nabla X|^2 = g^{ij} g_{kl} nabla_i X^k nabla_j X^l
double nabla_norm2(const LocalGeometry& geo, const std::vector<Jet1>& nx) {
  const int n = geo.dim();
  const auto& g = geo.g<0>();
  const auto& gi = geo.g_inv<0>();
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          s += gi[geo.idx(i, j)].value() * g[geo.idx(k, l)].value() * nx[geo.idx(i, k)].value() *
               nx[geo.idx(j, l)].value();
        }
      }
    }
  }
  return s;
}

double quadratic(const TensorValue& T, const std::vector<double>& x) {
  double s = 0.0;
  for (int i = 0; i < T.dim; ++i) {
    for (int j = 0; j < T.dim; ++j) s += T(i, j) * x[std::size_t(i)] * x[std::size_t(j)];
  }
  return s;
}

Jet2 norm2_of(const LocalGeometry& geo, const std::vector<Jet2>& X) {
  const int n = geo.dim();
  const auto& g = geo.g<2>();
  Jet2 acc(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) acc += g[geo.idx(i, j)] * X[std::size_t(i)] * X[std::size_t(j)];
  }
  return acc;
}

double laplacian_value(const LocalGeometry& geo, const Jet2& h) {
  const auto hh = hessian<2>(geo, h);
  return trace<0>(geo, std::span<const Jet<0>>(hh)).value();
}

// (div L_X g)(X) and 1/2 Lap|X|^2 - |nabla X|^2 + S(X,X) + X(div X), for any X.
IdentityReport bochner_formula_for(const LocalGeometry& geo, const std::vector<Jet2>& X, double tol) {
  const int n = geo.dim();
  const std::span<const Jet2> xs(X);
  const auto L = lie_derivative_metric<2>(geo, xs);
  const auto divL = divergence_sym2<1>(geo, std::span<const Jet1>(L));
  const auto x = values(X);
  double lhs = 0.0;
  for (int j = 0; j < n; ++j) lhs += divL[std::size_t(j)].value() * x[std::size_t(j)];

  const double half_lap = 0.5 * laplacian_value(geo, norm2_of(geo, X));
  const double nn = nabla_norm2(geo, covariant_derivative_vector<2>(geo, xs));
  const double sxx = quadratic(geo.ricci(), x);
  const Jet1 div = divergence_vector<2>(geo, xs);
  double x_div = 0.0;
  for (int k = 0; k < n; ++k) x_div += x[std::size_t(k)] * div.d(k);
  return report("bochner-formula", std::abs(lhs - (half_lap - nn + sxx + x_div)), geo, tol);
}

}  // namespace

IdentityReport SolitonPoint::bochner_formula(double tol) const { return bochner_formula_for(*geo_, xi_, tol); }

std::vector<IdentityReport> SolitonPoint::bochner_suite(double tol) const {
  require_potential("the Bochner identities");
  const auto& geo = *geo_;
  const std::span<const Jet2> xs(grad_);
  const auto x = values(grad_);
  const TensorValue S = geo.ricci();

  // Left sides: divergence of L_xi g, Laplacian of |xi|^2 and |nabla xi|^2.
  const auto L = lie_derivative_metric<2>(geo, xs);
  const auto divL = divergence_sym2<1>(geo, std::span<const Jet1>(L));
  double divL_xi = 0.0;
  for (int j = 0; j < n_; ++j) divL_xi += divL[std::size_t(j)].value() * x[std::size_t(j)];
  const double lap_norm2 = laplacian_value(geo, grad_norm2_);
  const double nn = nabla_norm2(geo, nabla_grad_);

  // Right sides: Ricci and derivatives of Lap f = trace Hess f.
  const double sxx = quadratic(S, x);
  double xi_lap = 0.0;
  for (int k = 0; k < n_; ++k) xi_lap += x[std::size_t(k)] * lap_.d(k);

  std::vector<IdentityReport> out;
  out.push_back(bochner_formula_for(geo, grad_, tol));
  out.push_back(report("bochner-gradient", std::abs(divL_xi - (2.0 * xi_lap + 2.0 * sxx)), geo, tol));
  out.push_back(report("bochner-laplacian", std::abs((lap_norm2 - 2.0 * nn) - (2.0 * sxx + 2.0 * xi_lap)), geo, tol));
  double r = 0.0;
  for (int j = 0; j < n_; ++j) {
    double rhs = 2.0 * lap_.d(j);
    for (int k = 0; k < n_; ++k) rhs += 2.0 * S(j, k) * x[std::size_t(k)];
    r = std::max(r, std::abs(divL[std::size_t(j)].value() - rhs));
  }
  out.push_back(report("lie-divergence", r, geo, tol));
  return out;
}

IdentityReport SolitonPoint::gradient_norm_laplacian(double tol) const {
  require_potential("the gradient-norm Laplacian identity");
  const auto& geo = *geo_;
  const auto x = values(grad_);
  double xi_norm2 = 0.0;
  for (int k = 0; k < n_; ++k) xi_norm2 += x[std::size_t(k)] * grad_norm2_.d(k);
  const double lhs = 0.5 * (laplacian_value(geo, grad_norm2_) - xi_norm2);

  const double hess2 = squared_norm(geo, values_of<1>(hess_, 0, 2, n_, geo.point()));
  const double v2 = grad_norm2_.value();
  const double rhs = hess2 + sol_->lambda() * v2 + sol_->mu() * v2 * (v2 - 2.0 * lap_.value());
  return gated("gradient-norm-laplacian", std::abs(lhs - rhs), geo, tol, soliton_holds(tol), kNoSoliton);
}

IdentityReport SolitonPoint::ricci_operator_derivative(int i, int j, double tol) const {
  require_potential("the Ricci operator identity");
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw DimensionError("coordinate field index out of range");
  const auto& geo = *geo_;
  const auto& gam = geo.gamma<0>();
  const auto& gi = geo.g_inv<1>();
  const auto& Sj = geo.ricci_jets();
  // Q^a_b = g^{ac} S_cb
  std::vector<Jet1> Q;
  Q.reserve(std::size_t(n_ * n_));
  for (int a = 0; a < n_; ++a) {
    for (int b = 0; b < n_; ++b) {
      Jet1 acc(n_, 0.0);
      for (int c = 0; c < n_; ++c) acc += gi[geo.idx(a, c)] * Sj[geo.idx(c, b)];
      Q.push_back(std::move(acc));
    }
  }
  const auto G = [&](int k, int a, int b) { return gam[geo.idx(k, a, b)].value(); };
  // (nabla_k Q)^a_b
  const auto nabla_q = [&](int k, int a, int b) {
    double v = Q[geo.idx(a, b)].d(k);
    for (int c = 0; c < n_; ++c) v += G(a, k, c) * Q[geo.idx(c, b)].value() - G(c, k, b) * Q[geo.idx(a, c)].value();
    return v;
  };
  const auto& N = nabla_grad_;  // (k, a) = nabla_k xi^a
  // (nabla^2_{k,l} xi)^a = d_k (nabla_l xi^a) + Gamma^a_{kc} nabla_l xi^c - Gamma^c_{kl} nabla_c xi^a
  const auto nabla2 = [&](int k, int l, int a) {
    double v = N[geo.idx(l, a)].d(k);
    for (int c = 0; c < n_; ++c) v += G(a, k, c) * N[geo.idx(l, c)].value() - G(c, k, l) * N[geo.idx(c, a)].value();
    return v;
  };
  const double mu = sol_->mu();
  const double dfi = df_[std::size_t(i)].value();
  const double dfj = df_[std::size_t(j)].value();
  double r = 0.0;
  for (int a = 0; a < n_; ++a) {
    const double lhs = nabla_q(i, a, j) - nabla_q(j, a, i);
    const double rhs = -nabla2(i, j, a) + nabla2(j, i, a) +
                       mu * (dfi * N[geo.idx(j, a)].value() - dfj * N[geo.idx(i, a)].value());
    r = std::max(r, std::abs(lhs - rhs));
  }
  IdentityReport rep = gated("ricci-operator-derivative", r, geo, tol, soliton_holds(tol), kNoSoliton);
  rep.extras = {{"x", double(i)}, {"y", double(j)}};
  return rep;
}

IdentityReport SolitonPoint::ricci_operator_derivative_all(double tol) const {
  IdentityReport worst = ricci_operator_derivative(0, 0, tol);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      if (i == j) continue;
      IdentityReport r = ricci_operator_derivative(i, j, tol);
      if (r.max_residual > worst.max_residual || std::isnan(r.max_residual)) worst = std::move(r);
    }
  }
  return worst;
}

std::vector<IdentityReport> SolitonPoint::kenmotsu_suite(double tol) const {
  require_potential("the Kenmotsu identities");
  const auto& geo = *geo_;
  const auto& g = geo.g<0>();
  const auto x = values(grad_);
  const auto eta = values(df_);
  const double hyp = kenmotsu_hypothesis_residual(n_, nabla_grad_, df_, grad_);
  const bool ok = hyp <= scaled_tolerance("kenmotsu-hypothesis", tol);

  std::vector<IdentityReport> out;
  out.push_back(report("kenmotsu-hypothesis", hyp, geo, tol));

  double rh = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      const double rhs = g[geo.idx(i, j)].value() - eta[std::size_t(i)] * eta[std::size_t(j)];
      rh = std::max(rh, std::abs(hess_[geo.idx(i, j)].value() - rhs));
    }
  }
  out.push_back(gated("kenmotsu-hessian", rh, geo, tol, ok, kNoKenmotsu));

  // R(d_i, d_j) xi = eta_i d_j - eta_j d_i
  const TensorValue R = geo.riemann();
  double rc = 0.0;
  for (int a = 0; a < n_; ++a) {
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        double lhs = 0.0;
        for (int k = 0; k < n_; ++k) lhs += R(a, i, j, k) * x[std::size_t(k)];
        const double rhs = (a == j ? eta[std::size_t(i)] : 0.0) - (a == i ? eta[std::size_t(j)] : 0.0);
        rc = std::max(rc, std::abs(lhs - rhs));
      }
    }
  }
  out.push_back(gated("kenmotsu-curvature", rc, geo, tol, ok, kNoKenmotsu));

  const double sxx = quadratic(geo.ricci(), x);
  const double rr = std::abs(sxx - (1.0 - n_) * grad_norm2_.value());
  out.push_back(gated("kenmotsu-ricci", rr, geo, tol, ok, kNoKenmotsu));
  return out;
}

IdentityReport SolitonPoint::kenmotsu_laplacian(double tol) const {
  require_potential("the Kenmotsu Laplacian equation");
  require_mu("the Kenmotsu Laplacian equation");
  const double r = std::abs(lap_.value() - (n_ - 1) / sol_->mu());
  const bool ok = kenmotsu_holds(tol) && soliton_holds(tol);
  return gated("kenmotsu-laplacian", r, *geo_, tol, ok, "soliton equation or nabla xi = I - eta (x) xi fails");
}

IdentityReport SolitonPoint::kenmotsu_constants(double tol) const {
  require_potential("the Kenmotsu constant relation");
  require_mu("the Kenmotsu constant relation");
  const double r = std::abs(sol_->lambda() + sol_->mu() - (n_ - 1));
  const bool ok = kenmotsu_holds(tol) && soliton_holds(tol);
  return gated("kenmotsu-constants", r, *geo_, tol, ok, "soliton equation or nabla xi = I - eta (x) xi fails");
}

CswValue SolitonPoint::csw() const {
  require_potential("the Case-Shu-Wei quantity");
  require_mu("the Case-Shu-Wei quantity");
  const double lambda = sol_->lambda();
  const double mu = sol_->mu();
  const Jet1 inner = lap_ - truncate<1>(grad_norm2_) - lambda / mu;
  const Jet1 q = exp(2.0 * mu * truncate<1>(f_)) * inner;
  const auto& gi = geo_->g_inv<0>();
  double s = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) s += gi[geo_->idx(i, j)].value() * q.d(i) * q.d(j);
  }
  return {q.value(), std::sqrt(std::max(s, 0.0))};
}

IdentityReport SolitonPoint::csw_constant(double tol) const {
  const CswValue c = csw();
  IdentityReport r = gated("case-shu-wei-constant", c.gradient_norm, *geo_, tol, soliton_holds(tol), kNoSoliton);
  r.extras = {{"value", c.value}};
  return r;
}

std::vector<IdentityReport> SolitonPoint::pointwise_lemmas(double tol, const WarpTerms* warp) const {
  require_potential("the pointwise lemmas");
  const auto& geo = *geo_;
  const auto& p = geo.point();
  const auto& g = geo.g<0>();
  const auto x = values(grad_);
  const TensorValue H = values_of<1>(hess_, 0, 2, n_, p);
  const double hess2 = squared_norm(geo, H);
  std::vector<IdentityReport> out;

  {
    // |Hess f - (Lap f / n) g|^2 with Lap f = div xi, against |Hess f|^2 - (trace Hess f)^2 / n.
    const double div = divergence_vector<2>(geo, std::span<const Jet2>(grad_)).value();
    TensorValue T = H;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) T(i, j) -= div / n_ * g[geo.idx(i, j)].value();
    }
    const double lhs = squared_norm(geo, T);
    const double rhs = hess2 - lap_.value() * lap_.value() / n_;
    out.push_back(report("traceless-hessian-norm", std::abs(lhs - rhs), geo, tol));
  }
  {
    // (div Hess f)(xi) = div(Hess f(xi)) - |nabla xi|^2
    const auto divH = divergence_sym2<1>(geo, std::span<const Jet1>(hess_));
    double lhs = 0.0;
    for (int j = 0; j < n_; ++j) lhs += divH[std::size_t(j)].value() * x[std::size_t(j)];
    std::vector<Jet1> w;
    for (int j = 0; j < n_; ++j) {
      Jet1 acc(n_, 0.0);
      for (int k = 0; k < n_; ++k) acc += hess_[geo.idx(j, k)] * truncate<1>(grad_[std::size_t(k)]);
      w.push_back(std::move(acc));
    }
    const double rhs = divergence_oneform<1>(geo, std::span<const Jet1>(w)).value() - nabla_norm2(geo, nabla_grad_);
    out.push_back(report("hessian-divergence", std::abs(lhs - rhs), geo, tol));
  }
  {
    // (div(df (x) df))(xi) = 1/2 xi(|xi|^2) + |xi|^2 div xi
    std::vector<Jet2> T;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) T.push_back(df_[std::size_t(i)] * df_[std::size_t(j)]);
    }
    const auto divT = divergence_sym2<2>(geo, std::span<const Jet2>(T));
    double lhs = 0.0;
    for (int j = 0; j < n_; ++j) lhs += divT[std::size_t(j)].value() * x[std::size_t(j)];
    double xi_norm2 = 0.0;
    for (int k = 0; k < n_; ++k) xi_norm2 += x[std::size_t(k)] * grad_norm2_.d(k);
    const double rhs = 0.5 * xi_norm2 + grad_norm2_.value() * lap_.value();
    out.push_back(report("df-squared-divergence", std::abs(lhs - rhs), geo, tol));
  }
  if (warp != nullptr) {
    // scal_B + Lap f - m Lap(phi)/phi + n lambda + mu |xi|^2, asserted where the base equation holds.
    const TensorValue base = base_equation_residual(geo, sol_->potential(), warp->phi, warp->m, warp->lambda, warp->mu);
    const bool ok = max_abs(base) <= scaled_tolerance("warped-base-equation", tol);
    const Jet2 ph = warp->phi.eval_jet<2>(p);
    const double r = std::abs(geo.scal() + lap_.value() - warp->m * laplacian_value(geo, ph) / ph.value() +
                              n_ * warp->lambda + warp->mu * grad_norm2_.value());
    out.push_back(gated("warped-base-trace", r, geo, tol, ok, "warped base equation does not hold"));
  }
  return out;
}

TensorValue eta_soliton_residual_at(const ManifoldSpec& m, const SolitonSpec& sol, std::span<const double> p) {
  const LocalGeometry geo(m, p);
  const CompiledSoliton cs(m, sol);
  return SolitonPoint(geo, cs).eta_residual();
}

TensorValue gradient_soliton_residual_at(const ManifoldSpec& m, const SolitonSpec& sol, std::span<const double> p) {
  const LocalGeometry geo(m, p);
  const CompiledSoliton cs(m, sol);
  return SolitonPoint(geo, cs).gradient_residual();
}

namespace {

SolitonSpec potential_only(const Expr& f) {
  SolitonSpec s;
  s.potential = f;
  return s;
}

}  // namespace

std::vector<IdentityReport> bochner_suite_at(const ManifoldSpec& m, const Expr& f, std::span<const double> p,
                                             double tol) {
  const LocalGeometry geo(m, p);
  const CompiledSoliton cs(m, potential_only(f));
  return SolitonPoint(geo, cs).bochner_suite(tol);
}

IdentityReport trace_identity_at(const ManifoldSpec& m, const SolitonSpec& sol, std::span<const double> p,
                                 double tol) {
  const LocalGeometry geo(m, p);
  const CompiledSoliton cs(m, sol);
  return SolitonPoint(geo, cs).traced_soliton(tol);
}

IdentityReport theorem_t_at(const ManifoldSpec& m, const SolitonSpec& sol, std::span<const double> p, double tol) {
  const LocalGeometry geo(m, p);
  const CompiledSoliton cs(m, sol);
  return SolitonPoint(geo, cs).gradient_norm_laplacian(tol);
}

IdentityReport prop1_at(const ManifoldSpec& m, const SolitonSpec& sol, int x, int y, std::span<const double> p,
                        double tol) {
  const LocalGeometry geo(m, p);
  const CompiledSoliton cs(m, sol);
  return SolitonPoint(geo, cs).ricci_operator_derivative(x, y, tol);
}

std::vector<IdentityReport> prop_d_at(const ManifoldSpec& m, const Expr& f, std::span<const double> p, double tol) {
  const LocalGeometry geo(m, p);
  const CompiledSoliton cs(m, potential_only(f));
  return SolitonPoint(geo, cs).kenmotsu_suite(tol);
}

IdentityReport laplacian_eq_at(const ManifoldSpec& m, const SolitonSpec& sol, std::span<const double> p,
                               double tol) {
  const LocalGeometry geo(m, p);
  const CompiledSoliton cs(m, sol);
  return SolitonPoint(geo, cs).kenmotsu_laplacian(tol);
}

CswValue csw_constant_at(const ManifoldSpec& m, const SolitonSpec& sol, std::span<const double> p) {
  const LocalGeometry geo(m, p);
  const CompiledSoliton cs(m, sol);
  return SolitonPoint(geo, cs).csw();
}

std::vector<IdentityReport> pointwise_lemmas_at(const ManifoldSpec& m, const Expr& f, std::span<const double> p,
                                                double tol, const WarpTerms* warp) {
  const LocalGeometry geo(m, p);
  const CompiledSoliton cs(m, potential_only(f));
  return SolitonPoint(geo, cs).pointwise_lemmas(tol, warp);
}

FitResult fit_constants(const ManifoldSpec& m, const Expr& f, FitMode mode,
                        std::span<const std::vector<double>> samples) {
  if (samples.size() < 2) throw PreconditionError("fitting the soliton constants needs at least 2 sample points");
  const CompiledSoliton cs(m, potential_only(f));
  const double scale = mode == FitMode::Eta ? 2.0 : 1.0;
  const int n = m.dim();
  // residual = A + lambda B + mu C, componentwise
  struct Columns {
    std::vector<double> a, b, c;
    std::vector<double> point;
  };
  std::vector<Columns> cols;
  double bb = 0.0, bc = 0.0, cc = 0.0, ab = 0.0, ac = 0.0;
  for (const auto& p : samples) {
    const LocalGeometry geo(m, p);
    const SolitonPoint sp(geo, cs);
    Columns col;
    col.a = (mode == FitMode::Eta ? sp.eta_residual() : sp.gradient_residual()).data;
    const Jet1 fj = cs.potential().eval_jet<1>(p);
    const auto& g = geo.g<0>();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        col.b.push_back(scale * g[geo.idx(i, j)].value());
        col.c.push_back(scale * fj.d(i) * fj.d(j));
      }
    }
    for (std::size_t k = 0; k < col.a.size(); ++k) {
      bb += col.b[k] * col.b[k];
      bc += col.b[k] * col.c[k];
      cc += col.c[k] * col.c[k];
      ab += col.a[k] * col.b[k];
      ac += col.a[k] * col.c[k];
    }
    col.point = p;
    cols.push_back(std::move(col));
  }

  FitResult out;
  const double det = bb * cc - bc * bc;
  constexpr double kDegenerate = 1e-10;
  if (!(cc > kDegenerate * bb) || !(det > kDegenerate * bb * cc)) {
    out.mu_identifiable = false;
    out.mu = 0.0;
    out.lambda = -ab / bb;
  } else {
    out.lambda = (-ab * cc + ac * bc) / det;
    out.mu = (-ac * bb + ab * bc) / det;
  }
  bool first = true;
  for (const auto& col : cols) {
    double r = 0.0;
    for (std::size_t k = 0; k < col.a.size(); ++k) {
      r = std::max(r, std::abs(col.a[k] + out.lambda * col.b[k] + out.mu * col.c[k]));
    }
    if (first || r > out.max_residual) {
      out.max_residual = r;
      out.worst_point = col.point;
      first = false;
    }
  }
  return out;
}

}  // namespace etasol
