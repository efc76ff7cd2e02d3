#pragma once

// Gradient eta-Ricci solitons
//   L_xi g + 2 S + 2 lambda g + 2 mu eta (x) eta = 0,   eta = g(xi, .)
// and the pointwise identities built on them. Each identity is reported as
// |left side - right side|, with the two sides computed along different paths.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "etasol/geometry.hpp"
#include "etasol/report.hpp"

namespace etasol {

struct SolitonSpec {
  std::optional<Expr> potential;         // f, xi = grad f
  std::optional<std::vector<Expr>> xi;   // explicit contravariant components
  double lambda = 0.0;
  double mu = 0.0;
};

/// Soliton data bound to a chart. Throws ValidationError when neither f nor
/// xi is given or when xi has the wrong number of components.
class CompiledSoliton {
 public:
  CompiledSoliton(const ManifoldSpec& m, const SolitonSpec& sol);

  bool has_potential() const noexcept { return f_.has_value(); }
  bool has_explicit_xi() const noexcept { return !xi_.empty(); }
  const CompiledExpr& potential() const;
  const std::vector<CompiledExpr>& xi() const noexcept { return xi_; }
  double lambda() const noexcept { return lambda_; }
  double mu() const noexcept { return mu_; }

 private:
  std::optional<CompiledExpr> f_;
  std::vector<CompiledExpr> xi_;
  double lambda_;
  double mu_;
};

/// Extra data for the traced warped-base equation: warp phi compiled over the
/// base coordinates, fiber dimension m and the soliton constants.
struct WarpTerms {
  CompiledExpr phi;
  int m = 2;
  double lambda = 0.0;
  double mu = 0.0;
};

/// S_B + Hess f - (m / phi) Hess phi + lambda g_B + mu df (x) df on the base.
TensorValue base_equation_residual(const LocalGeometry& geo, const CompiledExpr& f, const CompiledExpr& phi, int m,
                                   double lambda, double mu);

struct CswValue {
  double value = 0.0;
  double gradient_norm = 0.0;
};

/// Everything the soliton checks need at one point. The geometry is borrowed
/// and must outlive this object. Tolerance arguments are base tolerances;
/// each report scales its own by tolerance_factor(name).
class SolitonPoint {
 public:
  SolitonPoint(const LocalGeometry& geo, const CompiledSoliton& sol);
  SolitonPoint(const SolitonPoint&) = delete;
  SolitonPoint& operator=(const SolitonPoint&) = delete;

  const LocalGeometry& geometry() const noexcept { return *geo_; }
  bool has_potential() const noexcept { return sol_->has_potential(); }

  /// L_xi g + 2S + 2 lambda g + 2 mu eta (x) eta with xi explicit when given, else grad f.
  TensorValue eta_residual() const;
  /// Hess f + S + lambda g + mu df (x) df. Needs a potential.
  TensorValue gradient_residual() const;
  /// div xi + scal + m lambda + mu |xi|^2
  double traced_residual() const;
  /// True when the gradient soliton equation holds within tol here.
  bool soliton_holds(double tol) const;
  /// True when nabla xi = I - eta (x) xi holds within tol here.
  bool kenmotsu_holds(double tol) const;

  IdentityReport eta_soliton(double tol) const;
  IdentityReport gradient_soliton(double tol) const;
  /// eta residual minus twice the gradient residual.
  IdentityReport eta_gradient_consistency(double tol) const;
  /// Explicit xi against grad f (needs both).
  IdentityReport xi_matches_grad_f(double tol) const;
  /// g(nabla_X xi, Y) - g(nabla_Y xi, X)
  IdentityReport hessian_symmetry(double tol) const;
  IdentityReport traced_soliton(double tol) const;
  /// Traced residual minus half the g-trace of the eta residual.
  IdentityReport traced_consistency(double tol) const;

  /// bochner-formula, bochner-gradient, bochner-laplacian, lie-divergence.
  std::vector<IdentityReport> bochner_suite(double tol) const;
  /// (div L_xi g)(xi) = 1/2 Lap|xi|^2 - |nabla xi|^2 + S(xi,xi) + xi(div xi), any xi.
  IdentityReport bochner_formula(double tol) const;
  /// 1/2 (Lap - nabla_xi)|xi|^2 = |Hess f|^2 + lambda|xi|^2 + mu|xi|^2 (|xi|^2 - 2 Lap f),
  /// asserted where the soliton equation holds.
  IdentityReport gradient_norm_laplacian(double tol) const;
  /// (nabla_i Q) d_j - (nabla_j Q) d_i against the second covariant derivative of xi.
  IdentityReport ricci_operator_derivative(int i, int j, double tol) const;
  /// Worst over all coordinate pairs; asserted where the soliton equation holds.
  IdentityReport ricci_operator_derivative_all(double tol) const;
  /// kenmotsu-hypothesis, kenmotsu-hessian, kenmotsu-curvature, kenmotsu-ricci.
  std::vector<IdentityReport> kenmotsu_suite(double tol) const;
  /// Lap f = (m - 1) / mu. Throws PreconditionError for mu = 0.
  IdentityReport kenmotsu_laplacian(double tol) const;
  /// lambda + mu = m - 1. Throws PreconditionError for mu = 0.
  IdentityReport kenmotsu_constants(double tol) const;
  /// e^{2 mu f} (Lap f - |xi|^2 - lambda / mu) and the norm of its gradient.
  CswValue csw() const;
  IdentityReport csw_constant(double tol) const;
  /// traceless-hessian-norm, hessian-divergence, df-squared-divergence, and
  /// warped-base-trace when warp terms are given.
  std::vector<IdentityReport> pointwise_lemmas(double tol, const WarpTerms* warp = nullptr) const;

 private:
  void require_potential(const char* what) const;
  void require_mu(const char* what) const;

  const LocalGeometry* geo_;
  const CompiledSoliton* sol_;
  int n_;
  std::vector<Jet2> xi_;        // the soliton's vector field
  // Present with a potential:
  Jet3 f_;
  std::vector<Jet2> df_;        // d_i f
  std::vector<Jet2> grad_;      // g^{ij} d_j f
  std::vector<Jet1> hess_;      // Hess f
  Jet1 lap_;                    // g^{ij} Hess_ij
  std::vector<Jet1> nabla_grad_;  // (i, k) = nabla_i (grad f)^k
  Jet2 grad_norm2_;             // g_ij grad^i grad^j
};

// Per-point wrappers over a manifold spec.

TensorValue eta_soliton_residual_at(const ManifoldSpec& m, const SolitonSpec& sol, std::span<const double> p);
TensorValue gradient_soliton_residual_at(const ManifoldSpec& m, const SolitonSpec& sol, std::span<const double> p);
std::vector<IdentityReport> bochner_suite_at(const ManifoldSpec& m, const Expr& f, std::span<const double> p,
                                             double tol = 1e-8);
IdentityReport trace_identity_at(const ManifoldSpec& m, const SolitonSpec& sol, std::span<const double> p,
                                 double tol = 1e-8);
IdentityReport theorem_t_at(const ManifoldSpec& m, const SolitonSpec& sol, std::span<const double> p,
                            double tol = 1e-8);
IdentityReport prop1_at(const ManifoldSpec& m, const SolitonSpec& sol, int x, int y, std::span<const double> p,
                        double tol = 1e-8);
std::vector<IdentityReport> prop_d_at(const ManifoldSpec& m, const Expr& f, std::span<const double> p,
                                      double tol = 1e-8);
IdentityReport laplacian_eq_at(const ManifoldSpec& m, const SolitonSpec& sol, std::span<const double> p,
                               double tol = 1e-8);
CswValue csw_constant_at(const ManifoldSpec& m, const SolitonSpec& sol, std::span<const double> p);
std::vector<IdentityReport> pointwise_lemmas_at(const ManifoldSpec& m, const Expr& f, std::span<const double> p,
                                                double tol = 1e-8, const WarpTerms* warp = nullptr);

enum class FitMode { Eta, Gradient };

struct FitResult {
  double lambda = 0.0;
  double mu = 0.0;
  bool mu_identifiable = true;
  double max_residual = 0.0;  // largest residual component after the fit
  std::vector<double> worst_point;
};

/// Least-squares (lambda, mu) minimising the summed squared components of the
/// soliton residual over the samples. When the mu column vanishes or is
/// parallel to the lambda column, mu is reported unidentifiable, fixed to 0,
/// and lambda is fitted alone.
FitResult fit_constants(const ManifoldSpec& m, const Expr& f, FitMode mode, std::span<const std::vector<double>> samples);

}  // namespace etasol
