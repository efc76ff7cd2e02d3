#pragma once

// Warped products B x_phi F with metric g_B + phi^2 g_F. Product chart
// coordinates are the base coordinates followed by the fiber coordinates;
// a fiber coordinate whose name is taken by the base gets the suffix "_f".

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "etasol/soliton.hpp"

namespace etasol {

class WarpedProductSpec {
 public:
  /// Throws ValidationError when the fiber has dimension < 2, the warp uses
  /// anything but base coordinates, or the warp is not positive on the base box.
  WarpedProductSpec(std::string name, ManifoldSpec base, ManifoldSpec fiber, Expr warp,
                    std::optional<SolitonSpec> soliton = std::nullopt);

  const std::string& name() const noexcept { return name_; }
  const ManifoldSpec& base() const noexcept { return base_; }
  const ManifoldSpec& fiber() const noexcept { return fiber_; }
  const Expr& warp() const noexcept { return warp_; }
  const std::optional<SolitonSpec>& soliton() const noexcept { return soliton_; }
  int n() const noexcept { return base_.dim(); }
  int m() const noexcept { return fiber_.dim(); }
  bool trivial_warp() const noexcept { return warp_.is_number(1.0); }

  /// Fiber coordinate names as they appear in the product chart.
  const std::vector<std::string>& product_fiber_coords() const noexcept { return fiber_coords_; }
  /// The assembled (n + m)-dimensional chart, built once at construction.
  const ManifoldSpec& product() const noexcept { return *product_; }
  /// Warp compiled over the base coordinates.
  const CompiledExpr& compiled_warp() const noexcept { return phi_; }

 private:
  std::string name_;
  ManifoldSpec base_;
  ManifoldSpec fiber_;
  Expr warp_;
  std::optional<SolitonSpec> soliton_;
  std::vector<std::string> fiber_coords_;
  CompiledExpr phi_;
  std::optional<ManifoldSpec> product_;
};

/// Block metric diag(g_B, phi^2 g_F) on the product chart. With frames on both
/// factors the product frame is (E_B, 0) and (0, E_F / phi).
ManifoldSpec build_warped(const WarpedProductSpec& w);

struct LemmaBlocks {
  TensorValue base;            // n x n
  std::vector<double> mixed;   // n x m, row-major
  TensorValue fiber;           // m x m
};

/// Ricci blocks of the product from base and fiber quantities only:
///   S(X,Y) = S_B(X,Y) - (m / phi) Hess phi (X,Y)
///   S(X,V) = 0
///   S(V,W) = S_F(V,W) - [Lap phi / phi + (m - 1) |grad phi|^2 / phi^2] g(V,W),  g(V,W) = phi^2 g_F(V,W)
LemmaBlocks lemma_ricci_at(const WarpedProductSpec& w, std::span<const double> base_point,
                           std::span<const double> fiber_point);

/// The blocks assembled into an (n + m) x (n + m) covariant tensor.
TensorValue assemble(const LemmaBlocks& blocks, std::span<const double> product_point);

/// Largest componentwise gap between the lemma blocks and the Ricci tensor of
/// the product chart, over product-chart sample points ("warped-ricci-lemma").
IdentityReport verify_lemma(const WarpedProductSpec& w, std::span<const std::vector<double>> samples,
                            double tol = 1e-8);

/// k = -lambda phi^2 + phi Lap phi + (m - 1)|grad phi|^2 - phi (grad f)(phi) at a base point.
double k_at(const WarpedProductSpec& w, const Expr& f, double lambda, std::span<const double> base_point);

/// warped-base-equation, warped-fiber-einstein and warped-product-soliton over
/// product-chart samples. The fiber report fails with a "k non-constant" note
/// when k varies by more than its tolerance; its extras carry k, the spread
/// of k, and the best ratio c with S_F - k g_F = c g_F.
std::vector<IdentityReport> construction_verify(const WarpedProductSpec& w, const Expr& f, double lambda, double mu,
                                                std::span<const std::vector<double>> samples, double tol = 1e-8);

struct LiftedSoliton {
  ManifoldSpec product;
  SolitonSpec soliton;
};

/// Product with phi = 1 carrying f o pi. The fiber must satisfy S_F = -lambda g_F
/// at `fiber_checks` sampled fiber points within tol, else PreconditionError.
LiftedSoliton lift_product_soliton(const ManifoldSpec& base, const SolitonSpec& sol, const ManifoldSpec& fiber,
                                   double tol = 1e-8, std::size_t fiber_checks = 20);

}  // namespace etasol
