#include <gtest/gtest.h>

#include "etasol/warped.hpp"
#include "test_util.hpp"

namespace etasol {
namespace {

using testing::cube;
using testing::euclidean;
using testing::hyperbolic;
using testing::matrix;

const WarpedProductSpec& line_warp(int m) {
  return *catalog_get(m == 2 ? "hyperbolic-line-warp" : "hyperbolic-line-warp-3").warped;
}

ManifoldSpec line() { return ManifoldSpec("line", {"t"}, Box{{-1.0}, {1.0}}, matrix({{"1"}}), matrix({{"1"}})); }

TEST(Warped, TrivialWarpOfFlatFactorsIsFlat) {
  const WarpedProductSpec w("", euclidean({"x", "y"}), euclidean({"u", "v"}), parse("1"));
  const ManifoldSpec& p = w.product();
  EXPECT_EQ(p.dim(), 4);
  EXPECT_EQ(p.name(), "flat x flat");
  const std::vector<double> at = {0.1, 0.2, 0.3, 0.4};
  const auto g = p.metric_values_raw(at);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) EXPECT_EQ(g[std::size_t(i * 4 + j)], i == j ? 1.0 : 0.0);
  }
  EXPECT_EQ(testing::max_abs(ricci_at(p, at).ricci.data), 0.0);
  EXPECT_TRUE(verify_lemma(w, sample_points(p.domain(), 1, 20)).pass);
}

TEST(Warped, ProductChartLayout) {
  const ManifoldSpec base("b", {"x"}, Box{{0.5}, {2.0}}, matrix({{"1"}}), matrix({{"1"}}));
  const WarpedProductSpec w("w", base, euclidean({"x", "y"}), parse("x"));
  EXPECT_EQ(w.product_fiber_coords(), (std::vector<std::string>{"x_f", "y"}));
  EXPECT_EQ(w.product().coords(), (std::vector<std::string>{"x", "x_f", "y"}));
  const std::vector<double> p = {1.5, 0.0, 0.0};
  const auto g = w.product().metric_values_raw(p);
  EXPECT_DOUBLE_EQ(g[4], 2.25);
  EXPECT_DOUBLE_EQ(g[8], 2.25);
  EXPECT_LT(frame_orthonormality_defect(w.product(), p), 1e-14);
  EXPECT_FALSE(w.trivial_warp());
  EXPECT_TRUE(w.product().has_frame());
}

TEST(Warped, Validation) {
  EXPECT_THROW(WarpedProductSpec("w", line(), euclidean({"u"}), parse("exp(t)")), ValidationError);
  EXPECT_THROW(WarpedProductSpec("w", line(), euclidean({"u", "v"}), parse("t")), ValidationError);
  EXPECT_THROW(WarpedProductSpec("w", line(), euclidean({"u", "v"}), parse("exp(u)")), ValidationError);
  std::vector<std::string> eight = {"a", "b", "c", "d", "e1", "f", "g", "h"};
  EXPECT_THROW(WarpedProductSpec("w", line(), euclidean(eight), parse("1")), ValidationError);
}

// H^{m+1} = R x_{e^t} R^m: S = -m g, base block -m, fiber block -m e^{2t} delta.
TEST(Warped, HyperbolicSpaceAsALineWarp) {
  for (int m : {2, 3}) {
    const WarpedProductSpec& w = line_warp(m);
    const ManifoldSpec& p = w.product();
    for (const auto& x : sample_points(p.domain(), 5, 30)) {
      const RicciAt r = ricci_at(p, x);
      const auto g = p.metric_values_raw(x);
      for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(r.ricci.data[k], -m * g[k], 1e-10);
      const LemmaBlocks b = lemma_ricci_at(w, std::span(x).first(1), std::span(x).subspan(1));
      EXPECT_NEAR(b.base(0, 0), -m, 1e-12);
      const double e2t = std::exp(2 * x[0]);
      for (int a = 0; a < m; ++a) {
        for (int c = 0; c < m; ++c) EXPECT_NEAR(b.fiber(a, c), a == c ? -m * e2t : 0.0, 1e-12);
      }
      EXPECT_EQ(testing::max_abs(b.mixed), 0.0);
      const TensorValue full = assemble(b, x);
      for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(full.data[k], r.ricci.data[k], 1e-10);
      EXPECT_NEAR(k_at(w, parse("0"), m, std::span(x).first(1)), 0.0, 1e-12);
    }
    const IdentityReport lemma = verify_lemma(w, sample_points(p.domain(), 42, 200));
    EXPECT_TRUE(lemma.pass) << lemma.max_residual;
    for (const auto& r : construction_verify(w, parse("0"), m, 1, sample_points(p.domain(), 42, 50))) {
      EXPECT_TRUE(r.pass) << r.name << " " << r.max_residual;
    }
  }
}

// Lemma against the product chart for a warp with a non-trivial base.
TEST(Warped, LemmaOnACurvedBaseWithANonConstantWarp) {
  const ManifoldSpec base("b", {"x", "y"}, Box{{-1.0, -1.0}, {1.0, 1.0}},
                          matrix({{"1 + x^2/4", "x*y/10"}, {"x*y/10", "2 + sin(y)/2"}}));
  const ManifoldSpec& fiber = catalog_get("sphere-round-2").chart();
  const WarpedProductSpec w("w", base, fiber, parse("2 + sin(x)*cos(y)/2"));
  const IdentityReport r = verify_lemma(w, sample_points(w.product().domain(), 3, 40));
  EXPECT_TRUE(r.pass) << r.max_residual;
}

TEST(Warped, KForATrivialWarpIsMinusLambda) {
  const WarpedProductSpec& w = *catalog_get("generalized-cylinder-fixed").warped;
  EXPECT_NEAR(k_at(w, parse("-ln(z)"), 1.0, std::vector<double>{0.2, 0.3, 4.0}), -1.0, 1e-15);
  EXPECT_NEAR(k_at(w, parse("-ln(z)"), 2.5, std::vector<double>{0.2, 0.3, 4.0}), -2.5, 1e-15);
}

TEST(Warped, ConstructionOnTheRescaledCylinder) {
  const WarpedProductSpec& w = *catalog_get("generalized-cylinder-fixed").warped;
  const auto reports = construction_verify(w, parse("-ln(z)"), 1, 1, sample_points(w.product().domain(), 42, 100));
  ASSERT_EQ(reports.size(), 3u);
  EXPECT_EQ(reports[0].name, "warped-base-equation");
  EXPECT_EQ(reports[1].name, "warped-fiber-einstein");
  EXPECT_EQ(reports[2].name, "warped-product-soliton");
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.name << " " << r.max_residual;
  EXPECT_NEAR(reports[1].extra("k"), -1.0, 1e-12);
  EXPECT_NEAR(reports[1].extra("fiber_ratio"), 0.0, 1e-8);
}

// The unit 3-sphere has S_F = 2 g_F but the construction with k = -1 needs
// S_F = -g_F, leaving S_F - k g_F = 3 g_F.
TEST(Warped, UnitSphereFiberMissesByThreeTimesTheMetric) {
  const WarpedProductSpec& w = *catalog_get("generalized-cylinder").warped;
  const auto reports = construction_verify(w, parse("-ln(z)"), 1, 1, sample_points(w.product().domain(), 42, 100));
  EXPECT_TRUE(reports[0].pass);
  EXPECT_FALSE(reports[1].pass);
  EXPECT_NEAR(reports[1].extra("fiber_ratio"), 3.0, 1e-8);
  EXPECT_NEAR(reports[1].extra("k"), -1.0, 1e-12);
  EXPECT_FALSE(reports[2].pass);
  // In unit fiber directions the product residual is 3: S_F + lambda g_F = 3 g_F.
  const std::vector<double> p = {0.3, -0.2, 2.0, 0.5, -0.4, 0.1};
  const SolitonSpec lifted{parse("-ln(z)"), std::nullopt, 1, 1};
  const TensorValue r = gradient_soliton_residual_at(w.product(), lifted, p);
  const TensorValue framed = frame_components(w.product(), r, p);
  for (int a = 3; a < 6; ++a) EXPECT_NEAR(framed(a, a), 3.0, 1e-9);
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(framed(a, a), 0.0, 1e-9);
}

TEST(Warped, NonConstantK) {
  // phi = 1 + t^2 on the line with a flat fiber: k varies with t.
  const WarpedProductSpec w("w", line(), euclidean({"u", "v"}), parse("1 + t^2"));
  const auto reports = construction_verify(w, parse("0"), 1, 0, sample_points(w.product().domain(), 1, 30));
  EXPECT_FALSE(reports[1].pass);
  EXPECT_NE(reports[1].note.find("k non-constant"), std::string::npos);
  EXPECT_GT(reports[1].extra("k_spread"), 0.1);
}

TEST(Warped, LiftingAProductSoliton) {
  const ManifoldSpec& fixed_fiber = catalog_get("generalized-cylinder-fixed").warped->fiber();
  const SolitonSpec sol{parse("-ln(z)"), std::nullopt, 1, 1};
  const LiftedSoliton lifted = lift_product_soliton(hyperbolic(), sol, fixed_fiber);
  EXPECT_EQ(lifted.product.dim(), 6);
  for (const auto& p : sample_points(lifted.product.domain(), 42, 20)) {
    EXPECT_LT(testing::max_abs(eta_soliton_residual_at(lifted.product, lifted.soliton, p).data), 1e-8);
  }
  EXPECT_THROW(lift_product_soliton(hyperbolic(), sol, catalog_get("sphere-round-3").chart()), PreconditionError);
  // Flat fiber with lambda = 0: the Gaussian on R^2 lifted to R^2 x R^2 is not allowed (lambda = -1 needs S_F = g_F).
  const SolitonSpec gauss{parse("(x^2+y^2)/2"), std::nullopt, -1, 0};
  EXPECT_THROW(lift_product_soliton(euclidean({"x", "y"}), gauss, euclidean({"u", "v"})), PreconditionError);
}

}  // namespace
}  // namespace etasol
