#include <gtest/gtest.h>

#include <sstream>

#include "etasol/quadrature.hpp"
#include "test_util.hpp"

namespace etasol {
namespace {

using testing::Rng;

const ManifoldSpec& torus2() { return catalog_get("flat-torus-2").chart(); }

PeriodicGrid grid2(int res) { return PeriodicGrid::over(torus2(), res); }

TEST(Quadrature, ClosedFormIntegrals) {
  const PeriodicGrid g = grid2(64);
  const double pi = M_PI;
  EXPECT_NEAR(integrate(g, [](std::span<const double>) { return 1.0; }), 4 * pi * pi, 1e-12);
  EXPECT_NEAR(integrate(g, [](std::span<const double> p) { return std::sin(p[0]) * std::sin(p[0]); }), 2 * pi * pi,
              1e-12);
  EXPECT_NEAR(integrate(g, [](std::span<const double> p) { return std::sin(p[0]) * std::cos(p[1]); }), 0.0, 1e-12);
  EXPECT_NEAR(integrate(g, torus2(), parse("1")), 4 * pi * pi, 1e-12);
  EXPECT_NEAR(integrate(g, torus2(), parse("cos(x)^2 * cos(y)^2")), pi * pi, 1e-12);
}

struct Trig {
  std::string text;
  double integral = 0.0;  // exact integral over [0, 2 pi)^2
};

// Random trigonometric polynomial with frequencies below max_degree. Only a
// cos(0 x + 0 y) term has a non-zero integral.
Trig random_trig(Rng& rng, int max_degree, int terms) {
  std::ostringstream os;
  os.precision(17);
  Trig t;
  for (int k = 0; k < terms; ++k) {
    const int a = rng.integer(0, max_degree - 1), b = rng.integer(-(max_degree - 1), max_degree - 1);
    const bool is_sin = rng.integer(0, 1) == 1;
    const double c = rng.uniform(-1, 1);
    if (k) os << " + ";
    os << "(" << c << ")*" << (is_sin ? "sin" : "cos") << "(" << a << "*x + (" << b << ")*y)";
    if (!is_sin && a == 0 && b == 0) t.integral += c * 4 * M_PI * M_PI;
  }
  t.text = os.str();
  return t;
}

TEST(Quadrature, TrigonometricPolynomialsAreIntegratedExactly) {
  Rng rng(31);
  const PeriodicGrid g = grid2(16);
  for (int trial = 0; trial < 25; ++trial) {
    const Trig t = random_trig(rng, 2 + trial % 7, 6);
    EXPECT_NEAR(integrate(g, torus2(), parse(t.text)), t.integral, 1e-12) << t.text;
  }
  EXPECT_NEAR(integrate(g, torus2(), parse("cos(0*x) + 3*cos(0*y + 0*x)")), 16 * M_PI * M_PI, 1e-12);
  // At twice the Nyquist limit the rule aliases: cos(16 x) on 16 nodes integrates to 4 pi^2, not 0.
  EXPECT_NEAR(integrate(g, torus2(), parse("cos(16*x)")), 4 * M_PI * M_PI, 1e-10);
  EXPECT_NEAR(integrate(g, torus2(), parse("cos(8*x)")), 0.0, 1e-12);
}

TEST(Quadrature, DivergenceTheorem) {
  const PeriodicGrid g = grid2(64);
  const std::vector<Expr> x1 = {parse("sin(x)"), parse("0")};
  EXPECT_TRUE(check_divergence_theorem(g, torus2(), x1).pass);
  // grad(sin x cos y)
  const std::vector<Expr> x2 = {parse("cos(x)*cos(y)"), parse("-sin(x)*sin(y)")};
  EXPECT_TRUE(check_divergence_theorem(g, torus2(), x2).pass);
  Rng rng(77);
  for (int trial = 0; trial < 25; ++trial) {
    const std::vector<Expr> field = {parse(random_trig(rng, 6, 5).text), parse(random_trig(rng, 6, 5).text)};
    const IdentityReport r = check_divergence_theorem(g, torus2(), field);
    EXPECT_EQ(r.name, "divergence-theorem");
    EXPECT_LE(r.max_residual, 1e-8);
  }
}

TEST(Quadrature, IntegrationByParts) {
  const PeriodicGrid g = grid2(64);
  const IdentityReport sx = check_parts(g, torus2(), parse("sin(x)"), parse("sin(x)"));
  EXPECT_TRUE(sx.pass);
  EXPECT_NEAR(sx.extra("gradient_pairing"), 2 * M_PI * M_PI, 1e-10);
  EXPECT_NEAR(sx.extra("laplacian_pairing"), -2 * M_PI * M_PI, 1e-10);
  const IdentityReport c = check_parts(g, torus2(), parse("3"), parse("sin(x)*cos(2*y)"));
  EXPECT_NEAR(c.extra("gradient_pairing"), 0.0, 1e-12);
  EXPECT_NEAR(c.extra("laplacian_pairing"), 0.0, 1e-11);
  const IdentityReport o = check_parts(g, torus2(), parse("cos(y)"), parse("sin(x)"));
  EXPECT_NEAR(o.extra("gradient_pairing"), 0.0, 1e-12);
  EXPECT_NEAR(o.extra("laplacian_pairing"), 0.0, 1e-12);
  Rng rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const IdentityReport r = check_parts(g, torus2(), parse(random_trig(rng, 6, 5).text), parse(random_trig(rng, 6, 5).text));
    EXPECT_LE(r.max_residual, 1e-8);
  }
}

TEST(Quadrature, ThreeTorus) {
  const ManifoldSpec& t3 = catalog_get("flat-torus-3").chart();
  const PeriodicGrid g = PeriodicGrid::over(t3, 16);
  EXPECT_NEAR(integrate(g, t3, parse("1 + sin(x)*cos(z)")), std::pow(2 * M_PI, 3), 1e-9);
  EXPECT_TRUE(check_parts(g, t3, parse("cos(x+y)"), parse("sin(2*z - x)")).pass);
}

TEST(Quadrature, Errors) {
  EXPECT_THROW(grid2(7), ValidationError);
  EXPECT_THROW(PeriodicGrid({0.0}, {0.0}, 16), ValidationError);
  EXPECT_THROW(PeriodicGrid({0.0, 0.0}, {1.0}, 16), ValidationError);
  EXPECT_THROW(PeriodicGrid::over(catalog_get("euclidean-2").chart(), 16), PreconditionError);
  EXPECT_THROW(integrate(grid2(16), torus2(), parse("x")), PreconditionError);
  EXPECT_THROW(check_parts(grid2(16), torus2(), parse("y"), parse("sin(x)")), PreconditionError);
  EXPECT_THROW(integrate(grid2(16), catalog_get("flat-torus-3").chart(), parse("1")), DimensionError);
}

TEST(Quadrature, PairwiseSumIsOrderFixed) {
  std::vector<double> v;
  for (int i = 0; i < 1000; ++i) v.push_back(1.0 / (i + 1));
  EXPECT_EQ(pairwise_sum(v), pairwise_sum(v));
  EXPECT_NEAR(pairwise_sum(v), 7.485470860550345, 1e-13);
  EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
}

TEST(Quadrature, NodesLayout) {
  const PeriodicGrid g = grid2(8);
  EXPECT_EQ(g.node_count(), 64u);
  EXPECT_EQ(g.node(0), (Point{0.0, 0.0}));
  EXPECT_NEAR(g.node(1)[1], 2 * M_PI / 8, 1e-15);
  EXPECT_NEAR(g.node(8)[0], 2 * M_PI / 8, 1e-15);
  EXPECT_NEAR(g.cell_volume(), std::pow(2 * M_PI / 8, 2), 1e-15);
}

}  // namespace
}  // namespace etasol
