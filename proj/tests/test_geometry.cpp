#include <gtest/gtest.h>

#include "etasol/checks.hpp"
#include "etasol/geometry.hpp"
#include "test_util.hpp"

namespace etasol {
namespace {

using testing::cube;
using testing::euclidean;
using testing::hyperbolic;
using testing::lumpy;
using testing::matrix;
using testing::Rng;

std::vector<double> random_point(Rng& rng, const Box& b) {
  std::vector<double> p;
  for (std::size_t i = 0; i < b.dim(); ++i) p.push_back(rng.uniform(b.lower[i], b.upper[i]));
  return p;
}

TEST(Geometry, EuclideanIsFlat) {
  const ManifoldSpec m = euclidean({"x", "y", "z"});
  const std::vector<double> p = {0.3, -1.2, 0.8};
  EXPECT_EQ(testing::max_abs(christoffel_at(m, p).data), 0.0);
  EXPECT_EQ(testing::max_abs(riemann_at(m, p).data), 0.0);
  const RicciAt r = ricci_at(m, p);
  EXPECT_EQ(testing::max_abs(r.ricci.data), 0.0);
  EXPECT_EQ(r.scal, 0.0);
}

// g = e^{2 s} delta with s = -ln z:
// Gamma^k_ij = delta_ik d_j s + delta_jk d_i s - delta_ij d_k s, d s = (0, 0, -1/z).
TEST(Geometry, HyperbolicChristoffelClosedForm) {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto p = random_point(rng, hyperbolic().domain());
    const TensorValue G = christoffel_at(hyperbolic(), p);
    const double ds[3] = {0.0, 0.0, -1.0 / p[2]};
    for (int k = 0; k < 3; ++k) {
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          const double expect = (i == k) * ds[j] + (j == k) * ds[i] - (i == j) * ds[k];
          EXPECT_NEAR(G(k, i, j), expect, 1e-12 * std::max(1.0, std::abs(expect)));
        }
      }
    }
  }
}

TEST(Geometry, HyperbolicRicciIsMinusTwoG) {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto p = random_point(rng, hyperbolic().domain());
    const RicciAt r = ricci_at(hyperbolic(), p);
    const double g = 1.0 / (p[2] * p[2]);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) EXPECT_NEAR(r.ricci(i, j), i == j ? -2.0 * g : 0.0, 1e-10 * g);
    }
    EXPECT_NEAR(r.scal, -6.0, 1e-10);
    const TensorValue framed = frame_components(hyperbolic(), r.ricci, p);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) EXPECT_NEAR(framed(a, b), a == b ? -2.0 : 0.0, 1e-10);
    }
  }
}

// Unit sphere: R^l_ijk = delta^l_i g_jk - delta^l_j g_ik.
TEST(Geometry, SphereHasConstantCurvatureOne) {
  for (const char* id : {"sphere-round-2", "sphere-round-3"}) {
    const ManifoldSpec& m = catalog_get(id).chart();
    const int n = m.dim();
    Rng rng(3);
    for (int t = 0; t < 10; ++t) {
      const auto p = random_point(rng, m.domain());
      const LocalGeometry geo(m, p);
      const TensorValue R = geo.riemann();
      const TensorValue g = geo.metric();
      for (int l = 0; l < n; ++l) {
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
              const double expect = (l == i) * g(j, k) - (l == j) * g(i, k);
              EXPECT_NEAR(R(l, i, j, k), expect, 1e-9) << id;
            }
          }
        }
      }
      const TensorValue S = geo.ricci();
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) EXPECT_NEAR(S(i, j), (n - 1) * g(i, j), 1e-9) << id;
      }
      EXPECT_NEAR(geo.scal(), n * (n - 1), 1e-9) << id;
    }
  }
}

// Independent finite-difference Christoffel symbols: central differences of
// the metric entries and a Gauss-Jordan inverse.
std::vector<double> inverse(std::vector<double> a, int n) {
  std::vector<double> inv(std::size_t(n * n), 0.0);
  for (int i = 0; i < n; ++i) inv[std::size_t(i * n + i)] = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(a[std::size_t(r * n + c)]) > std::abs(a[std::size_t(piv * n + c)])) piv = r;
    }
    for (int k = 0; k < n; ++k) {
      std::swap(a[std::size_t(c * n + k)], a[std::size_t(piv * n + k)]);
      std::swap(inv[std::size_t(c * n + k)], inv[std::size_t(piv * n + k)]);
    }
    const double d = a[std::size_t(c * n + c)];
    for (int k = 0; k < n; ++k) {
      a[std::size_t(c * n + k)] /= d;
      inv[std::size_t(c * n + k)] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[std::size_t(r * n + c)];
      for (int k = 0; k < n; ++k) {
        a[std::size_t(r * n + k)] -= f * a[std::size_t(c * n + k)];
        inv[std::size_t(r * n + k)] -= f * inv[std::size_t(c * n + k)];
      }
    }
  }
  return inv;
}

void expect_christoffel_matches_differences(const ManifoldSpec& m, int points, std::uint64_t seed) {
  const int n = m.dim();
  const auto samples = sample_points(m.domain(), seed, std::size_t(points));
  const double h = 1e-5;
  for (const auto& p : samples) {
    std::vector<std::vector<double>> dg(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) {
      auto qp = p, qm = p;
      qp[std::size_t(l)] += h;
      qm[std::size_t(l)] -= h;
      const auto a = m.metric_values_raw(qp), b = m.metric_values_raw(qm);
      for (std::size_t k = 0; k < a.size(); ++k) dg[std::size_t(l)].push_back((a[k] - b[k]) / (2 * h));
    }
    const auto ginv = inverse(m.metric_values_raw(p), n);
    const TensorValue G = christoffel_at(m, p);
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) {
            s += 0.5 * ginv[std::size_t(k * n + l)] *
                 (dg[std::size_t(i)][std::size_t(j * n + l)] + dg[std::size_t(j)][std::size_t(i * n + l)] -
                  dg[std::size_t(l)][std::size_t(i * n + j)]);
          }
          EXPECT_NEAR(G(k, i, j), s, 1e-5 * std::max(1.0, std::abs(s))) << m.name();
        }
      }
    }
  }
}

TEST(Geometry, ChristoffelMatchesFiniteDifferencesOnEveryCatalogChart) {
  for (const auto& id : catalog_ids()) expect_christoffel_matches_differences(catalog_get(id).chart(), 20, 99);
  expect_christoffel_matches_differences(lumpy(), 20, 99);
}

TEST(Geometry, RicciIsScaleInvariant) {
  Rng rng(4);
  for (const ManifoldSpec& m : {lumpy(), catalog_get("sphere-round-3").chart(), hyperbolic()}) {
    for (double c : {0.25, 3.0}) {
      const ManifoldSpec s = m.scaled(c, "scaled");
      const auto p = random_point(rng, m.domain());
      const RicciAt a = ricci_at(m, p), b = ricci_at(s, p);
      for (std::size_t k = 0; k < a.ricci.data.size(); ++k) {
        EXPECT_NEAR(b.ricci.data[k], a.ricci.data[k], 1e-9 * std::max(1.0, std::abs(a.ricci.data[k])));
      }
      EXPECT_NEAR(b.scal, a.scal / c, 1e-9 * std::max(1.0, std::abs(a.scal)));
      const TensorValue ga = christoffel_at(m, p), gb = christoffel_at(s, p);
      for (std::size_t k = 0; k < ga.data.size(); ++k) EXPECT_NEAR(gb.data[k], ga.data[k], 1e-10);
    }
  }
}

TEST(Geometry, CurvatureSymmetriesOnAGenericMetric) {
  const ManifoldSpec m = lumpy();
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    const auto p = random_point(rng, m.domain());
    const LocalGeometry geo(m, p);
    const TensorValue R = geo.riemann();
    const TensorValue g = geo.metric();
    // R_{lijk} = g_{lm} R^m_{ijk}: antisymmetric in (i, j), pair-symmetric, first Bianchi.
    auto lower = [&](int l, int i, int j, int k) {
      double s = 0.0;
      for (int a = 0; a < 3; ++a) s += g(l, a) * R(a, i, j, k);
      return s;
    };
    for (int l = 0; l < 3; ++l) {
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          for (int k = 0; k < 3; ++k) {
            EXPECT_NEAR(R(l, i, j, k), -R(l, j, i, k), 1e-10);
            EXPECT_NEAR(lower(l, i, j, k), lower(j, k, l, i), 1e-9);
            EXPECT_NEAR(R(l, i, j, k) + R(l, j, k, i) + R(l, k, i, j), 0.0, 1e-10);
          }
        }
      }
    }
    const auto ds = geo.d_scal();
    const auto dv = geo.div_ricci();
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(ds[std::size_t(j)], 2.0 * dv[std::size_t(j)], 1e-8);
    for (const auto& r : structural_checks(m, geo, 1e-8)) EXPECT_TRUE(r.pass) << r.name << " " << r.max_residual;
  }
}

TEST(Geometry, KillingFieldsHaveVanishingLieDerivative) {
  const std::vector<Expr> rotation = {parse("-y"), parse("x"), parse("0")};
  const std::vector<Expr> dilation = {parse("x"), parse("y"), parse("z")};
  const std::vector<double> p = {0.7, -1.1, 2.3};
  EXPECT_LT(testing::max_abs(lie_metric_at(euclidean({"x", "y", "z"}), rotation, p).data), 1e-14);
  EXPECT_LT(testing::max_abs(lie_metric_at(hyperbolic(), rotation, p).data), 1e-14);
  EXPECT_LT(testing::max_abs(lie_metric_at(hyperbolic(), dilation, p).data), 1e-14);
  // The dilation is not Killing for the flat metric: L g = 2 g.
  const TensorValue L = lie_metric_at(euclidean({"x", "y", "z"}), dilation, p);
  EXPECT_DOUBLE_EQ(L(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(L(0, 1), 0.0);
}

// div X = z^3 d_i (z^-3 X^i) on the upper half-space.
TEST(Geometry, DivergenceAgainstVolumeFormula) {
  const std::vector<double> p = {0.4, 0.2, 1.7};
  EXPECT_NEAR(divergence_at(hyperbolic(), {FieldKind::Vector, {parse("0"), parse("0"), parse("z")}}, p)[0], -2.0,
              1e-12);
  // X = (x z, 0, z^2): z^3 (d_x(x z^-2) + d_z(z^-1)) = z^3 (z^-2 - z^-2) = 0
  EXPECT_NEAR(divergence_at(hyperbolic(), {FieldKind::Vector, {parse("x*z"), parse("0"), parse("z^2")}}, p)[0],
              0.0, 1e-12);
  EXPECT_NEAR(divergence_at(euclidean({"x", "y", "z"}), {FieldKind::Vector, {parse("-y"), parse("x"), parse("0")}}, p)[0],
              0.0, 1e-15);
  EXPECT_NEAR(divergence_at(euclidean({"x", "y", "z"}), {FieldKind::Vector, {parse("x"), parse("y"), parse("z")}}, p)[0],
              3.0, 1e-15);
  // One-form df with f = -ln z equals the divergence of grad f = -z d_z: 2.
  EXPECT_NEAR(divergence_at(hyperbolic(), {FieldKind::OneForm, {parse("0"), parse("0"), parse("-1/z")}}, p)[0], 2.0,
              1e-12);
  // div g = 0 and div S = 0 on an Einstein space with constant scalar curvature.
  const auto divg = divergence_at(hyperbolic(), {FieldKind::Sym2, [] {
                                                   std::vector<Expr> g(9, parse("0"));
                                                   g[0] = g[4] = g[8] = parse("1/z^2");
                                                   return g;
                                                 }()},
                                  p);
  EXPECT_LT(testing::max_abs(divg), 1e-12);
}

TEST(Geometry, HessianAndLaplacian) {
  const ScalarOps e = scalar_ops_at(euclidean({"x", "y"}), parse("(x^2 + y^2)/2"), std::vector<double>{0.3, 0.9});
  EXPECT_DOUBLE_EQ(e.hessian(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(e.hessian(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(e.hessian(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(e.laplacian, 2.0);
  EXPECT_DOUBLE_EQ(e.gradient[1], 0.9);
  // f = -ln z on the upper half-space: grad f = -z d_z, Lap f = 2.
  const ScalarOps h = scalar_ops_at(hyperbolic(), parse("-ln(z)"), std::vector<double>{1.0, 2.0, 3.0});
  EXPECT_NEAR(h.gradient[2], -3.0, 1e-12);
  EXPECT_NEAR(h.laplacian, 2.0, 1e-12);
}

TEST(Geometry, ParallelRicciOnTheHyperbolicExample) {
  const std::vector<double> p = {-1.0, 3.0, 0.4};
  const NablaRicci nr = nabla_ricci_at(hyperbolic(), p);
  EXPECT_LT(testing::max_abs(nr.nabla_ricci.data), 1e-9);
  EXPECT_LT(testing::max_abs(nr.d_scal), 1e-9);
}

TEST(Geometry, SquaredNormUsesTheInverseMetric) {
  const std::vector<double> p = {0.0, 0.0, 2.0};
  const LocalGeometry geo(hyperbolic(), p);
  // |g|^2 = n in any metric
  EXPECT_NEAR(squared_norm(geo, geo.metric()), 3.0, 1e-12);
  EXPECT_NEAR(squared_norm_at(hyperbolic(), ricci_at(hyperbolic(), p).ricci, p), 12.0, 1e-10);
}

TEST(Geometry, FrameDefects) {
  EXPECT_LT(frame_orthonormality_defect(hyperbolic(), std::vector<double>{1.0, 1.0, 5.0}), 1e-14);
  const ManifoldSpec bad("bad", {"x", "y"}, cube(2, 1.0, 2.0), matrix({{"x^2", "0"}, {"0", "1"}}),
                         matrix({{"1", "0"}, {"0", "1"}}));
  EXPECT_NEAR(frame_orthonormality_defect(bad, std::vector<double>{1.5, 1.5}), 1.25, 1e-14);
  const ManifoldSpec noframe = lumpy();
  EXPECT_THROW(frame_orthonormality_defect(noframe, std::vector<double>{0, 0, 0}), PreconditionError);
}

TEST(Geometry, SingularAndIndefiniteMetrics) {
  const ManifoldSpec degenerate("deg", {"x", "y"}, cube(2, -1.0, 1.0), matrix({{"x^2", "0"}, {"0", "1"}}));
  EXPECT_THROW(LocalGeometry(degenerate, std::vector<double>{0.0, 0.5}), SingularMetricError);
  const ManifoldSpec lorentz("lor", {"x", "y"}, cube(2, -1.0, 1.0), matrix({{"-1", "0"}, {"0", "1"}}));
  EXPECT_THROW(LocalGeometry(lorentz, std::vector<double>{0.0, 0.5}), SingularMetricError);
  try {
    LocalGeometry(degenerate, std::vector<double>{0.0, 0.5});
  } catch (const SingularMetricError& e) {
    EXPECT_EQ(e.point(), (std::vector<double>{0.0, 0.5}));
  }
}

TEST(Geometry, ManifoldValidation) {
  EXPECT_THROW(ManifoldSpec("m", {"x", "x"}, cube(2, 0, 1), testing::identity_matrix(2)), ValidationError);
  EXPECT_THROW(ManifoldSpec("m", {"pi"}, cube(1, 0, 1), testing::identity_matrix(1)), ValidationError);
  EXPECT_THROW(ManifoldSpec("m", {"x"}, cube(1, 1, 0), testing::identity_matrix(1)), ValidationError);
  EXPECT_THROW(ManifoldSpec("m", {"x", "y"}, cube(2, 0, 1), testing::identity_matrix(3)), ValidationError);
  EXPECT_THROW(ManifoldSpec("m", {"x"}, cube(1, 0, 1), matrix({{"q"}})), ValidationError);
  EXPECT_THROW(ManifoldSpec("m", {"x"}, cube(1, -1, 1), matrix({{"2 + x^0.5"}})), ValidationError);
  std::vector<std::string> nine;
  for (int i = 0; i < 9; ++i) nine.push_back("x" + std::to_string(i));
  EXPECT_THROW(ManifoldSpec("m", nine, cube(9, 0, 1), testing::identity_matrix(9)), ValidationError);
}

}  // namespace
}  // namespace etasol
