#include "etasol/checks.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace etasol {

double tolerance_factor(std::string_view identity) noexcept {
  static const std::map<std::string_view, double> kFactors = {
      {"metric-symmetry", 1e-4},
      {"frame-orthonormality", 1e-2},
      {"metric-compatibility", 1e-2},
      {"riemann-antisymmetry", 0.1},
      {"first-bianchi", 0.1},
      {"ricci-symmetry", 1e-2},
      {"hessian-symmetry", 1e-2},
      {"xi-matches-grad-f", 1e-2},
      {"contracted-bianchi", 10.0},
      {"bochner-formula", 10.0},
      {"bochner-gradient", 10.0},
      {"bochner-laplacian", 10.0},
      {"lie-divergence", 10.0},
      {"gradient-norm-laplacian", 10.0},
      {"ricci-operator-derivative", 10.0},
      {"hessian-divergence", 10.0},
      {"christoffel-finite-difference", 1000.0},
  };
  const auto it = kFactors.find(identity);
  return it == kFactors.end() ? 1.0 : it->second;
}

TensorValue christoffel_finite_difference(const ManifoldSpec& m, std::span<const double> p, double h) {
  const int n = m.dim();
  const auto at = [n](int i, int j) { return std::size_t(i * n + j); };
  std::vector<double> dg(std::size_t(n * n * n));  // (k, i, j) = d_k g_ij
  std::vector<double> q(p.begin(), p.end());
  for (int k = 0; k < n; ++k) {
    q[std::size_t(k)] = p[std::size_t(k)] + h;
    const auto plus = m.metric_values_raw(q);
    q[std::size_t(k)] = p[std::size_t(k)] - h;
    const auto minus = m.metric_values_raw(q);
    q[std::size_t(k)] = p[std::size_t(k)];
    for (std::size_t a = 0; a < plus.size(); ++a) dg[std::size_t(k * n * n) + a] = (plus[a] - minus[a]) / (2.0 * h);
  }
  const auto g = m.metric_values_raw(p);
  Eigen::MatrixXd gm(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) gm(i, j) = g[at(i, j)];
  }
  const Eigen::MatrixXd gi = gm.inverse();
  const auto d = [&](int k, int i, int j) { return dg[std::size_t((k * n + i) * n + j)]; };
  TensorValue t = TensorValue::zeros(1, 2, n, p);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += gi(k, l) * (d(i, j, l) + d(j, i, l) - d(l, i, j));
        t(k, i, j) = 0.5 * s;
      }
    }
  }
  return t;
}

std::vector<IdentityReport> structural_checks(const ManifoldSpec& m, const LocalGeometry& geo, double base_tol) {
  const int n = geo.dim();
  const auto& p = geo.point();
  std::vector<IdentityReport> out;
  auto add = [&](const char* name, double residual) {
    out.push_back(make_report(name, residual, p, scaled_tolerance(name, base_tol)));
  };

  {
    const auto raw = m.metric_values_raw(p);
    double r = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) r = std::max(r, std::abs(raw[geo.idx(i, j)] - raw[geo.idx(j, i)]));
    }
    add("metric-symmetry", r);
  }
  if (m.has_frame()) add("frame-orthonormality", frame_orthonormality_defect(m, p));

  const auto& g = geo.g<0>();
  const auto& dg = geo.dg<0>();
  const auto& gam = geo.gamma<0>();
  {
    double r = 0.0;
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          double v = dg[geo.idx(k, i, j)].value();
          for (int mm = 0; mm < n; ++mm) {
            v -= gam[geo.idx(mm, k, i)].value() * g[geo.idx(mm, j)].value();
            v -= gam[geo.idx(mm, k, j)].value() * g[geo.idx(i, mm)].value();
          }
          r = std::max(r, std::abs(v));
        }
      }
    }
    add("metric-compatibility", r);
  }

  const TensorValue R = geo.riemann();
  {
    // R^l_{ijk} = -R^l_{jik}, and g(R(X,Y)Z, W) = -g(R(X,Y)W, Z).
    double r = 0.0;
    for (int l = 0; l < n; ++l) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            r = std::max(r, std::abs(R(l, i, j, k) + R(l, j, i, k)));
            double low_lk = 0.0;
            double low_kl = 0.0;
            for (int a = 0; a < n; ++a) {
              low_lk += g[geo.idx(l, a)].value() * R(a, i, j, k);
              low_kl += g[geo.idx(k, a)].value() * R(a, i, j, l);
            }
            r = std::max(r, std::abs(low_lk + low_kl));
          }
        }
      }
    }
    add("riemann-antisymmetry", r);
  }
  {
    double r = 0.0;
    for (int l = 0; l < n; ++l) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) r = std::max(r, std::abs(R(l, i, j, k) + R(l, j, k, i) + R(l, k, i, j)));
        }
      }
    }
    add("first-bianchi", r);
  }
  {
    const TensorValue S = geo.ricci();
    double r = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) r = std::max(r, std::abs(S(i, j) - S(j, i)));
    }
    add("ricci-symmetry", r);
  }
  {
    const auto ds = geo.d_scal();
    const auto dv = geo.div_ricci();
    double r = 0.0;
    for (int k = 0; k < n; ++k) r = std::max(r, std::abs(ds[std::size_t(k)] - 2.0 * dv[std::size_t(k)]));
    add("contracted-bianchi", r);
  }
  {
    const TensorValue fd = christoffel_finite_difference(m, p);
    double r = 0.0;
    for (std::size_t a = 0; a < fd.data.size(); ++a) r = std::max(r, std::abs(fd.data[a] - gam[a].value()));
    add("christoffel-finite-difference", r);
  }
  return out;
}

}  // namespace etasol
