#include "etasol/suite.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "etasol/catalog.hpp"
#include "etasol/checks.hpp"

namespace etasol {

const char* version() noexcept { return ETASOL_VERSION; }

namespace {

/// Calls fn(i) for i in [0, count) on up to `threads` workers. Exceptions are
/// rethrown after all workers stop; the one from the lowest index wins.
template <typename Fn>
void for_each_index(std::size_t count, unsigned threads, Fn fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::vector<std::exception_ptr> errors(count);
  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < count; i += threads) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void append(std::vector<IdentityReport>& out, std::vector<IdentityReport> more) {
  for (auto& r : more) out.push_back(std::move(r));
}

}  // namespace

std::vector<IdentityReport> point_identities(const SpecDocument& doc, const CompiledSoliton* sol,
                                             const CompiledSoliton* base_sol, std::span<const double> p,
                                             double tol) {
  const ManifoldSpec& chart = doc.chart();
  LocalGeometry geo(chart, p);
  std::vector<IdentityReport> out = structural_checks(chart, geo, tol);
  if (sol) {
    SolitonPoint sp(geo, *sol);
    const bool pot = sol->has_potential();
    out.push_back(sp.eta_soliton(tol));
    if (pot) {
      out.push_back(sp.gradient_soliton(tol));
      out.push_back(sp.eta_gradient_consistency(tol));
      out.push_back(sp.hessian_symmetry(tol));
      if (sol->has_explicit_xi()) out.push_back(sp.xi_matches_grad_f(tol));
    }
    out.push_back(sp.traced_soliton(tol));
    out.push_back(sp.traced_consistency(tol));
    if (pot) {
      append(out, sp.bochner_suite(tol));
      out.push_back(sp.gradient_norm_laplacian(tol));
      out.push_back(sp.ricci_operator_derivative_all(tol));
      auto kenmotsu = sp.kenmotsu_suite(tol);
      // The structure is a hypothesis, not a claim about every soliton.
      if (kenmotsu.front().failed()) {
        kenmotsu.front().informational = true;
        kenmotsu.front().note = "not a Kenmotsu structure here";
      }
      append(out, std::move(kenmotsu));
      if (sol->mu() != 0.0) {
        out.push_back(sp.kenmotsu_laplacian(tol));
        out.push_back(sp.kenmotsu_constants(tol));
        out.push_back(sp.csw_constant(tol));
      }
      append(out, sp.pointwise_lemmas(tol));
    } else {
      out.push_back(sp.bochner_formula(tol));
    }
  }
  if (base_sol && doc.warped && base_sol->has_potential()) {
    const WarpedProductSpec& w = *doc.warped;
    const std::span<const double> bp = p.first(std::size_t(w.n()));
    LocalGeometry bgeo(w.base(), bp);
    SolitonPoint bsp(bgeo, *base_sol);
    const WarpTerms terms{w.compiled_warp(), w.m(), base_sol->lambda(), base_sol->mu()};
    for (auto& r : bsp.pointwise_lemmas(tol, &terms)) {
      if (r.name == "warped-base-trace") {
        r.worst_point.assign(p.begin(), p.end());
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

CheckReport run_check(const SpecDocument& doc, const CheckOptions& opt) {
  const ManifoldSpec& chart = doc.chart();
  const auto samples = sample_points(chart.domain(), opt.seed, opt.points);

  std::optional<CompiledSoliton> sol;
  std::optional<CompiledSoliton> base_sol;
  if (const auto cs = doc.chart_soliton()) sol.emplace(chart, *cs);
  if (doc.warped && doc.soliton) base_sol.emplace(doc.warped->base(), *doc.soliton);

  std::vector<std::vector<IdentityReport>> per_point(samples.size());
  for_each_index(samples.size(), opt.threads, [&](std::size_t i) {
    per_point[i] = point_identities(doc, sol ? &*sol : nullptr, base_sol ? &*base_sol : nullptr, samples[i],
                                    opt.tolerance);
  });

  CheckReport r;
  r.version = version();
  r.spec = doc.name;
  r.seed = opt.seed;
  r.points = samples.size();
  r.tolerance = opt.tolerance;
  if (doc.soliton) {
    r.lambda = doc.soliton->lambda;
    r.mu = doc.soliton->mu;
  }
  r.identities = merge_sweep(per_point, opt.keep_residuals);

  if (doc.warped) {
    const WarpedProductSpec& w = *doc.warped;
    r.identities.push_back(verify_lemma(w, samples, opt.tolerance));
    if (doc.soliton && doc.soliton->potential) {
      append(r.identities, construction_verify(w, *doc.soliton->potential, doc.soliton->lambda, doc.soliton->mu,
                                               samples, opt.tolerance));
    }
  }
  r.pass = all_pass(r.identities);
  return r;
}

FitResult run_fit(const SpecDocument& doc, const FitOptions& opt) {
  const auto cs = doc.chart_soliton();
  if (!cs || !cs->potential) throw PreconditionError("spec '" + doc.name + "' has no potential to fit");
  const auto samples = sample_points(doc.chart().domain(), opt.seed, opt.points);
  return fit_constants(doc.chart(), *cs->potential, opt.mode, samples);
}

DescribeSummary run_describe(const SpecDocument& doc, std::uint64_t seed, std::size_t points) {
  const ManifoldSpec& chart = doc.chart();
  const auto samples = sample_points(chart.domain(), seed, points);
  DescribeSummary d;
  d.name = doc.name;
  d.dim = chart.dim();
  d.points = samples.size();
  d.has_frame = chart.has_frame();
  d.scal_min = INFINITY;
  d.scal_max = -INFINITY;
  const int n = chart.dim();
  for (std::size_t s = 0; s < samples.size(); ++s) {
    LocalGeometry geo(chart, samples[s]);
    const double scal = geo.scal();
    d.scal_min = std::min(d.scal_min, scal);
    d.scal_max = std::max(d.scal_max, scal);
    d.condition_max = std::max(d.condition_max, geo.condition());
    TensorValue dev = geo.ricci();
    const TensorValue g = geo.metric();
    for (std::size_t k = 0; k < dev.data.size(); ++k) dev.data[k] -= scal / n * g.data[k];
    d.einstein_deviation = std::max(d.einstein_deviation, std::sqrt(std::max(0.0, squared_norm(geo, dev))));
    if (d.has_frame) {
      d.frame_defect = std::max(d.frame_defect, frame_orthonormality_defect(chart, samples[s]));
      if (s == 0) d.frame_ricci = frame_components(chart, geo.ricci(), samples[s]);
    }
    if (s == 0) d.sample_point = samples[s];
  }
  return d;
}

}  // namespace etasol
