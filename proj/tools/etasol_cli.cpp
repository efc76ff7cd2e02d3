// etasol: check, fit and describe manifold / soliton specs.
//
// Exit codes: 0 all identities pass, 1 an identity fails, 2 input error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "etasol/catalog.hpp"
#include "etasol/suite.hpp"

namespace {

using namespace etasol;

constexpr int kInputError = 2;

/// A path to an existing file, else a catalog id.
const SpecDocument& resolve(const std::string& arg, std::optional<SpecDocument>& storage) {
  if (std::filesystem::is_regular_file(arg)) {
    storage = load_spec_file(arg);
    return *storage;
  }
  if (catalog_contains(arg)) return catalog_get(arg);
  throw SpecError("'" + arg + "' is neither a readable spec file nor a catalog id (see 'etasol list')");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string point_text(const std::vector<double>& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.6g", i ? ", " : "", p[i]);
    s += buf;
  }
  return s + ")";
}

void print_text(const CheckReport& r) {
  std::cout << "spec " << r.spec << "  seed " << r.seed << "  points " << r.points << "  tolerance "
            << fmt(r.tolerance) << "\n";
  if (r.lambda && r.mu) std::cout << "lambda " << *r.lambda << "  mu " << *r.mu << "\n";
  std::size_t width = 0;
  for (const auto& id : r.identities) width = std::max(width, id.name.size());
  std::size_t failed = 0;
  std::size_t info = 0;
  for (const auto& id : r.identities) {
    const char* tag = id.informational ? "INFO" : (id.pass ? "PASS" : "FAIL");
    if (id.informational) ++info;
    if (id.failed()) ++failed;
    std::cout << tag << "  " << id.name << std::string(width - id.name.size() + 2, ' ') << "max " << fmt(id.max_residual)
              << "  tol " << fmt(id.tolerance);
    if (id.failed() && !id.worst_point.empty()) std::cout << "  at " << point_text(id.worst_point);
    std::cout << "\n";
    if (!id.note.empty()) std::cout << "      " << id.note << "\n";
  }
  std::cout << (r.pass ? "PASS" : "FAIL") << ": " << r.identities.size() << " identities, " << failed << " failed, "
            << info << " informational\n";
}

int cmd_check(const std::string& spec, const CheckOptions& opt, const std::string& format) {
  std::optional<SpecDocument> storage;
  const SpecDocument& doc = resolve(spec, storage);
  const CheckReport r = run_check(doc, opt);
  if (format == "json") {
    std::cout << dump_report(r);
  } else {
    print_text(r);
  }
  return r.pass ? 0 : 1;
}

int cmd_fit(const std::string& spec, const FitOptions& opt) {
  std::optional<SpecDocument> storage;
  const SpecDocument& doc = resolve(spec, storage);
  const FitResult f = run_fit(doc, opt);
  char buf[128];
  if (!f.mu_identifiable) {
    std::snprintf(buf, sizeof buf, "lambda* = %.6f\n", f.lambda);
    std::cout << buf;
    std::cerr << "error: mu is unidentifiable on these samples (the df (x) df column vanishes or is parallel to g)\n";
    return kInputError;
  }
  std::snprintf(buf, sizeof buf, "(lambda*, mu*) = (%.6f, %.6f)\npost-fit max residual = %.3g\n", f.lambda, f.mu,
                f.max_residual);
  std::cout << buf;
  if (!f.worst_point.empty()) std::cout << "worst point " << point_text(f.worst_point) << "\n";
  return 0;
}

int cmd_describe(const std::string& spec, std::uint64_t seed, std::size_t points) {
  std::optional<SpecDocument> storage;
  const SpecDocument& doc = resolve(spec, storage);
  const DescribeSummary d = run_describe(doc, seed, points);
  std::cout << d.name << ": dimension " << d.dim << ", " << d.points << " points\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "scal in [%.9g, %.9g]\nEinstein deviation |S - (scal/n) g| <= %.3g\n", d.scal_min,
                d.scal_max, d.einstein_deviation);
  std::cout << buf;
  std::snprintf(buf, sizeof buf, "metric condition number <= %.3g\n", d.condition_max);
  std::cout << buf;
  if (d.has_frame) {
    std::snprintf(buf, sizeof buf, "frame orthonormality defect <= %.3g\n", d.frame_defect);
    std::cout << buf << "S(E_a, E_b) at " << point_text(d.sample_point) << ":\n";
    for (int a = 0; a < d.dim; ++a) {
      std::cout << "  ";
      for (int b = 0; b < d.dim; ++b) {
        std::snprintf(buf, sizeof buf, "%12.6f", d.frame_ricci(a, b));
        std::cout << buf;
      }
      std::cout << "\n";
    }
  }
  return 0;
}

int cmd_list() {
  for (const auto& id : catalog_ids()) {
    const SpecDocument& d = catalog_get(id);
    std::cout << id;
    if (!d.description.empty()) std::cout << "  " << d.description;
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification of gradient eta-Ricci soliton identities on explicit metrics"};
  app.set_version_flag("--version", std::string(etasol::version()));
  app.require_subcommand(1);

  std::string spec;
  CheckOptions check_opt;
  std::string format = "text";
  auto* check = app.add_subcommand("check", "Run the structural and soliton identity suites");
  check->add_option("spec", spec, "Spec file or catalog id")->required();
  check->add_option("--seed", check_opt.seed, "Sampling seed")->capture_default_str();
  check->add_option("--points", check_opt.points, "Number of sample points")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  check->add_option("--tol", check_opt.tolerance, "Base tolerance, scaled per identity")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  check->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  check->add_option("--threads", check_opt.threads, "Worker threads (0: all cores)")->capture_default_str();
  check->add_flag("--residuals", check_opt.keep_residuals, "Include per-point residuals in JSON output");

  FitOptions fit_opt;
  std::string mode = "eta";
  auto* fit = app.add_subcommand("fit", "Least-squares fit of lambda and mu for the spec's potential");
  fit->add_option("spec", spec, "Spec file or catalog id")->required();
  fit->add_option("--seed", fit_opt.seed, "Sampling seed")->capture_default_str();
  fit->add_option("--points", fit_opt.points, "Number of sample points")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24));
  fit->add_option("--mode", mode, "Residual to fit")->check(CLI::IsMember({"eta", "gradient"}))->capture_default_str();

  std::uint64_t describe_seed = 42;
  std::size_t describe_points = 200;
  auto* describe = app.add_subcommand("describe", "Curvature summary at sampled points");
  describe->add_option("spec", spec, "Spec file or catalog id")->required();
  describe->add_option("--seed", describe_seed, "Sampling seed")->capture_default_str();
  describe->add_option("--points", describe_points, "Number of sample points")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list", "List catalog ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*check) return cmd_check(spec, check_opt, format);
    if (*fit) {
      fit_opt.mode = mode == "gradient" ? FitMode::Gradient : FitMode::Eta;
      return cmd_fit(spec, fit_opt);
    }
    if (*describe) return cmd_describe(spec, describe_seed, describe_points);
    if (*list) return cmd_list();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
