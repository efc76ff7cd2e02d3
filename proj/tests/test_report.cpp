#include <gtest/gtest.h>

#include <cmath>

#include "etasol/checks.hpp"
#include "etasol/report.hpp"

namespace etasol {
namespace {

IdentityReport at(double residual, double x, double tol = 1e-8) {
  return make_report("id", residual, std::vector<double>{x}, tol);
}

TEST(Report, SinglePointPassRule) {
  EXPECT_TRUE(at(1e-9, 0).pass);
  EXPECT_TRUE(at(1e-8, 0).pass);
  EXPECT_FALSE(at(2e-8, 0).pass);
  EXPECT_FALSE(at(std::nan(""), 0).pass);
  const IdentityReport r = not_applicable("id", 5.0, std::vector<double>{1.0}, 1e-8, "hypothesis fails");
  EXPECT_TRUE(r.informational);
  EXPECT_FALSE(r.failed());
  EXPECT_EQ(r.note, "hypothesis fails");
}

TEST(Report, MergeKeepsFirstWorstPoint) {
  const IdentityReport m = merge_reports({at(1e-10, 0), at(3e-9, 1), at(3e-9, 2), at(1e-9, 3)}, true);
  EXPECT_EQ(m.max_residual, 3e-9);
  EXPECT_EQ(m.worst_point, std::vector<double>{1});
  EXPECT_TRUE(m.pass);
  EXPECT_EQ(m.residuals, (std::vector<double>{1e-10, 3e-9, 3e-9, 1e-9}));
  EXPECT_TRUE(merge_reports({at(1e-10, 0), at(3e-9, 1)}).residuals.empty());
}

TEST(Report, MergeFailsOnAnyFailingPointAndOnNaN) {
  EXPECT_FALSE(merge_reports({at(1e-10, 0), at(1e-3, 1)}).pass);
  const IdentityReport m = merge_reports({at(1e-3, 0), at(std::nan(""), 1), at(1e-2, 2)});
  EXPECT_FALSE(m.pass);
  EXPECT_TRUE(std::isnan(m.max_residual));
  EXPECT_EQ(m.worst_point, std::vector<double>{1});
}

TEST(Report, MergeSkipsInapplicablePoints) {
  const IdentityReport na = not_applicable("id", 7.0, std::vector<double>{9.0}, 1e-8, "no");
  const IdentityReport m = merge_reports({at(1e-10, 0), na, at(2e-10, 2)});
  EXPECT_FALSE(m.informational);
  EXPECT_TRUE(m.pass);
  EXPECT_EQ(m.max_residual, 2e-10);
  EXPECT_NE(m.note.find("1 of 3"), std::string::npos);
  const IdentityReport all = merge_reports({na, na});
  EXPECT_TRUE(all.informational);
  EXPECT_FALSE(all.failed());
}

TEST(Report, SweepMergesByColumn) {
  std::vector<std::vector<IdentityReport>> sweep(3);
  for (int p = 0; p < 3; ++p) {
    sweep[std::size_t(p)].push_back(make_report("a", 1e-12 * p, std::vector<double>{double(p)}, 1e-8));
    sweep[std::size_t(p)].push_back(make_report("b", p == 1 ? 1.0 : 0.0, std::vector<double>{double(p)}, 1e-8));
  }
  const auto merged = merge_sweep(sweep);
  ASSERT_EQ(merged.size(), 2u);
  EXPECT_EQ(merged[0].name, "a");
  EXPECT_TRUE(merged[0].pass);
  EXPECT_EQ(merged[1].worst_point, std::vector<double>{1.0});
  EXPECT_FALSE(all_pass(merged));
  EXPECT_TRUE(all_pass({merged[0]}));
}

TEST(Report, ExtrasLookup) {
  IdentityReport r = at(0, 0);
  r.extras = {{"k", -1.0}};
  EXPECT_EQ(r.extra("k"), -1.0);
  EXPECT_TRUE(std::isnan(r.extra("c")));
}

TEST(Report, ToleranceFactors) {
  EXPECT_EQ(tolerance_factor("christoffel-finite-difference"), 1000.0);
  EXPECT_EQ(tolerance_factor("eta-soliton"), 1.0);
  EXPECT_EQ(tolerance_factor("bochner-gradient"), 10.0);
  EXPECT_DOUBLE_EQ(scaled_tolerance("metric-symmetry", 1e-8), 1e-12);
}

}  // namespace
}  // namespace etasol
