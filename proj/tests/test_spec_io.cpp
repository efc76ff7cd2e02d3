#include <gtest/gtest.h>

#include "etasol/catalog.hpp"
#include "etasol/spec_io.hpp"
#include "etasol/suite.hpp"
#include "test_util.hpp"

namespace etasol {
namespace {

using nlohmann::json;
using testing::Rng;

json plane() {
  return json::parse(R"({
    "name": "plane", "dimension": 2, "coordinates": ["x", "y"],
    "domain": {"x": [-1, 1], "y": ["0", "pi"]},
    "metric": [["1", 0], ["0", "1 + x^2"]]
  })");
}

std::string error_of(const json& j) {
  try {
    parse_spec(j);
  } catch (const SpecError& e) {
    return e.what();
  }
  return "";
}

TEST(SpecIo, ParsesAManifold) {
  const SpecDocument d = parse_spec(plane());
  EXPECT_EQ(d.name, "plane");
  EXPECT_FALSE(d.is_warped());
  EXPECT_EQ(d.chart().dim(), 2);
  EXPECT_DOUBLE_EQ(d.chart().domain().upper[1], M_PI);
  EXPECT_FALSE(d.soliton.has_value());
}

TEST(SpecIo, ErrorsCarryTheJsonLocation) {
  json j = plane();
  j["metric"][1][1] = "1 + x^";
  EXPECT_NE(error_of(j).find("/metric/1/1"), std::string::npos) << error_of(j);
  EXPECT_NE(error_of(j).find("offset"), std::string::npos);

  j = plane();
  j["metric"][0][1] = "q";
  EXPECT_NE(error_of(j).find("/metric/0/1"), std::string::npos) << error_of(j);

  j = plane();
  j.erase("metric");
  EXPECT_NE(error_of(j).find("missing required key 'metric'"), std::string::npos);

  j = plane();
  j["dimension"] = 3;
  EXPECT_NE(error_of(j).find("/dimension"), std::string::npos);

  j = plane();
  j["domain"].erase("y");
  EXPECT_NE(error_of(j).find("/domain"), std::string::npos);

  j = plane();
  j["domain"]["w"] = {0, 1};
  EXPECT_NE(error_of(j).find("/domain/w"), std::string::npos);

  j = plane();
  j["metrc"] = 1;
  EXPECT_NE(error_of(j).find("/metrc: unknown key"), std::string::npos);

  j = plane();
  j["metric"] = {{"1", "0"}};
  EXPECT_FALSE(error_of(j).empty());

  j = plane();
  j["soliton"] = {{"potential", "x + w"}, {"lambda", 1}, {"mu", 1}};
  EXPECT_NE(error_of(j).find("/soliton/potential"), std::string::npos);

  j = plane();
  j["soliton"] = {{"xi", {"1"}}, {"lambda", 1}, {"mu", 1}};
  EXPECT_NE(error_of(j).find("/soliton/xi"), std::string::npos);

  j = plane();
  j["soliton"] = {{"potential", "x"}, {"mu", 1}};
  EXPECT_NE(error_of(j).find("lambda"), std::string::npos);

  j = plane();
  j["domain"]["x"] = {1, -1};
  EXPECT_FALSE(error_of(j).empty());

  EXPECT_THROW(parse_spec_text("{\"name\": "), SpecError);
  EXPECT_THROW(parse_spec_text("[]"), SpecError);
  EXPECT_THROW(load_spec_file("/nonexistent/missing.json"), SpecError);
}

TEST(SpecIo, WarpedDocuments) {
  json j;
  j["name"] = "w";
  j["base"] = {{"coordinates", {"t"}}, {"domain", {{"t", {-1, 1}}}}, {"metric", {{"1"}}}};
  j["fiber"] = plane();
  j["warp"] = "exp(t)";
  j["soliton"] = {{"potential", "0"}, {"lambda", 2}, {"mu", 1}};
  const SpecDocument d = parse_spec(j);
  EXPECT_TRUE(d.is_warped());
  EXPECT_EQ(d.chart().dim(), 3);
  EXPECT_EQ(d.chart().coords(), (std::vector<std::string>{"t", "x", "y"}));

  json bad = j;
  bad["warp"] = "exp(x)";
  EXPECT_NE(error_of(bad).find("/warp"), std::string::npos) << error_of(bad);
  bad = j;
  bad["fiber"]["metric"][0][0] = "1 +";
  EXPECT_NE(error_of(bad).find("/fiber/metric/0/0"), std::string::npos) << error_of(bad);
  bad = j;
  bad["warp"] = "t";
  EXPECT_FALSE(error_of(bad).empty());
  bad = j;
  bad["soliton"]["potential"] = "x";
  EXPECT_NE(error_of(bad).find("/soliton/potential"), std::string::npos) << error_of(bad);
}

TEST(SpecIo, ExplicitXiOnAWarpedBaseIsPadded) {
  json j;
  j["base"] = {{"coordinates", {"t"}}, {"domain", {{"t", {-1, 1}}}}, {"metric", {{"1"}}}};
  j["fiber"] = plane();
  j["warp"] = "1";
  j["soliton"] = {{"xi", {"1"}}, {"lambda", 0}, {"mu", 0}};
  const SpecDocument d = parse_spec(j);
  EXPECT_EQ(d.chart_soliton()->xi->size(), 3u);
}

TEST(SpecIo, SpecJsonRoundTrip) {
  for (const auto& id : catalog_ids()) {
    const SpecDocument& d = catalog_get(id);
    const json once = spec_to_json(d);
    const json twice = spec_to_json(parse_spec(once));
    EXPECT_EQ(once, twice) << id;
  }
}

CheckReport random_report(Rng& rng) {
  CheckReport r;
  r.version = "0.1.0";
  r.spec = "spec-" + std::to_string(rng.integer(0, 1000));
  r.seed = rng.engine()();
  r.points = std::size_t(rng.integer(1, 500));
  r.tolerance = std::pow(10.0, rng.uniform(-12, -4));
  if (rng.integer(0, 1)) {
    r.lambda = rng.uniform(-3, 3);
    r.mu = rng.uniform(-3, 3);
  }
  const int ids = rng.integer(0, 6);
  for (int i = 0; i < ids; ++i) {
    IdentityReport id;
    id.name = "identity-" + std::to_string(i);
    id.max_residual = std::abs(rng.uniform(-1, 1)) * std::pow(10.0, rng.integer(-16, 2));
    id.tolerance = 1e-8;
    id.pass = id.max_residual <= id.tolerance;
    id.informational = rng.integer(0, 4) == 0;
    for (int k = 0; k < rng.integer(0, 6); ++k) id.worst_point.push_back(rng.uniform(-10, 10));
    if (rng.integer(0, 1)) id.note = "note " + std::to_string(i);
    if (rng.integer(0, 1)) id.extras = {{"zeta", rng.uniform(-1, 1)}, {"alpha", rng.uniform(-1, 1)}};
    if (rng.integer(0, 1)) id.residuals = {rng.uniform(0, 1), rng.uniform(0, 1)};
    r.identities.push_back(id);
  }
  r.pass = all_pass(r.identities);
  return r;
}

TEST(SpecIo, ReportRoundTrip) {
  Rng rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    const CheckReport r = random_report(rng);
    const std::string text = dump_report(r);
    const CheckReport back = report_from_json(nlohmann::ordered_json::parse(text));
    EXPECT_EQ(back, r);
    EXPECT_EQ(dump_report(back), text);
  }
}

TEST(SpecIo, ReportFromARealRun) {
  CheckOptions opt;
  opt.points = 10;
  const CheckReport r = run_check(catalog_get("hyperbolic-uhs-3"), opt);
  const nlohmann::ordered_json j = report_to_json(r);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["seed"], 42u);
  EXPECT_EQ(j["points"], 10u);
  EXPECT_EQ(j["spec"], "hyperbolic-uhs-3");
  EXPECT_EQ(report_from_json(j), r);
  // overall pass <=> every asserted identity passes
  bool pass = true;
  for (const auto& id : j["identities"]) pass = pass && (id["informational"].get<bool>() || id["pass"].get<bool>());
  EXPECT_EQ(j["pass"].get<bool>(), pass);
}

TEST(SpecIo, NonFiniteNumbersBecomeNull) {
  CheckReport r;
  r.version = "v";
  r.spec = "s";
  IdentityReport id;
  id.name = "n";
  id.max_residual = std::nan("");
  id.pass = false;
  r.identities.push_back(id);
  r.pass = false;
  const auto j = report_to_json(r);
  EXPECT_TRUE(j["identities"][0]["max_residual"].is_null());
  EXPECT_TRUE(std::isnan(report_from_json(j).identities[0].max_residual));
}

TEST(SpecIo, RejectsMalformedReports) {
  EXPECT_THROW(report_from_json(nlohmann::ordered_json::parse(R"({"schema": 2})")), SpecError);
  EXPECT_THROW(report_from_json(nlohmann::ordered_json::parse(R"({"schema": 1})")), SpecError);
  EXPECT_THROW(report_from_json(nlohmann::ordered_json::parse("[]")), SpecError);
}

}  // namespace
}  // namespace etasol
