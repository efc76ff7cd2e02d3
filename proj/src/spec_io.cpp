#include "etasol/spec_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace etasol {

using nlohmann::json;
using nlohmann::ordered_json;

const ManifoldSpec& SpecDocument::chart() const {
  if (warped) return warped->product();
  if (manifold) return *manifold;
  throw PreconditionError("spec document '" + name + "' holds no manifold");
}

std::optional<SolitonSpec> SpecDocument::chart_soliton() const {
  if (!soliton || !warped) return soliton;
  SolitonSpec s = *soliton;
  if (s.xi) {
    for (int a = 0; a < warped->m(); ++a) s.xi->push_back(Expr::number(0.0));
  }
  return s;
}

std::optional<double> SpecDocument::expected_value(std::string_view key) const {
  for (const auto& e : expected) {
    if (e.name == key) return e.value;
  }
  return std::nullopt;
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw SpecError((where.empty() ? std::string("/") : where) + ": " + what);
}

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

void reject_unknown_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) fail(child(path, it.key()), "unknown key");
  }
}

const json& require(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(path, std::string("missing required key '") + key + "'");
  return *it;
}

std::string read_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

double read_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

Expr read_expr(const json& j, const std::string& path) {
  if (j.is_number()) return Expr::number(read_number(j, path));
  if (!j.is_string()) fail(path, "expected an expression string or a number");
  try {
    return parse(j.get<std::string>());
  } catch (const ParseError& e) {
    fail(path, e.what());
  }
}

/// A domain bound: a number or a constant expression such as "2*pi".
double read_bound(const json& j, const std::string& path) {
  const Expr e = read_expr(j, path);
  double v = 0.0;
  try {
    v = CompiledExpr(e, std::vector<std::string>{}).eval({});
  } catch (const Error& err) {
    fail(path, err.what());
  }
  if (!std::isfinite(v)) fail(path, "bound is not finite");
  return v;
}

ExprMatrix read_matrix(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of rows");
  ExprMatrix m;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string row_path = child(path, i);
    if (!j[i].is_array()) fail(row_path, "expected an array of entries");
    std::vector<Expr> row;
    for (std::size_t k = 0; k < j[i].size(); ++k) row.push_back(read_expr(j[i][k], child(row_path, k)));
    m.push_back(std::move(row));
  }
  return m;
}

void check_matrix_identifiers(const ExprMatrix& m, const std::vector<std::string>& coords, const std::string& path) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t k = 0; k < m[i].size(); ++k) {
      try {
        validate(m[i][k], coords);
      } catch (const ValidationError& e) {
        fail(child(child(path, i), k), e.what());
      }
    }
  }
}

ManifoldSpec read_manifold(const json& j, const std::string& path, const std::string& default_name,
                           const std::set<std::string>& extra_keys) {
  if (!j.is_object()) fail(path, "expected an object");
  std::set<std::string> allowed = {"name", "description", "dimension", "coordinates", "domain",
                                   "metric", "frame", "periodic"};
  allowed.insert(extra_keys.begin(), extra_keys.end());
  reject_unknown_keys(j, path, allowed);

  std::string name = default_name;
  if (j.contains("name")) name = read_string(j["name"], child(path, "name"));

  const std::string coords_path = child(path, "coordinates");
  const json& cj = require(j, path, "coordinates");
  if (!cj.is_array() || cj.empty()) fail(coords_path, "expected a non-empty array of names");
  std::vector<std::string> coords;
  for (std::size_t i = 0; i < cj.size(); ++i) coords.push_back(read_string(cj[i], child(coords_path, i)));

  if (j.contains("dimension")) {
    const json& d = j["dimension"];
    if (!d.is_number_integer() || d.get<long long>() != static_cast<long long>(coords.size())) {
      fail(child(path, "dimension"), "must be an integer equal to the number of coordinates (" +
                                         std::to_string(coords.size()) + ")");
    }
  }

  const std::string domain_path = child(path, "domain");
  const json& dj = require(j, path, "domain");
  if (!dj.is_object()) fail(domain_path, "expected an object mapping coordinates to [lo, hi]");
  Box box;
  for (const auto& c : coords) {
    auto it = dj.find(c);
    if (it == dj.end()) fail(domain_path, "no interval for coordinate '" + c + "'");
    const std::string ip = child(domain_path, c);
    if (!it->is_array() || it->size() != 2) fail(ip, "expected [lo, hi]");
    box.lower.push_back(read_bound((*it)[0], child(ip, 0)));
    box.upper.push_back(read_bound((*it)[1], child(ip, 1)));
  }
  for (auto it = dj.begin(); it != dj.end(); ++it) {
    if (std::find(coords.begin(), coords.end(), it.key()) == coords.end()) {
      fail(child(domain_path, it.key()), "not a declared coordinate");
    }
  }

  const std::string metric_path = child(path, "metric");
  ExprMatrix metric = read_matrix(require(j, path, "metric"), metric_path);
  std::optional<ExprMatrix> frame;
  if (j.contains("frame")) frame = read_matrix(j["frame"], child(path, "frame"));

  bool periodic = false;
  if (j.contains("periodic")) {
    if (!j["periodic"].is_boolean()) fail(child(path, "periodic"), "expected true or false");
    periodic = j["periodic"].get<bool>();
  }

  for (const auto& c : coords) {
    if (!is_valid_coordinate_name(c)) fail(coords_path, "invalid coordinate name '" + c + "'");
  }
  check_matrix_identifiers(metric, coords, metric_path);
  if (frame) check_matrix_identifiers(*frame, coords, child(path, "frame"));

  try {
    return ManifoldSpec(std::move(name), std::move(coords), std::move(box), std::move(metric), std::move(frame),
                        periodic);
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
}

SolitonSpec read_soliton(const json& j, const std::string& path, const std::vector<std::string>& coords) {
  if (!j.is_object()) fail(path, "expected an object");
  reject_unknown_keys(j, path, {"potential", "xi", "lambda", "mu"});
  SolitonSpec s;
  if (j.contains("potential")) {
    const std::string p = child(path, "potential");
    s.potential = read_expr(j["potential"], p);
    try {
      validate(*s.potential, coords);
    } catch (const ValidationError& e) {
      fail(p, e.what());
    }
  }
  if (j.contains("xi")) {
    const std::string p = child(path, "xi");
    if (!j["xi"].is_array()) fail(p, "expected an array of component expressions");
    if (j["xi"].size() != coords.size()) {
      fail(p, "expected " + std::to_string(coords.size()) + " components");
    }
    std::vector<Expr> xi;
    for (std::size_t i = 0; i < j["xi"].size(); ++i) {
      xi.push_back(read_expr(j["xi"][i], child(p, i)));
      try {
        validate(xi.back(), coords);
      } catch (const ValidationError& e) {
        fail(child(p, i), e.what());
      }
    }
    s.xi = std::move(xi);
  }
  if (!s.potential && !s.xi) fail(path, "needs a potential or xi");
  s.lambda = read_number(require(j, path, "lambda"), child(path, "lambda"));
  s.mu = read_number(require(j, path, "mu"), child(path, "mu"));
  return s;
}

std::vector<ExpectedValue> read_expected(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  std::vector<ExpectedValue> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = child(path, i);
    if (!j[i].is_object()) fail(p, "expected an object");
    reject_unknown_keys(j[i], p, {"name", "value", "source"});
    ExpectedValue e;
    e.name = read_string(require(j[i], p, "name"), child(p, "name"));
    e.value = read_number(require(j[i], p, "value"), child(p, "value"));
    if (j[i].contains("source")) e.source = read_string(j[i]["source"], child(p, "source"));
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

SpecDocument parse_spec(const json& j) {
  if (!j.is_object()) fail("", "spec must be a JSON object");
  SpecDocument d;
  const bool warped = j.contains("base") || j.contains("fiber") || j.contains("warp");
  if (j.contains("name")) d.name = read_string(j["name"], "/name");
  if (j.contains("description")) d.description = read_string(j["description"], "/description");
  if (j.contains("expected")) d.expected = read_expected(j["expected"], "/expected");

  if (warped) {
    reject_unknown_keys(j, "", {"name", "description", "base", "fiber", "warp", "soliton", "expected"});
    ManifoldSpec base = read_manifold(require(j, "", "base"), "/base", "base", {});
    ManifoldSpec fiber = read_manifold(require(j, "", "fiber"), "/fiber", "fiber", {});
    Expr warp = read_expr(require(j, "", "warp"), "/warp");
    try {
      validate(warp, base.coords());
    } catch (const ValidationError& e) {
      fail("/warp", std::string(e.what()) + " (the warp may only use base coordinates)");
    }
    if (j.contains("soliton")) d.soliton = read_soliton(j["soliton"], "/soliton", base.coords());
    if (d.name.empty()) d.name = base.name() + " x " + fiber.name();
    try {
      d.warped.emplace(d.name, std::move(base), std::move(fiber), std::move(warp), d.soliton);
    } catch (const ValidationError& e) {
      fail("", e.what());
    } catch (const DomainError& e) {
      fail("/warp", e.what());
    }
  } else {
    const std::string default_name = d.name.empty() ? std::string("manifold") : d.name;
    d.manifold.emplace(read_manifold(j, "", default_name, {"soliton", "expected"}));
    if (d.name.empty()) d.name = d.manifold->name();
    if (j.contains("soliton")) d.soliton = read_soliton(j["soliton"], "/soliton", d.manifold->coords());
  }
  if (d.soliton) {
    try {
      CompiledSoliton(d.chart(), *d.chart_soliton());
    } catch (const ValidationError& e) {
      fail("/soliton", e.what());
    }
  }
  return d;
}

SpecDocument parse_spec_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SpecError("invalid JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  return parse_spec(j);
}

SpecDocument load_spec_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot read spec file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_spec_text(ss.str());
  } catch (const SpecError& e) {
    throw SpecError(path + ": " + e.what());
  }
}

json manifold_to_json(const ManifoldSpec& m) {
  json j;
  j["name"] = m.name();
  j["dimension"] = m.dim();
  j["coordinates"] = m.coords();
  json domain = json::object();
  for (int i = 0; i < m.dim(); ++i) {
    domain[m.coords()[std::size_t(i)]] = {m.domain().lower[std::size_t(i)], m.domain().upper[std::size_t(i)]};
  }
  j["domain"] = domain;
  auto matrix = [](const ExprMatrix& mat) {
    json rows = json::array();
    for (const auto& row : mat) {
      json r = json::array();
      for (const auto& e : row) r.push_back(to_string(e));
      rows.push_back(r);
    }
    return rows;
  };
  j["metric"] = matrix(m.metric());
  if (m.has_frame()) j["frame"] = matrix(m.frame());
  if (m.periodic()) j["periodic"] = true;
  return j;
}

json spec_to_json(const SpecDocument& d) {
  json j;
  if (d.warped) {
    j["name"] = d.name;
    j["base"] = manifold_to_json(d.warped->base());
    j["fiber"] = manifold_to_json(d.warped->fiber());
    j["warp"] = to_string(d.warped->warp());
  } else if (d.manifold) {
    j = manifold_to_json(*d.manifold);
    j["name"] = d.name;
  }
  if (!d.description.empty()) j["description"] = d.description;
  if (d.soliton) {
    json s;
    if (d.soliton->potential) s["potential"] = to_string(*d.soliton->potential);
    if (d.soliton->xi) {
      json xi = json::array();
      for (const auto& e : *d.soliton->xi) xi.push_back(to_string(e));
      s["xi"] = xi;
    }
    s["lambda"] = d.soliton->lambda;
    s["mu"] = d.soliton->mu;
    j["soliton"] = s;
  }
  if (!d.expected.empty()) {
    json ex = json::array();
    for (const auto& e : d.expected) {
      json v = {{"name", e.name}, {"value", e.value}};
      if (!e.source.empty()) v["source"] = e.source;
      ex.push_back(v);
    }
    j["expected"] = ex;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json numbers(const std::vector<double>& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(number_or_null(x));
  return a;
}

double report_number(const ordered_json& j, const std::string& path) {
  if (j.is_null()) return std::nan("");
  if (!j.is_number()) fail(path, "expected a number or null");
  return j.get<double>();
}

std::vector<double> report_numbers(const ordered_json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(report_number(j[i], child(path, i)));
  return v;
}

const ordered_json& report_field(const ordered_json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(path, std::string("missing required key '") + key + "'");
  return *it;
}

bool report_bool(const ordered_json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

std::string report_string(const ordered_json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

}  // namespace

ordered_json report_to_json(const CheckReport& r) {
  ordered_json j;
  j["schema"] = 1;
  j["tool"] = "etasol";
  j["version"] = r.version;
  j["spec"] = r.spec;
  j["seed"] = r.seed;
  j["points"] = r.points;
  j["tolerance"] = number_or_null(r.tolerance);
  if (r.lambda || r.mu) {
    ordered_json s;
    if (r.lambda) s["lambda"] = number_or_null(*r.lambda);
    if (r.mu) s["mu"] = number_or_null(*r.mu);
    j["soliton"] = s;
  }
  j["pass"] = r.pass;
  ordered_json ids = ordered_json::array();
  for (const auto& id : r.identities) {
    ordered_json e;
    e["name"] = id.name;
    e["max_residual"] = number_or_null(id.max_residual);
    e["tolerance"] = number_or_null(id.tolerance);
    e["pass"] = id.pass;
    e["informational"] = id.informational;
    e["worst_point"] = numbers(id.worst_point);
    if (!id.note.empty()) e["note"] = id.note;
    if (!id.extras.empty()) {
      ordered_json ex = ordered_json::object();
      for (const auto& [k, v] : id.extras) ex[k] = number_or_null(v);
      e["extras"] = ex;
    }
    if (!id.residuals.empty()) e["residuals"] = numbers(id.residuals);
    ids.push_back(e);
  }
  j["identities"] = ids;
  return j;
}

CheckReport report_from_json(const ordered_json& j) {
  if (!j.is_object()) fail("", "report must be a JSON object");
  const ordered_json& schema = report_field(j, "", "schema");
  if (!schema.is_number_integer() || schema.get<int>() != 1) fail("/schema", "unsupported report schema");
  CheckReport r;
  r.version = report_string(report_field(j, "", "version"), "/version");
  r.spec = report_string(report_field(j, "", "spec"), "/spec");
  const ordered_json& seed = report_field(j, "", "seed");
  if (!seed.is_number_unsigned()) fail("/seed", "expected an unsigned integer");
  r.seed = seed.get<std::uint64_t>();
  const ordered_json& points = report_field(j, "", "points");
  if (!points.is_number_unsigned()) fail("/points", "expected an unsigned integer");
  r.points = points.get<std::size_t>();
  r.tolerance = report_number(report_field(j, "", "tolerance"), "/tolerance");
  if (j.contains("soliton")) {
    const ordered_json& s = j["soliton"];
    if (s.contains("lambda")) r.lambda = report_number(s["lambda"], "/soliton/lambda");
    if (s.contains("mu")) r.mu = report_number(s["mu"], "/soliton/mu");
  }
  r.pass = report_bool(report_field(j, "", "pass"), "/pass");
  const ordered_json& ids = report_field(j, "", "identities");
  if (!ids.is_array()) fail("/identities", "expected an array");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::string p = child(std::string("/identities"), i);
    const ordered_json& e = ids[i];
    if (!e.is_object()) fail(p, "expected an object");
    IdentityReport id;
    id.name = report_string(report_field(e, p, "name"), child(p, "name"));
    id.max_residual = report_number(report_field(e, p, "max_residual"), child(p, "max_residual"));
    id.tolerance = report_number(report_field(e, p, "tolerance"), child(p, "tolerance"));
    id.pass = report_bool(report_field(e, p, "pass"), child(p, "pass"));
    id.informational = report_bool(report_field(e, p, "informational"), child(p, "informational"));
    id.worst_point = report_numbers(report_field(e, p, "worst_point"), child(p, "worst_point"));
    if (e.contains("note")) id.note = report_string(e["note"], child(p, "note"));
    if (e.contains("extras")) {
      const ordered_json& ex = e["extras"];
      if (!ex.is_object()) fail(child(p, "extras"), "expected an object");
      for (auto it = ex.begin(); it != ex.end(); ++it) {
        id.extras.emplace_back(it.key(), report_number(it.value(), child(child(p, "extras"), it.key())));
      }
    }
    if (e.contains("residuals")) id.residuals = report_numbers(e["residuals"], child(p, "residuals"));
    r.identities.push_back(std::move(id));
  }
  return r;
}

std::string dump_report(const CheckReport& r) { return report_to_json(r).dump(2) + "\n"; }

}  // namespace etasol
