#include "sbh/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace sbh {
namespace {

using nlohmann::json;

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw ScenarioError(origin_, field, what);
  }

  const json& member(const json& j, const std::string& ptr, const char* key) const {
    if (!j.is_object()) fail(ptr, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(ptr + "/" + key, "missing required field");
    return *it;
  }

  const json* optional(const json& j, const char* key) const {
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
  }

  double number(const json& j, const std::string& ptr) const {
    if (!j.is_number()) fail(ptr, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(ptr, "expected a finite number");
    return v;
  }

  double number(const json& j, const std::string& ptr, const char* key) const {
    return number(member(j, ptr, key), ptr + "/" + key);
  }

  std::string string(const json& j, const std::string& ptr) const {
    if (!j.is_string()) fail(ptr, "expected a string");
    return j.get<std::string>();
  }

  std::vector<double> numbers(const json& j, const std::string& ptr) const {
    if (!j.is_array()) fail(ptr, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], fmt::format("{}/{}", ptr, i)));
    return out;
  }

  Point point(const json& j, const std::string& ptr, int d) const {
    const std::vector<double> c = numbers(j, ptr);
    if (static_cast<int>(c.size()) != d) fail(ptr, fmt::format("expected a point with {} coordinates", d));
    return Point::from_span(c);
  }

  std::size_t count(const json& j, const std::string& ptr) const {
    if (!j.is_number_integer() || j.get<long long>() < 0) fail(ptr, "expected a nonnegative integer");
    return j.get<std::size_t>();
  }

 private:
  std::string origin_;
};

Domain parse_domain(const Reader& rd, const json& j, const std::string& ptr, int d) {
  const std::string type = rd.string(rd.member(j, ptr, "type"), ptr + "/type");
  try {
    if (type == "interval") {
      if (d != 1) rd.fail(ptr + "/type", "intervals need dimension 1");
      return Interval(rd.number(j, ptr, "a"), rd.number(j, ptr, "b"));
    }
    if (type == "ball") {
      return Ball(rd.point(rd.member(j, ptr, "center"), ptr + "/center", d), rd.number(j, ptr, "radius"));
    }
    std::shared_ptr<const SdfShape> shape;
    if (type == "box") {
      shape = std::make_shared<BoxShape>(rd.point(rd.member(j, ptr, "center"), ptr + "/center", d),
                                         rd.point(rd.member(j, ptr, "half"), ptr + "/half", d));
    } else if (type == "ellipse") {
      if (d != 2) rd.fail(ptr + "/type", "ellipses need dimension 2");
      const std::vector<double> semi = rd.numbers(rd.member(j, ptr, "semi"), ptr + "/semi");
      if (semi.size() != 2) rd.fail(ptr + "/semi", "expected two semi-axes");
      shape = std::make_shared<EllipseShape>(rd.point(rd.member(j, ptr, "center"), ptr + "/center", d), semi[0], semi[1]);
    } else if (type == "ball_union") {
      const json& arr = rd.member(j, ptr, "balls");
      if (!arr.is_array() || arr.empty()) rd.fail(ptr + "/balls", "expected a nonempty array");
      std::vector<Ball> balls;
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string p = fmt::format("{}/balls/{}", ptr, i);
        balls.emplace_back(rd.point(rd.member(arr[i], p, "center"), p + "/center", d), rd.number(arr[i], p, "radius"));
      }
      shape = std::make_shared<BallUnionShape>(std::move(balls));
    } else if (type == "polygon") {
      if (d != 2) rd.fail(ptr + "/type", "polygons need dimension 2");
      const json& arr = rd.member(j, ptr, "vertices");
      if (!arr.is_array()) rd.fail(ptr + "/vertices", "expected an array of points");
      std::vector<Point> v;
      for (std::size_t i = 0; i < arr.size(); ++i) v.push_back(rd.point(arr[i], fmt::format("{}/vertices/{}", ptr, i), 2));
      shape = std::make_shared<PolygonShape>(std::move(v));
    } else {
      rd.fail(ptr + "/type", "unknown domain type '" + type + "'");
    }
    SdfDomain sdf{shape, kGeoEpsSdf};
    if (const json* e = rd.optional(j, "eps_geo")) sdf.eps_geo = rd.number(*e, ptr + "/eps_geo");
    return sdf;
  } catch (const std::invalid_argument& e) {
    rd.fail(ptr, e.what());
  }
}

json domain_to_json(const Domain& D) {
  const auto pt = [](const Point& p) { return std::vector<double>(p.coords().begin(), p.coords().end()); };
  if (const Interval* i = D.as_interval()) return {{"type", "interval"}, {"a", i->a}, {"b", i->b}};
  if (const Ball* b = D.as_ball()) return {{"type", "ball"}, {"center", pt(b->center)}, {"radius", b->radius}};
  const SdfDomain& s = *D.as_sdf();
  json j;
  if (const auto* box = dynamic_cast<const BoxShape*>(s.shape.get())) {
    j = {{"type", "box"}, {"center", pt(box->center())}, {"half", pt(box->half_extents())}};
  } else if (const auto* el = dynamic_cast<const EllipseShape*>(s.shape.get())) {
    j = {{"type", "ellipse"}, {"center", pt(el->center())}, {"semi", {el->semi_x(), el->semi_y()}}};
  } else if (const auto* bu = dynamic_cast<const BallUnionShape*>(s.shape.get())) {
    json arr = json::array();
    for (const Ball& b : bu->balls()) arr.push_back({{"center", pt(b.center)}, {"radius", b.radius}});
    j = {{"type", "ball_union"}, {"balls", arr}};
  } else if (const auto* pg = dynamic_cast<const PolygonShape*>(s.shape.get())) {
    json arr = json::array();
    for (const Point& v : pg->vertices()) arr.push_back(pt(v));
    j = {{"type", "polygon"}, {"vertices", arr}};
  } else {
    throw std::invalid_argument("scenario_to_json: domain '" + s.shape->name() + "' has no JSON form");
  }
  if (s.eps_geo != kGeoEpsSdf) j["eps_geo"] = s.eps_geo;
  return j;
}

HarmonicPolynomial parse_harmonic(const Reader& rd, const json& j, const std::string& ptr) {
  HarmonicPolynomial h;
  if (const json* c = rd.optional(j, "constant")) h.constant = rd.number(*c, ptr + "/constant");
  if (const json* l = rd.optional(j, "linear")) h.linear = rd.numbers(*l, ptr + "/linear");
  if (const json* q = rd.optional(j, "quadratic")) h.quadratic = rd.numbers(*q, ptr + "/quadratic");
  return h;
}

json harmonic_to_json(const HarmonicPolynomial& h) {
  json j = json::object();
  if (h.constant != 0.0) j["constant"] = h.constant;
  if (!h.linear.empty()) j["linear"] = h.linear;
  if (!h.quadratic.empty()) j["quadratic"] = h.quadratic;
  return j;
}

TestFunction parse_function(const Reader& rd, const json& j, const std::string& ptr, const Point& o) {
  const int d = o.dim();
  const std::string kind = rd.string(rd.member(j, ptr, "kind"), ptr + "/kind");
  HarmonicPolynomial h;
  if (const json* hj = rd.optional(j, "harmonic")) h = parse_harmonic(rd, *hj, ptr + "/harmonic");
  try {
    if (kind == "log_poly_abs") {
      if (d != 2) rd.fail(ptr + "/kind", "log_poly_abs needs dimension 2");
      const json& zs = rd.member(j, ptr, "zeros");
      if (!zs.is_array()) rd.fail(ptr + "/zeros", "expected an array of points");
      std::vector<Point> zeros;
      for (std::size_t i = 0; i < zs.size(); ++i) zeros.push_back(rd.point(zs[i], fmt::format("{}/zeros/{}", ptr, i), 2));
      std::vector<double> mult;
      if (const json* m = rd.optional(j, "multiplicities")) mult = rd.numbers(*m, ptr + "/multiplicities");
      return TestFunction::log_poly_abs(std::move(zeros), std::move(mult), o, std::move(h));
    }
    if (kind == "newton_potential") {
      if (d < 3) rd.fail(ptr + "/kind", "newton_potential needs dimension >= 3");
      const json& as = rd.member(j, ptr, "atoms");
      if (!as.is_array()) rd.fail(ptr + "/atoms", "expected an array of atoms");
      std::vector<Atom> atoms;
      for (std::size_t i = 0; i < as.size(); ++i) {
        const std::string p = fmt::format("{}/atoms/{}", ptr, i);
        atoms.push_back({rd.point(rd.member(as[i], p, "loc"), p + "/loc", d), rd.number(as[i], p, "mass")});
      }
      return TestFunction::newton_potential(std::move(atoms), o, std::move(h));
    }
    if (kind == "convex_pl") {
      if (d != 1) rd.fail(ptr + "/kind", "convex_pl needs dimension 1");
      return TestFunction::convex_pl(rd.numbers(rd.member(j, ptr, "breakpoints"), ptr + "/breakpoints"),
                                     rd.numbers(rd.member(j, ptr, "slopes"), ptr + "/slopes"), o[0]);
    }
    if (kind == "harmonic") return TestFunction::harmonic(std::move(h), o);
  } catch (const std::invalid_argument& e) {
    rd.fail(ptr, e.what());
  }
  rd.fail(ptr + "/kind", "unknown function kind '" + kind + "'");
}

json function_to_json(const TestFunction& u) {
  const auto pt = [](const Point& p) { return std::vector<double>(p.coords().begin(), p.coords().end()); };
  json j{{"kind", to_string(u.kind())}};
  switch (u.kind()) {
    case FunctionKind::log_poly_abs: {
      json zeros = json::array();
      std::vector<double> mult;
      for (const Atom& a : u.atoms()) {
        zeros.push_back(pt(a.loc));
        mult.push_back(a.mass);
      }
      j["zeros"] = zeros;
      j["multiplicities"] = mult;
      break;
    }
    case FunctionKind::newton_potential: {
      json atoms = json::array();
      for (const Atom& a : u.atoms()) atoms.push_back({{"loc", pt(a.loc)}, {"mass", a.mass}});
      j["atoms"] = atoms;
      break;
    }
    case FunctionKind::convex_pl:
      j["breakpoints"] = u.breakpoints();
      j["slopes"] = u.slopes();
      return j;
    case FunctionKind::harmonic:
      break;
  }
  json h = harmonic_to_json(u.harmonic_part());
  if (!h.empty()) j["harmonic"] = h;
  return j;
}

RadiusSpec parse_radius(const Reader& rd, const json& j, const std::string& ptr) {
  if (j.is_number()) return {rd.number(j, ptr), false};
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "diam") return {1.0, true};
    if (s.rfind("diam/", 0) == 0) {
      try {
        const double q = std::stod(s.substr(5));
        if (q > 0) return {1.0 / q, true};
      } catch (const std::exception&) {
      }
    }
    rd.fail(ptr, "expected a number, \"diam\" or \"diam/<k>\"");
  }
  if (j.is_object()) return {rd.number(j, ptr, "fraction_of_diameter"), true};
  rd.fail(ptr, "expected a radius");
}

json radius_to_json(const RadiusSpec& r) {
  if (!r.fraction_of_diameter) return r.value;
  return json{{"fraction_of_diameter", r.value}};
}

std::vector<Point> parse_points(const Reader& rd, const json& j, const std::string& ptr, const Domain& D) {
  const int d = D.dim();
  std::vector<Point> S;
  if (const json* pts = rd.optional(j, "points")) {
    if (!pts->is_array()) rd.fail(ptr + "/points", "expected an array of points");
    for (std::size_t i = 0; i < pts->size(); ++i) S.push_back(rd.point((*pts)[i], fmt::format("{}/points/{}", ptr, i), d));
  }
  if (const json* g = rd.optional(j, "grid")) {
    const std::string gp = ptr + "/grid";
    const std::size_t n = rd.count(rd.member(*g, gp, "n"), gp + "/n");
    if (n < 1 || std::pow(static_cast<double>(n), d) > 2e5) rd.fail(gp + "/n", "grid size out of range");
    double margin = 0.05;
    if (const json* m = rd.optional(*g, "margin")) margin = rd.number(*m, gp + "/margin");
    const Box bb = D.bounding_box();
    std::vector<std::size_t> idx(d, 0);
    for (;;) {
      Point p(Dimension{d});
      for (int a = 0; a < d; ++a) {
        const double t = n == 1 ? 0.5 : static_cast<double>(idx[a]) / static_cast<double>(n - 1);
        p[a] = bb.lo[a] + t * (bb.hi[a] - bb.lo[a]);
      }
      if (D.interior_distance(p) >= margin) S.push_back(p);
      int a = 0;
      while (a < d && ++idx[a] == n) idx[a++] = 0;
      if (a == d) break;
    }
  }
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (!(D.interior_distance(S[i]) > 0.0)) rd.fail(fmt::format("{}/points/{}", ptr, i), "evaluation point is not inside D");
  }
  return S;
}

}  // namespace

ScenarioError::ScenarioError(std::string path, std::string field, const std::string& what)
    : std::runtime_error(fmt::format("{}: {}: {}", path, field.empty() ? "/" : field, what)),
      path_(std::move(path)),
      field_(std::move(field)) {}

NestedPair Scenario::pair() const {
  if (!G) throw std::logic_error("scenario has no outer domain G");
  return NestedPair{*D, *G, o};
}

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{
      "harmonic_lower_bound", "pointwise_lower_bound", "refined_lower_bound", "exceptional_set",
      "riesz_mass_bound",     "green_lower_bound",     "green_upper_bound",   "green_potential_bound",
      "poisson_jensen"};
  return names;
}

const std::vector<std::string>& known_slots() {
  static const std::vector<std::string> names{"harnack_D",    "harnack_punctured", "sup_boundary_D", "sup_boundary_G",
                                              "diameter",     "inradius",          "gap",            "majorant_G"};
  return names;
}

Scenario parse_scenario(const std::string& json_text, const std::string& origin) {
  const Reader rd(origin);
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    rd.fail("", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) rd.fail("", "expected a JSON object");
  const json& schema = rd.member(j, "", "schema");
  if (!schema.is_number_integer() || schema.get<int>() != kScenarioSchema) {
    rd.fail("/schema", fmt::format("unsupported schema (expected {})", kScenarioSchema));
  }

  Scenario sc;
  sc.name = rd.string(rd.member(j, "", "name"), "/name");
  if (const json* desc = rd.optional(j, "description")) sc.description = rd.string(*desc, "/description");
  const json& dim = rd.member(j, "", "dimension");
  if (!dim.is_number_integer() || dim.get<int>() < 1 || dim.get<int>() > 3) rd.fail("/dimension", "expected 1, 2 or 3");
  const int d = dim.get<int>();

  sc.o = rd.point(rd.member(j, "", "o"), "/o", d);
  sc.D = parse_domain(rd, rd.member(j, "", "D"), "/D", d);
  if (const json* g = rd.optional(j, "G")) sc.G = parse_domain(rd, *g, "/G", d);
  if (!sc.D->contains(sc.o)) rd.fail("/o", "base point is not inside D");
  if (sc.G) {
    try {
      sc.pair().validate();
    } catch (const GeometryError& e) {
      rd.fail("/G", e.what());
    }
  }

  sc.u = parse_function(rd, rd.member(j, "", "function"), "/function", sc.o);
  if (const json* s = rd.optional(j, "S")) sc.S = parse_points(rd, *s, "/S", *sc.D);

  if (const json* g = rd.optional(j, "gauge")) {
    const std::string type = rd.string(rd.member(*g, "/gauge", "type"), "/gauge/type");
    try {
      if (type == "power") {
        double B = 1.0;
        if (const json* b = rd.optional(*g, "B")) B = rd.number(*b, "/gauge/B");
        sc.gauge = Gauge::power(rd.number(*g, "/gauge", "p"), B);
      } else if (type == "tabulated") {
        sc.gauge = Gauge::tabulated(rd.numbers(rd.member(*g, "/gauge", "t"), "/gauge/t"),
                                    rd.numbers(rd.member(*g, "/gauge", "h"), "/gauge/h"));
      } else {
        rd.fail("/gauge/type", "unknown gauge type '" + type + "'");
      }
    } catch (const std::invalid_argument& e) {
      rd.fail("/gauge", e.what());
    }
  }
  if (const json* r = rd.optional(j, "r")) sc.r = parse_radius(rd, *r, "/r");
  if (const json* rx = rd.optional(j, "r_x")) {
    if (!rx->is_array() || rx->empty()) rd.fail("/r_x", "expected a nonempty array");
    sc.r_x.clear();
    for (std::size_t i = 0; i < rx->size(); ++i) sc.r_x.push_back(parse_radius(rd, (*rx)[i], fmt::format("/r_x/{}", i)));
  }
  for (const RadiusSpec& rs : sc.r_x) {
    if (!(rs.value > 0.0)) rd.fail("/r_x", "radii must be positive");
  }
  if (!(sc.r.value > 0.0)) rd.fail("/r", "radius must be positive");

  if (const json* c = rd.optional(j, "checks")) {
    if (!c->is_array()) rd.fail("/checks", "expected an array of check names");
    for (std::size_t i = 0; i < c->size(); ++i) {
      const std::string name = rd.string((*c)[i], fmt::format("/checks/{}", i));
      if (std::find(known_checks().begin(), known_checks().end(), name) == known_checks().end()) {
        rd.fail(fmt::format("/checks/{}", i), "unknown check '" + name + "'");
      }
      sc.checks.push_back(name);
    }
  }
  if (const json* e = rd.optional(j, "estimator")) {
    if (const json* v = rd.optional(*e, "samples")) sc.est.samples = rd.count(*v, "/estimator/samples");
    if (const json* v = rd.optional(*e, "walks")) sc.est.walks = rd.count(*v, "/estimator/walks");
    if (const json* v = rd.optional(*e, "boundary_samples")) sc.est.boundary_samples = rd.count(*v, "/estimator/boundary_samples");
    if (const json* v = rd.optional(*e, "mesh")) sc.est.mesh = rd.number(*v, "/estimator/mesh");
    if (const json* v = rd.optional(*e, "shell")) sc.est.shell = rd.number(*v, "/estimator/shell");
    if (const json* v = rd.optional(*e, "seed")) sc.est.seed = rd.count(*v, "/estimator/seed");
    if (!(sc.est.mesh > 0.0)) rd.fail("/estimator/mesh", "mesh must be positive");
    if (!(sc.est.shell > 0.0)) rd.fail("/estimator/shell", "shell must be positive");
  }
  if (const json* inj = rd.optional(j, "inject")) {
    if (!inj->is_object()) rd.fail("/inject", "expected an object");
    for (auto it = inj->begin(); it != inj->end(); ++it) {
      const std::string p = "/inject/" + it.key();
      if (std::find(known_slots().begin(), known_slots().end(), it.key()) == known_slots().end()) {
        rd.fail(p, "unknown slot");
      }
      SlotOverride ov;
      ov.value = rd.number(*it, p, "value");
      try {
        ov.side = side_from_string(rd.string(rd.member(*it, p, "side"), p + "/side"));
      } catch (const std::invalid_argument& e) {
        rd.fail(p + "/side", e.what());
      }
      sc.inject[it.key()] = ov;
    }
  }
  if (const json* s = rd.optional(j, "substitute_sup_G")) {
    if (!s->is_boolean()) rd.fail("/substitute_sup_G", "expected a boolean");
    sc.substitute_sup_G = s->get<bool>();
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path, "", "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

std::string scenario_to_json(const Scenario& sc) {
  const auto pt = [](const Point& p) { return std::vector<double>(p.coords().begin(), p.coords().end()); };
  json j;
  j["schema"] = kScenarioSchema;
  j["name"] = sc.name;
  if (!sc.description.empty()) j["description"] = sc.description;
  j["dimension"] = sc.dim();
  j["o"] = pt(sc.o);
  j["D"] = domain_to_json(*sc.D);
  if (sc.G) j["G"] = domain_to_json(*sc.G);
  j["function"] = function_to_json(*sc.u);
  json pts = json::array();
  for (const Point& p : sc.S) pts.push_back(pt(p));
  j["S"] = {{"points", pts}};
  if (sc.gauge) {
    if (sc.gauge->is_power()) {
      j["gauge"] = {{"type", "power"}, {"p", sc.gauge->exponent()}, {"B", sc.gauge->factor()}};
    } else {
      j["gauge"] = {{"type", "tabulated"}, {"t", sc.gauge->nodes()}, {"h", sc.gauge->values()}};
    }
  }
  j["r"] = radius_to_json(sc.r);
  json rx = json::array();
  for (const RadiusSpec& r : sc.r_x) rx.push_back(radius_to_json(r));
  j["r_x"] = rx;
  if (!sc.checks.empty()) j["checks"] = sc.checks;
  json est{{"samples", sc.est.samples},
           {"walks", sc.est.walks},
           {"boundary_samples", sc.est.boundary_samples},
           {"mesh", sc.est.mesh},
           {"shell", sc.est.shell}};
  if (sc.est.seed) est["seed"] = *sc.est.seed;
  j["estimator"] = est;
  if (!sc.inject.empty()) {
    json inj = json::object();
    for (const auto& [k, v] : sc.inject) inj[k] = {{"value", v.value}, {"side", std::string(to_string(v.side))}};
    j["inject"] = inj;
  }
  if (sc.substitute_sup_G) j["substitute_sup_G"] = true;
  return j.dump(2);
}

}  // namespace sbh
