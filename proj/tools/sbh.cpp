#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "sbh/engine.hpp"
#include "sbh/green.hpp"
#include "sbh/harnack.hpp"
#include "sbh/hausdorff.hpp"
#include "sbh/kernel.hpp"
#include "sbh/scenario.hpp"

namespace fs = std::filesystem;
using namespace sbh;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 0;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> walks;
  std::optional<double> mesh;
  std::optional<double> shell;
  std::string format = "text";
  std::string out;

  EngineOptions engine() const {
    EngineOptions o;
    o.seed = seed;
    o.samples = samples;
    o.walks = walks;
    o.mesh = mesh;
    o.shell = shell;
    return o;
  }
};

void add_common(CLI::App* cmd, Common& c, bool formats = true) {
  cmd->add_option("--seed", c.seed, "Suite seed");
  cmd->add_option("--samples", c.samples, "Quadrature nodes per harmonic measure")->check(CLI::PositiveNumber);
  cmd->add_option("--walks", c.walks, "Walk-on-spheres paths per harmonic measure")->check(CLI::PositiveNumber);
  cmd->add_option("--mesh", c.mesh, "Chain graph spacing")->check(CLI::PositiveNumber);
  cmd->add_option("--shell", c.shell, "Walk-on-spheres shell, relative to the diameter")->check(CLI::PositiveNumber);
  if (formats) cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}));
  cmd->add_option("--out", c.out, "Output file (default: stdout)");
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw UsageError("cannot write " + c.out);
  f << text;
}

std::vector<double> parse_numbers(const std::string& s) {
  std::vector<double> v;
  std::string tok;
  std::stringstream ss(s);
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("not a number list: '" + s + "'");
    }
  }
  if (v.empty()) throw UsageError("empty number list");
  return v;
}

// Coordinates padded with zeros up to dimension d.
Point parse_point(const std::string& s, int d) {
  std::vector<double> v = parse_numbers(s);
  if (static_cast<int>(v.size()) > d) throw UsageError(fmt::format("'{}' has more than {} coordinates", s, d));
  v.resize(d, 0.0);
  return Point::from_span(v);
}

// "key=value,key=value" with bare numbers taken as the first key.
std::map<std::string, double> parse_keyed(const std::string& s, const std::string& first) {
  std::map<std::string, double> out;
  std::string tok;
  std::stringstream ss(s);
  while (std::getline(ss, tok, ',')) {
    const auto eq = tok.find('=');
    const std::string key = eq == std::string::npos ? first : tok.substr(0, eq);
    const std::string val = eq == std::string::npos ? tok : tok.substr(eq + 1);
    out[key] = parse_numbers(val).front();
  }
  return out;
}

std::vector<Scenario> load_paths(const std::vector<std::string>& paths) {
  std::vector<std::string> files;
  for (const std::string& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<std::string> here;
      for (const auto& e : fs::directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".json") here.push_back(e.path().string());
      std::sort(here.begin(), here.end());
      files.insert(files.end(), here.begin(), here.end());
    } else {
      files.push_back(p);
    }
  }
  std::vector<Scenario> out;
  for (const std::string& f : files) out.push_back(load_scenario(f));
  return out;
}

std::string summary_text(const SuiteResult& r) {
  std::string s = fmt::format("{:<32} {:>6} {:>6} {:>6} {:>6} {:>6}  {}\n", "scenario", "pass", "mc", "inc", "fail",
                              "walks", "worst margin");
  for (const ScenarioResult& sr : r.scenarios) {
    std::size_t n[4] = {0, 0, 0, 0};
    double worst = std::numeric_limits<double>::infinity();
    std::string worst_id;
    for (const MarginReport& m : sr.reports) {
      ++n[static_cast<int>(m.verdict)];
      if (m.margin < worst) {
        worst = m.margin;
        worst_id = m.id;
      }
    }
    s += fmt::format("{:<32} {:>6} {:>6} {:>6} {:>6} {:>6}  {:.3g} ({})\n", sr.name, n[0], n[1], n[2], n[3], sr.walks,
                     worst, worst_id);
  }
  for (const ScenarioResult& sr : r.scenarios)
    for (const MarginReport& m : sr.reports)
      if (m.verdict == Verdict::fail) s += fmt::format("FAIL {} {}: {}\n", sr.name, m.id, m.message);
  const SuiteSummary& t = r.summary;
  s += fmt::format("total: {} scenarios, {} reports, {} pass, {} pass_with_mc, {} inconclusive, {} fail\n", t.scenarios,
                   t.reports, t.pass, t.pass_with_mc, t.inconclusive, t.fail);
  return s;
}

int cmd_verify(const std::vector<std::string>& paths, const Common& c) {
  const std::vector<Scenario> corpus = load_paths(paths);
  const SuiteResult res = run_suite(corpus, c.engine());
  if (c.format == "json") {
    emit(c, reports_to_json(res));
  } else if (c.format == "csv") {
    emit(c, reports_to_csv(res));
  } else {
    emit(c, summary_text(res));
  }
  if (!c.out.empty()) std::cout << summary_text(res);
  return res.summary.fail > 0 ? kExitFail : 0;
}

struct QueryArgs {
  std::string kind;
  int d = 2;
  std::optional<double> t;
  std::string ball;
  std::string center;
  std::string interval;
  std::string scenario;
  std::string x;
  std::string y;
  std::optional<std::size_t> oracle;
  std::string points;
  std::string gauge;
  std::optional<double> r;
  double resolution = 0.0;
  bool sdf = false;
};

std::optional<Domain> query_domain(const QueryArgs& q, std::optional<Scenario>& sc) {
  if (!q.scenario.empty()) {
    sc = load_scenario(q.scenario);
    return *sc->D;
  }
  if (!q.interval.empty()) {
    const std::vector<double> ab = parse_numbers(q.interval);
    if (ab.size() != 2) throw UsageError("--interval needs a,b");
    return Interval(ab[0], ab[1]);
  }
  if (!q.ball.empty()) {
    const auto kv = parse_keyed(q.ball, "r");
    if (!kv.count("r")) throw UsageError("--ball needs r=<radius>");
    const Point c = q.center.empty() ? Point(Dimension{q.d}) : parse_point(q.center, q.d);
    if (q.sdf) return SdfDomain{std::make_shared<BallUnionShape>(std::vector<Ball>{Ball(c, kv.at("r"))})};
    return Ball(c, kv.at("r"));
  }
  return std::nullopt;
}

struct Printed {
  std::string name;
  ExtReal value{0.0};
  Side side = Side::exact;
  double half_width = 0.0;
  nlohmann::json extra = nlohmann::json::object();
};

std::string print(const Common& c, const Printed& p) {
  if (c.format == "json") {
    nlohmann::json j{{"quantity", p.name}, {"side", std::string(to_string(p.side))}, {"half_width", p.half_width}};
    if (p.value.is_finite()) j["value"] = p.value.value();
    else j["value"] = p.value.to_string();
    j.update(p.extra);
    return j.dump(2) + "\n";
  }
  if (c.format == "csv") {
    return fmt::format("quantity,value,side,half_width\n{},{},{},{:.17g}\n", p.name, p.value.to_string(), to_string(p.side),
                       p.half_width);
  }
  std::string s = fmt::format("{} = {} ({})", p.name, p.value.to_string(), to_string(p.side));
  if (p.half_width > 0.0) s += fmt::format(" +- {:.3g}", p.half_width);
  return s + "\n";
}

int cmd_query(const QueryArgs& q, const Common& c) {
  Printed p;
  std::optional<Scenario> sc;
  if (q.kind == "kernel") {
    if (!q.t) throw UsageError("query kernel needs --t");
    p.name = fmt::format("k_{}({})", q.d, *q.t);
    p.value = kernel_k(Dimension{q.d}, *q.t);
  } else if (q.kind == "harnack") {
    const std::optional<Domain> D = query_domain(q, sc);
    if (!D) throw UsageError("query harnack needs --ball, --interval or --scenario");
    const int d = D->dim();
    if (q.x.empty()) throw UsageError("query harnack needs --x");
    const Point x = parse_point(q.x, d);
    Point y(Dimension{d});
    if (!q.y.empty()) {
      y = parse_point(q.y, d);
    } else if (sc) {
      y = sc->o;
    } else if (const Ball* b = D->as_ball()) {
      y = b->center;
    } else if (const Interval* I = D->as_interval()) {
      y = Point{0.5 * (I->a + I->b)};
    }
    HarnackValue hv;
    const double mesh = c.mesh.value_or(sc ? sc->est.mesh : 0.05);
    if (const Ball* b = D->as_ball()) {
      hv = q.oracle ? ball_pair_oracle(*b, x, y, *q.oracle) : ball_pair_distance(*b, x, y);
    } else if (const Interval* I = D->as_interval()) {
      hv = interval_distance(*I, x[0], y[0]);
    } else {
      hv = chain_upper_bound(*D, x, y, mesh);
    }
    p.name = "harnack_distance";
    p.value = hv.value;
    p.side = hv.kind == HarnackKind::exact ? Side::exact : hv.kind == HarnackKind::upper_bound ? Side::upper : Side::estimate;
    if (!hv.diagnostic.empty()) p.extra["diagnostic"] = hv.diagnostic;
  } else if (q.kind == "green") {
    const std::optional<Domain> D = query_domain(q, sc);
    if (!D) throw UsageError("query green needs --ball, --interval or --scenario");
    const int d = D->dim();
    if (q.x.empty() || q.y.empty()) throw UsageError("query green needs --x (pole) and --y");
    const Point x = parse_point(q.x, d);
    const Point y = parse_point(q.y, d);
    WosOptions wos;
    wos.shell_fraction = c.shell.value_or(1e-4);
    const std::size_t n = D->as_sdf() ? c.walks.value_or(20000) : c.samples.value_or(4096);
    const GreenEstimate g = green_general(*D, x, y, n, c.seed, wos);
    p.name = "green";
    p.value = g.value;
    p.half_width = g.half_width;
    p.side = g.exact ? Side::exact : Side::estimate;
    p.extra["upper_bound"] = green_upper_bound(*D, x, y).to_string();
  } else if (q.kind == "content") {
    if (q.points.empty() || q.gauge.empty() || !q.r) throw UsageError("query content needs --points, --gauge and --r");
    std::ifstream f(q.points);
    if (!f) throw UsageError("cannot open " + q.points);
    std::vector<Point> pts;
    std::string line;
    int dim = 0;
    while (std::getline(f, line)) {
      std::replace(line.begin(), line.end(), ' ', ',');
      std::replace(line.begin(), line.end(), '\t', ',');
      line.erase(std::unique(line.begin(), line.end(), [](char a, char b) { return a == ',' && b == ','; }), line.end());
      if (!line.empty() && line.front() == ',') line.erase(0, 1);
      if (!line.empty() && line.back() == ',') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      const std::vector<double> v = parse_numbers(line);
      if (dim == 0) dim = static_cast<int>(v.size());
      if (static_cast<int>(v.size()) != dim || dim > 3) throw UsageError("inconsistent point dimensions in " + q.points);
      pts.push_back(Point::from_span(v));
    }
    const auto kv = parse_keyed(q.gauge, "p");
    if (!kv.count("p")) throw UsageError("--gauge needs p=<exponent>");
    const Gauge h = Gauge::power(kv.at("p"), kv.count("B") ? kv.at("B") : 1.0);
    const CoverEstimate cov = content_upper_bound(pts, h, *q.r, q.resolution);
    p.name = "content";
    p.value = cov.total_gauge;
    p.side = Side::upper;
    p.extra["balls"] = cov.balls.size();
    p.extra["level"] = cov.level;
    p.extra["multiplicity"] = cov.multiplicity;
  } else {
    throw UsageError("unknown query kind '" + q.kind + "'");
  }
  emit(c, print(c, p));
  return 0;
}

struct SweepArgs {
  std::string scenario;
  std::string from;
  std::string to;
  std::size_t n = 50;
  std::optional<double> r_x;
};

int cmd_sweep(const SweepArgs& a, const Common& c) {
  const Scenario sc = load_scenario(a.scenario);
  const Point from = a.from.empty() ? sc.o : parse_point(a.from, sc.dim());
  if (a.to.empty()) throw UsageError("sweep needs --to");
  const Point to = parse_point(a.to, sc.dim());
  const std::uint64_t seed = sc.est.seed ? *sc.est.seed : c.seed;
  emit(c, sweep_to_csv(sweep(sc, from, to, a.n, a.r_x, seed, c.engine())));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of lower bounds for subharmonic functions"};
  app.require_subcommand(1);

  Common common;
  std::vector<std::string> paths;
  auto* verify = app.add_subcommand("verify", "Run the checks of one or more scenario files or directories");
  verify->add_option("paths", paths, "Scenario files or directories")->required();
  add_common(verify, common);

  QueryArgs q;
  auto* query = app.add_subcommand("query", "Evaluate a single quantity");
  query->add_option("kind", q.kind, "kernel | harnack | green | content")->required();
  query->add_option("--d", q.d, "Dimension")->check(CLI::Range(1, 3));
  query->add_option("--t", q.t, "Kernel argument");
  query->add_option("--ball", q.ball, "Ball domain: r=<radius>");
  query->add_option("--center", q.center, "Ball center (comma separated)");
  query->add_option("--interval", q.interval, "Interval domain: a,b");
  query->add_option("--scenario", q.scenario, "Use D of a scenario file");
  query->add_option("--x", q.x, "Point (comma separated, zero padded)");
  query->add_option("--y", q.y, "Second point (default: center or base point)");
  query->add_option("--oracle", q.oracle, "Brute-force Poisson oracle with this many boundary points");
  query->add_flag("--sdf", q.sdf, "Encode the ball as a signed-distance domain");
  query->add_option("--points", q.points, "Point file, one point per line");
  query->add_option("--gauge", q.gauge, "Power gauge: p=<exponent>[,B=<factor>]");
  query->add_option("--r", q.r, "Content radius")->check(CLI::PositiveNumber);
  query->add_option("--resolution", q.resolution, "Treat points as balls of this radius");
  add_common(query, common);

  SweepArgs s;
  auto* sw = app.add_subcommand("sweep", "Margins along a segment (CSV)");
  sw->add_option("scenario", s.scenario, "Scenario file")->required();
  sw->add_option("--from", s.from, "Segment start (default: base point)");
  sw->add_option("--to", s.to, "Segment end")->required();
  sw->add_option("--n", s.n, "Number of points")->check(CLI::PositiveNumber);
  sw->add_option("--rx", s.r_x, "Radius for the refined bound (default: first r_x)");
  add_common(sw, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*verify) return cmd_verify(paths, common);
    if (*query) return cmd_query(q, common);
    if (*sw) return cmd_sweep(s, common);
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const GeometryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
