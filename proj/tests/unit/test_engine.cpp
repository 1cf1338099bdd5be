#include <cmath>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "doctest.h"
#include "sbh/engine.hpp"
#include "sbh/random.hpp"

using namespace sbh;

namespace {

Scenario disk_scenario(double z0 = 0.5, bool outer = true) {
  Scenario sc;
  sc.name = "disk";
  sc.o = Point{0.0, 0.0};
  sc.D = Ball(sc.o, 1.0);
  if (outer) sc.G = Ball(sc.o, 2.0);
  sc.u = TestFunction::log_poly_abs({Point{z0, 0.0}}, {}, sc.o);
  sc.est.boundary_samples = 1024;
  return sc;
}

const MarginReport& only(const ScenarioResult& r, const std::string& id) {
  for (const MarginReport& m : r.reports)
    if (m.id == id) return m;
  FAIL("missing report " << id);
  return r.reports.front();
}

// (1 + rho) / (1 - rho): Harnack distance from the center of the unit disk.
double disk_distance(double rho) { return (1.0 + rho) / (1.0 - rho); }

}  // namespace

TEST_CASE("margins") {
  CHECK(signed_margin(2.0, 1.0, Relation::geq) == 1.0);
  CHECK(signed_margin(2.0, 1.0, Relation::leq) == -1.0);
  CHECK(signed_margin(ExtReal::neg_inf(), ExtReal::neg_inf(), Relation::geq) == 0.0);
  CHECK(signed_margin(ExtReal::neg_inf(), 0.0, Relation::geq) == -INFINITY);
  CHECK(signed_margin(0.0, ExtReal::neg_inf(), Relation::geq) == INFINITY);
}

TEST_CASE("harmonic lower bound") {
  Scenario sc = disk_scenario(0.5, false);
  sc.checks = {"harmonic_lower_bound"};
  HarmonicPolynomial h;
  h.constant = 1.0;
  SUBCASE("constant") {
    sc.u = TestFunction::harmonic(h, sc.o);
    sc.S = {Point{0.3, 0.2}, Point{-0.5, 0.1}};
    const MarginReport& m = run_scenario(sc, 1).reports.at(0);
    CHECK(m.lhs.value() == 0.0);
    CHECK(m.rhs.value() == 0.0);
    CHECK(m.margin == 0.0);
    CHECK(m.verdict == Verdict::pass);
  }
  SUBCASE("S = {o}") {
    h.linear = {1.0, 0.0};
    sc.u = TestFunction::harmonic(h, sc.o);
    sc.S = {sc.o};
    const MarginReport& m = run_scenario(sc, 1).reports.at(0);
    CHECK(m.lhs.value() == 0.0);
    CHECK(m.rhs.value() == 0.0);
  }
  SUBCASE("Re z + 1 on a grid") {
    h.linear = {1.0, 0.0};
    sc.u = TestFunction::harmonic(h, sc.o);
    for (int i = 0; i <= 14; ++i)
      for (int j = 0; j <= 14; ++j) {
        const Point p{-0.7 + 0.1 * i, -0.7 + 0.1 * j};
        if (p.norm() <= 0.7) sc.S.push_back(p);
      }
    const MarginReport& m = run_scenario(sc, 1).reports.at(0);
    double inf_u = 1e300, sup_dist = 1.0;
    for (const Point& p : sc.S) {
      inf_u = std::min(inf_u, p[0]);
      sup_dist = std::max(sup_dist, disk_distance(p.norm()));
    }
    CHECK(m.lhs.value() == doctest::Approx(inf_u).epsilon(1e-14));
    // sup over the unit circle of x is 1; the engine's certified upper is slightly above.
    CHECK(m.rhs.value() <= -(sup_dist - 1.0) * 1.0 + 1e-12);
    CHECK(m.rhs.value() >= -(sup_dist - 1.0) * 1.01);
    CHECK(m.margin >= 0.0);
    CHECK(m.verdict == Verdict::pass);
  }
}

TEST_CASE("pointwise lower bound in the disk") {
  Scenario sc = disk_scenario(0.5, false);
  sc.checks = {"pointwise_lower_bound"};
  sc.S = {Point{-0.5, 0.0}, Point{0.5, 0.0}, sc.o};
  const ScenarioResult r = run_scenario(sc, 3);
  const MarginReport& m = only(r, "pointwise_lower_bound[0]");
  // u(-1/2) = ln 1 - ln(1/2); dist = 3; sup on the circle = ln(3/2) - ln(1/2) = ln 3;
  // N_x(2) = ln 2 - ln 1 for the zero at distance 1.
  const double rhs = -2.0 * std::log(3.0) - std::log(2.0);
  CHECK(m.lhs.value() == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(m.rhs.value() <= rhs + 1e-12);
  CHECK(m.rhs.value() >= rhs - 0.02);
  CHECK(m.verdict == Verdict::pass);

  const MarginReport& atom = only(r, "pointwise_lower_bound[1]");
  CHECK(atom.lhs.is_neg_inf());
  CHECK(atom.rhs.is_neg_inf());
  CHECK(atom.verdict == Verdict::pass);

  const MarginReport& at_o = only(r, "pointwise_lower_bound[2]");
  CHECK(at_o.lhs.value() == 0.0);
  CHECK(at_o.rhs.value() == doctest::Approx(-(std::log(2.0) - std::log(0.5))).epsilon(1e-14));

  SUBCASE("u = 0") {
    sc.u = TestFunction::harmonic({}, sc.o);
    const ScenarioResult z = run_scenario(sc, 3);
    for (const MarginReport& rep : z.reports) {
      CHECK(rep.margin == 0.0);
      CHECK(rep.verdict == Verdict::pass);
    }
  }
}

TEST_CASE("refined lower bound, concentric disks") {
  Scenario sc = disk_scenario();
  sc.checks = {"pointwise_lower_bound", "refined_lower_bound"};
  sc.S = {Point{-0.5, 0.0}, Point{0.1, 0.4}, Point{0.0, -0.8}};
  sc.r_x = {{1.0, true}, {0.125, true}};
  const ScenarioResult r = run_scenario(sc, 5);
  for (std::size_t i = 0; i < sc.S.size(); ++i) {
    const MarginReport& pw = only(r, fmt::format("pointwise_lower_bound[{}]", i));
    const MarginReport& full = only(r, fmt::format("refined_lower_bound[{}][r_x=0]", i));
    CHECK(full.rhs == pw.rhs);
    CHECK(only(r, fmt::format("refined_lower_bound[{}][r_x=1]", i)).verdict == Verdict::pass);
  }
  // r_x = 1/4: ratio (ln 2 - ln 1/4) / (ln 2 - ln 1) = 3, punctured sup 1,
  // sup over |z| = 2 of u is ln(5/2) - ln(1/2), N_x(1/4) = 0 at x = -1/2.
  const MarginReport& m = only(r, "refined_lower_bound[0][r_x=1]");
  const double rhs = -2.0 * std::log(3.0) - 3.0 * std::log(5.0);
  CHECK(m.rhs.value() <= rhs + 1e-12);
  CHECK(m.rhs.value() >= rhs - 0.1);
  CHECK(m.margin >= 0.0);

  SUBCASE("u = 0") {
    sc.u = TestFunction::harmonic({}, sc.o);
    for (const MarginReport& rep : run_scenario(sc, 5).reports) CHECK(rep.margin == 0.0);
  }
  SUBCASE("r_x beyond the diameter") {
    sc.r_x = {{2.5, false}};
    CHECK_THROWS_AS(run_scenario(sc, 5), ScenarioError);
  }
}

TEST_CASE("exceptional set membership") {
  Rng rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + trial % 3;
    std::vector<Atom> atoms;
    std::vector<Point> S;
    for (int k = 0; k < 4; ++k) {
      Point p(Dimension{d});
      for (int a = 0; a < d; ++a) p[a] = 2.0 * rng.uniform() - 1.0;
      atoms.push_back({p, 0.1 + rng.uniform()});
    }
    for (int k = 0; k < 40; ++k) {
      Point p(Dimension{d});
      for (int a = 0; a < d; ++a) p[a] = 2.0 * rng.uniform() - 1.0;
      S.push_back(p);
    }
    S.push_back(atoms[0].loc);
    const AtomicMeasure mu(atoms);
    const Gauge h = Gauge::power(0.5 + 2.0 * rng.uniform(), 0.5 + 2.0 * rng.uniform());
    const double r = 0.2 + rng.uniform();
    const double level = 0.5 + rng.uniform();
    const auto E = compute_exceptional_set(S, mu, h, r, level, 64);
    const auto fine = compute_exceptional_set(S, mu, h, r, level, 640);
    REQUIRE(E.size() == fine.size());
    for (std::size_t i = 0; i < E.size(); ++i) CHECK(E[i].index == fine[i].index);
    // Brute force over a fine radius grid never finds further members.
    std::vector<bool> member(S.size(), false);
    for (const auto& e : E) {
      member[e.index] = true;
      CHECK(radial_counting(mu, S[e.index], e.t) >= h(e.t) * level);
      CHECK(e.t <= r);
    }
    bool missed = false;
    for (std::size_t i = 0; i < S.size(); ++i) {
      if (member[i]) continue;
      for (int k = 1; k <= 5000; ++k) {
        const double t = r * k / 5000.0;
        missed = missed || radial_counting(mu, S[i], t) >= h(t) * level;
      }
    }
    CHECK_FALSE(missed);
    CHECK(member.back());
    // A larger gauge factor can only shrink E.
    const Gauge h2 = Gauge::power(h.exponent(), 2.0 * h.factor());
    const auto E2 = compute_exceptional_set(S, mu, h2, r, level, 64);
    for (const auto& e : E2) CHECK(member[e.index]);
  }
}

TEST_CASE("exceptional set reports") {
  Scenario sc = disk_scenario(0.3);
  sc.checks = {"exceptional_set"};
  for (int i = 0; i <= 10; ++i)
    for (int j = 0; j <= 10; ++j) {
      const Point p{-0.8 + 0.16 * i, -0.8 + 0.16 * j};
      if (p.norm() < 0.85) sc.S.push_back(p);
    }
  sc.gauge = Gauge::power(1.0, 0.5);
  sc.r = {0.25, false};
  const ScenarioResult r = run_scenario(sc, 9);
  REQUIRE(r.reports.size() == 3);
  for (const MarginReport& m : r.reports) CHECK(m.verdict == Verdict::pass);
  REQUIRE(!r.exceptional_set.empty());
  for (const Point& p : r.exceptional_set) CHECK(distance(p, Point{0.3, 0.0}) <= 0.25);

  SUBCASE("harmonic u") {
    HarmonicPolynomial h;
    h.linear = {1.0, 0.5};
    sc.u = TestFunction::harmonic(h, sc.o);
    const ScenarioResult z = run_scenario(sc, 9);
    CHECK(z.exceptional_set.empty());
    CHECK(only(z, "exceptional_set[content]").lhs.value() == 0.0);
    for (const MarginReport& m : z.reports) CHECK(m.verdict == Verdict::pass);
  }
  SUBCASE("u = 0 is rejected") {
    sc.u = TestFunction::harmonic({}, sc.o);
    CHECK_THROWS_AS(run_scenario(sc, 9), ScenarioError);
  }
}

TEST_CASE("riesz mass bound, concentric disks") {
  Scenario sc = disk_scenario();
  sc.checks = {"riesz_mass_bound", "green_lower_bound"};
  const ScenarioResult r = run_scenario(sc, 11);
  const MarginReport& m = only(r, "riesz_mass_bound");
  // Mean of ln|z - 1/2| - ln(1/2) over |z| = 2 is ln 4; P = 1; k(2) - k(1) = ln 2.
  CHECK(m.lhs.value() == 1.0);
  CHECK(m.rhs.value() == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(m.verdict == Verdict::pass);
  const MarginReport& g = only(r, "green_lower_bound");
  // inf over |y| = 1 of ln 2 - ln|y| against (ln 2 - ln 1) / 1.
  CHECK(g.lhs.value() == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(g.rhs.value() == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(g.verdict == Verdict::pass);

  SUBCASE("u = 0") {
    sc.u = TestFunction::harmonic({}, sc.o);
    const MarginReport& z = run_scenario(sc, 11).reports.at(0);
    CHECK(z.lhs.value() == 0.0);
    CHECK(z.rhs.value() == 0.0);
  }
  SUBCASE("zero outside D") {
    sc.u = TestFunction::log_poly_abs({Point{1.5, 0.0}}, {}, sc.o);
    CHECK(run_scenario(sc, 11).reports.at(0).lhs.value() == 0.0);
  }
}

TEST_CASE("green checks in an off-center disk") {
  Scenario sc = disk_scenario();
  sc.D = Ball(Point{0.2, 0.0}, 1.0);
  sc.G = Ball(Point{0.0, 0.1}, 2.5);
  sc.est.samples = 2048;
  sc.S = {Point{0.5, 0.5}, Point{-0.3, 0.2}, Point{0.9, -0.1}};
  sc.checks = {"green_upper_bound", "green_potential_bound", "poisson_jensen", "riesz_mass_bound", "green_lower_bound"};
  const ScenarioResult r = run_scenario(sc, 13);
  for (const MarginReport& m : r.reports) {
    INFO(m.id << " " << m.message);
    CHECK((m.verdict == Verdict::pass || m.verdict == Verdict::pass_with_mc));
  }
}

TEST_CASE("interval scenario") {
  Scenario sc;
  sc.name = "interval";
  sc.o = Point{0.0};
  sc.D = Interval(-1.0, 1.0);
  sc.G = Interval(-2.0, 3.0);
  sc.u = TestFunction::convex_pl({-0.5, 0.4}, {-1.0, 0.5, 2.0}, 0.0);
  for (int k = -9; k <= 9; ++k) sc.S.push_back(Point{k / 10.0});
  sc.gauge = Gauge::power(0.5, 1.0);
  const ScenarioResult r = run_scenario(sc, 17);
  CHECK(r.reports.size() > 40);
  for (const MarginReport& m : r.reports) {
    INFO(m.id << " " << m.message);
    CHECK(m.verdict == Verdict::pass);
    if (m.check == "pointwise_lower_bound" || m.check == "refined_lower_bound") {
      CHECK(m.rhs_side == Side::exact);
    }
  }
}

TEST_CASE("injected inputs are audited") {
  Scenario sc = disk_scenario();
  sc.S = {Point{-0.5, 0.0}, Point{0.3, 0.3}};
  sc.checks = {"pointwise_lower_bound", "refined_lower_bound"};
  SUBCASE("wrong-sided sup") {
    sc.inject["sup_boundary_D"] = {std::log(3.0), Side::lower};
    const ScenarioResult r = run_scenario(sc, 1);
    CHECK(only(r, "pointwise_lower_bound[0]").verdict == Verdict::fail);
  }
  SUBCASE("sup below the sampled values") {
    sc.inject["sup_boundary_D"] = {0.5, Side::upper};
    CHECK(only(run_scenario(sc, 1), "pointwise_lower_bound[0]").verdict == Verdict::fail);
  }
  SUBCASE("under-estimated Harnack distance") {
    sc.inject["harnack_D"] = {1.0, Side::upper};
    CHECK(only(run_scenario(sc, 1), "pointwise_lower_bound[0]").verdict == Verdict::fail);
  }
  SUBCASE("lower inradius above the truth") {
    sc.inject["inradius"] = {1.5, Side::lower};
    CHECK(only(run_scenario(sc, 1), "refined_lower_bound[0][r_x=1]").verdict == Verdict::fail);
  }
  SUBCASE("consistent injection") {
    sc.inject["sup_boundary_D"] = {std::log(3.0) + 0.01, Side::upper};
    const ScenarioResult r = run_scenario(sc, 1);
    CHECK(only(r, "pointwise_lower_bound[0]").verdict == Verdict::pass);
    const auto& slots = only(r, "pointwise_lower_bound[0]").slots;
    bool injected = false;
    for (const SlotNote& n : slots) injected = injected || (n.slot == "sup_boundary_D" && n.source == "injected");
    CHECK(injected);
  }
}

TEST_CASE("suite and writers") {
  CHECK(run_suite({}).summary.reports == 0);
  Scenario a = disk_scenario();
  a.S = {Point{0.2, 0.1}, Point{-0.6, 0.3}};
  a.gauge = Gauge::power(1.0, 0.5);
  Scenario b = a;
  b.name = "box";
  b.D = SdfDomain{std::make_shared<BoxShape>(Point{0.0, 0.0}, Point{0.7, 0.6})};
  b.est.walks = 2000;
  b.est.mesh = 0.1;
  b.est.boundary_samples = 128;
  EngineOptions opts;
  opts.seed = 42;
  const SuiteResult r1 = run_suite({a, b}, opts);
  const SuiteResult r2 = run_suite({a, b}, opts);
  CHECK(reports_to_json(r1) == reports_to_json(r2));
  CHECK(reports_to_csv(r1) == reports_to_csv(r2));
  CHECK(r1.summary.fail == 0);
  CHECK(r1.summary.walks > 0);
  CHECK(r1.scenarios[1].seed == derive_seed(42, 1));
  CHECK(reports_to_csv(r1).rfind("# version=", 0) == 0);
  CHECK(reports_to_json(r1).find("\"seed\": 42") != std::string::npos);
}

TEST_CASE("sweeps") {
  Scenario sc = disk_scenario();
  SUBCASE("degenerate segment") {
    const SweepResult s = sweep(sc, sc.o, sc.o, 1, std::nullopt, 1);
    REQUIRE(s.rows.size() == 1);
    CHECK(s.rows[0].harnack == 1.0);
    CHECK(s.rows[0].lhs.value() == 0.0);
  }
  SUBCASE("radial sweep") {
    const SweepResult s = sweep(sc, sc.o, Point{0.0, -0.9}, 31, std::nullopt, 1);
    REQUIRE(s.rows.size() == 31);
    for (std::size_t i = 1; i < s.rows.size(); ++i) {
      CHECK(s.rows[i].harnack > s.rows[i - 1].harnack);
      CHECK(s.rows[i].harnack == doctest::Approx(disk_distance(s.rows[i].norm)).epsilon(1e-12));
      CHECK(s.rows[i].margin_pointwise >= 0.0);
      CHECK(*s.rows[i].margin_refined >= 0.0);
    }
  }
  SUBCASE("through the zero") {
    const SweepResult s = sweep(sc, Point{-0.5, 0.0}, Point{0.5, 0.0}, 3, std::nullopt, 1);
    CHECK(s.rows.size() == 2);
    REQUIRE(s.skipped_atoms.size() == 1);
    CHECK(sweep_to_csv(s).find("# skipped atom at 0.5 0") != std::string::npos);
  }
  SUBCASE("leaving D") {
    CHECK_THROWS_AS(sweep(sc, sc.o, Point{1.2, 0.0}, 5, std::nullopt, 1), ScenarioError);
  }
}
