#include "sbh/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "sbh/green.hpp"
#include "sbh/harnack.hpp"
#include "sbh/kernel.hpp"
#include "sbh/parallel.hpp"
#include "sbh/random.hpp"
#include "sbh/testbed.hpp"

#ifndef SBH_VERSION
#define SBH_VERSION "0.0.0"
#endif

namespace sbh {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxBallNodes = std::size_t{1} << 18;

enum Stream : std::uint64_t {
  kStreamSupD = 1,
  kStreamSupG = 2,
  kStreamMajorant = 3,
  kStreamGreenG = 4,
  kStreamGreenD = 16,
  kStreamPoissonJensen = 64,
};

enum class Need { lower, upper };

// A resolved input slot. `fail` marks an injected value that contradicts what
// the engine can certify; `refuse` marks a value that cannot be used safely.
struct Input {
  double value = 0.0;
  Side side = Side::exact;
  std::string source;
  std::string fail;
  std::string refuse;
};

struct Audit {
  std::vector<SlotNote> notes;
  std::vector<std::string> fails;
  std::vector<std::string> refusals;
  bool mc = false;

  void use(const std::string& slot, const Input& in) {
    notes.push_back({slot, in.value, in.side, in.source});
    if (!in.fail.empty()) fails.push_back(in.fail);
    if (!in.refuse.empty()) refusals.push_back(in.refuse);
    if (in.side == Side::estimate) mc = true;
  }
};

// Distinct messages in first-seen order.
std::string join(const std::vector<std::string>& v) {
  std::vector<std::string> seen;
  std::string out;
  for (const std::string& s : v) {
    if (std::find(seen.begin(), seen.end(), s) != seen.end()) continue;
    seen.push_back(s);
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

double scale_of(ExtReal a, ExtReal b) {
  double s = 1.0;
  if (a.is_finite()) s = std::max(s, std::abs(a.value()));
  if (b.is_finite()) s = std::max(s, std::abs(b.value()));
  return s;
}

void finish(MarginReport& rep, const Audit& a) {
  rep.slots = a.notes;
  rep.margin = signed_margin(rep.lhs, rep.rhs, rep.relation);
  const bool mc = a.mc || rep.half_width > 0.0 || rep.lhs_side == Side::estimate || rep.rhs_side == Side::estimate;
  const double allowance = kTolClosedForm * scale_of(rep.lhs, rep.rhs) + kMcSigmas * rep.half_width;
  std::string msg = rep.message;
  const auto add = [&msg](const std::string& s) {
    if (s.empty()) return;
    if (!msg.empty()) msg += "; ";
    msg += s;
  };
  if (!a.fails.empty()) {
    rep.verdict = Verdict::fail;
    add(join(a.fails));
  } else if (!a.refusals.empty()) {
    rep.verdict = Verdict::inconclusive;
    add(join(a.refusals));
  } else if (rep.margin >= -allowance) {
    rep.verdict = mc ? Verdict::pass_with_mc : Verdict::pass;
  } else {
    rep.verdict = Verdict::fail;
    add(fmt::format("margin {:.6g} below -{:.3g}", rep.margin, allowance));
  }
  rep.message = msg;
}

Side harnack_side(HarnackKind k) {
  switch (k) {
    case HarnackKind::exact: return Side::exact;
    case HarnackKind::upper_bound: return Side::upper;
    case HarnackKind::oracle_estimate: return Side::estimate;
  }
  return Side::estimate;
}

Side combine(std::initializer_list<Side> sides, Side one_sided) {
  for (Side s : sides)
    if (s == Side::estimate) return Side::estimate;
  for (Side s : sides)
    if (s != Side::exact) return one_sided;
  return Side::exact;
}

// Ball about the bounding-box center containing D: dist^D >= dist^B by subordination.
Ball enclosing_ball(const Domain& D) {
  const Box b = D.bounding_box();
  Point c(D.dimension());
  for (int i = 0; i < D.dim(); ++i) c[i] = 0.5 * (b.lo[i] + b.hi[i]);
  return Ball(c, 0.5 * b.diagonal() * (1.0 + 1e-9) + 1e-12);
}

std::vector<std::size_t> spread_indices(std::size_t n, std::size_t k) {
  std::vector<std::size_t> out;
  if (n == 0 || k == 0) return out;
  k = std::min(k, n);
  for (std::size_t i = 0; i < k; ++i) out.push_back(i * n / k);
  return out;
}

class Context {
 public:
  Context(const Scenario& sc, std::uint64_t seed, const EngineOptions& opts) : sc_(sc), seed_(seed), opts_(opts) {
    if (!sc.D || !sc.u) throw ScenarioError(sc.name, "", "scenario needs D and a function");
    est_ = sc.est;
    if (opts.samples) est_.samples = *opts.samples;
    if (opts.walks) est_.walks = *opts.walks;
    if (opts.mesh) est_.mesh = *opts.mesh;
    if (opts.shell) est_.shell = *opts.shell;
    wos_.shell_fraction = est_.shell;
    mu_ = riesz_of(*sc.u);
    muD_ = restrict(mu_, D());
    if (sc.G) pair_ = sc.pair();
  }

  const Scenario& sc() const { return sc_; }
  const Domain& D() const { return *sc_.D; }
  const Domain& G() const { return *sc_.G; }
  const TestFunction& u() const { return *sc_.u; }
  const Point& o() const { return sc_.o; }
  Dimension dim() const { return o().dimension(); }
  const AtomicMeasure& mu() const { return mu_; }
  const AtomicMeasure& muD() const { return muD_; }
  const NestedPair& pair() const { return *pair_; }
  std::uint64_t seed() const { return seed_; }
  const EstimatorParams& est() const { return est_; }
  const EngineOptions& opts() const { return opts_; }
  std::size_t walks_used() const { return walks_; }
  void count_walks(std::size_t n) { walks_ += n; }

  std::size_t nodes_for(const Domain& Dm) const { return Dm.as_sdf() ? est_.walks : est_.samples; }

  // Ball quadrature nodes refined for poles near the sphere: node spacing is
  // kept below a quarter of the depth, up to kMaxBallNodes.
  std::size_t nodes_for(const Domain& Dm, const Point& x) const {
    const Ball* b = Dm.as_ball();
    if (!b || b->dim() == 1) return nodes_for(Dm);
    const double depth = b->radius - distance(x, b->center);
    const double f = std::max(1.0, 0.25 * b->radius / depth);
    const double want = static_cast<double>(est_.samples) * std::pow(f, b->dim() - 1);
    return static_cast<std::size_t>(std::min(want, static_cast<double>(kMaxBallNodes)));
  }

  HarmonicMeasureSample measure(const Domain& Dm, const Point& x, std::uint64_t stream) {
    HarmonicMeasureSample s = harmonic_measure(Dm, x, nodes_for(Dm), derive_seed(seed_, stream), wos_);
    if (s.monte_carlo) walks_ += s.exit_points.size();
    return s;
  }

  // Slot with injection audit; cert_lo / cert_hi bracket the truth as far as
  // the engine can certify it.
  Input resolve(const std::string& slot, Need need, double computed, Side computed_side, double cert_lo, double cert_hi,
                std::string source, bool allow_estimate = false) const {
    Input in{computed, computed_side, std::move(source), {}, {}};
    const Side req = need == Need::upper ? Side::upper : Side::lower;
    if (auto it = sc_.inject.find(slot); it != sc_.inject.end()) {
      const SlotOverride& ov = it->second;
      in = {ov.value, ov.side, "injected", {}, {}};
      const double tol = kTolClosedForm * std::max(1.0, std::abs(ov.value));
      if (!side_satisfies(ov.side, req) && !(allow_estimate && ov.side == Side::estimate)) {
        in.fail = fmt::format("{} injected as {} where {} is required", slot, to_string(ov.side), to_string(req));
      } else if ((need == Need::upper || ov.side == Side::exact) && ov.value < cert_lo - tol) {
        in.fail = fmt::format("{} injected value {:.6g} is below the certified lower bound {:.6g}", slot, ov.value, cert_lo);
      } else if ((need == Need::lower || ov.side == Side::exact) && ov.value > cert_hi + tol) {
        in.fail = fmt::format("{} injected value {:.6g} is above the certified upper bound {:.6g}", slot, ov.value, cert_hi);
      }
      return in;
    }
    if (computed_side == Side::estimate && !allow_estimate) {
      in.refuse = fmt::format("{} is only an estimate where a certified {} bound is required", slot, to_string(req));
    } else if (!std::isfinite(computed)) {
      in.refuse = fmt::format("{} has no finite certified {} bound", slot, to_string(req));
    }
    return in;
  }

  Input diameter_slot() {
    if (!diam_) diam_ = diameter(D());
    return resolve("diameter", Need::upper, diam_->upper, diam_->side_of_upper(), diam_->lower, diam_->upper,
                   diam_->is_exact() ? "closed form" : "boundary sample");
  }

  Input inradius_slot() {
    if (!inr_) inr_ = inradius_at(D(), o());
    return resolve("inradius", Need::lower, inr_->lower, inr_->side_of_lower(), inr_->lower, inr_->upper,
                   inr_->is_exact() ? "closed form" : "signed distance");
  }

  Input gap_slot() {
    if (!gap_) gap_ = gap(pair());
    return resolve("gap", Need::lower, gap_->lower, gap_->side_of_lower(), gap_->lower, gap_->upper,
                   gap_->is_exact() ? "closed form" : "boundary sample");
  }

  const BoundarySup& supD() {
    if (!supD_) supD_ = sup_on_boundary(u(), D(), est_.boundary_samples, derive_seed(seed_, kStreamSupD));
    return *supD_;
  }

  const BoundarySup& supG() {
    if (!supG_) supG_ = sup_on_boundary(u(), G(), est_.boundary_samples, derive_seed(seed_, kStreamSupG));
    return *supG_;
  }

  Input sup_slot(const std::string& slot, const BoundarySup& s) const {
    const Side side = s.lower == s.upper ? Side::exact : Side::upper;
    return resolve(slot, Need::upper, s.upper.value(), side, s.lower.value(), s.upper.value(),
                   fmt::format("{} boundary points, covering radius {:.3g}", s.samples, s.covering_radius));
  }

  Input supD_slot() { return sup_slot("sup_boundary_D", supD()); }
  Input supG_slot() { return sup_slot("sup_boundary_G", supG()); }

  // Harnack distance in D from o to each point (exact on balls and intervals,
  // chained upper bounds otherwise).
  std::vector<Input> harnack_slots(const std::vector<Point>& xs) const {
    std::vector<HarnackValue> hv;
    std::vector<double> lo(xs.size(), 1.0);
    std::string source = "closed form";
    if (const Ball* b = D().as_ball()) {
      for (const Point& x : xs) hv.push_back(ball_pair_distance(*b, o(), x));
    } else if (const Interval* I = D().as_interval()) {
      for (const Point& x : xs) hv.push_back(interval_distance(*I, o()[0], x[0]));
    } else {
      hv = chain_upper_bounds(D(), o(), xs, est_.mesh);
      const Ball B = enclosing_ball(D());
      for (std::size_t i = 0; i < xs.size(); ++i) lo[i] = ball_pair_distance(B, o(), xs[i]).value;
      source = fmt::format("chain, mesh {:.3g}", est_.mesh);
    }
    std::vector<Input> out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const Side side = harnack_side(hv[i].kind);
      if (side == Side::exact) lo[i] = hv[i].value;
      Input in = resolve("harnack_D", Need::upper, hv[i].value, side, lo[i], hv[i].value, source);
      if (!hv[i].diagnostic.empty() && in.refuse.size()) in.refuse += " (" + hv[i].diagnostic + ")";
      out.push_back(std::move(in));
    }
    return out;
  }

  const std::vector<Input>& harnack_S() {
    if (!harnackS_) harnackS_ = harnack_slots(sc_.S);
    return *harnackS_;
  }

  // Harnack sup in G minus o from the boundary of D to the sphere of radius R
  // (the certified lower inradius, so every input refers to one instance).
  Input punctured_slot(double R) {
    if (!punct_) punct_ = punctured_sup_distance(pair(), R, est_.mesh, est_.boundary_samples);
    const Side side = harnack_side(punct_->kind);
    Input in = resolve("harnack_punctured", Need::upper, punct_->value, side, side == Side::exact ? punct_->value : 1.0,
                       punct_->value, side == Side::exact ? "closed form" : fmt::format("chain, mesh {:.3g}", est_.mesh));
    if (!punct_->diagnostic.empty() && !in.refuse.empty()) in.refuse += " (" + punct_->diagnostic + ")";
    return in;
  }

  double resolve_radius(const RadiusSpec& r, double diam) const { return r.resolve(diam); }

 private:
  const Scenario& sc_;
  std::uint64_t seed_;
  EngineOptions opts_;
  EstimatorParams est_;
  WosOptions wos_;
  AtomicMeasure mu_;
  AtomicMeasure muD_;
  std::optional<NestedPair> pair_;
  std::optional<Bracket> diam_;
  std::optional<Bracket> inr_;
  std::optional<Bracket> gap_;
  std::optional<BoundarySup> supD_;
  std::optional<BoundarySup> supG_;
  std::optional<std::vector<Input>> harnackS_;
  std::optional<HarnackValue> punct_;
  std::size_t walks_ = 0;
};

MarginReport base_report(const Context& c, const std::string& check, std::string id) {
  MarginReport r;
  r.scenario = c.sc().name;
  r.check = check;
  r.id = std::move(id);
  return r;
}

// k(R + gap) - k(R).
double collar(Dimension d, double R, double g) { return kernel_increment(d, R, R + g); }

// (k(diam) - k(r)) / (k(R + gap) - k(R)).
double refinement_ratio(Dimension d, double diam, double r, double R, double g) {
  if (r >= diam) return 0.0;
  return kernel_increment(d, r, diam) / collar(d, R, g);
}

ExtReal pointwise_rhs(double dist, double sup_d, ExtReal n) {
  return ExtReal(-(dist - 1.0) * sup_d) - n;
}

struct Refined {
  ExtReal rhs;
  double ratio;
};

Refined refined_rhs(Dimension d, double dist, double sup_first, double diam, double rx, double R, double g, double P,
                    double sup_g, ExtReal n) {
  const double ratio = refinement_ratio(d, diam, rx, R, g);
  const ExtReal mid = ExtReal(ratio) * ExtReal(P) * ExtReal(sup_g);
  return {ExtReal(-(dist - 1.0) * sup_first) - mid - n, ratio};
}

std::vector<MarginReport> check_harmonic_lower_bound(Context& c) {
  MarginReport rep = base_report(c, "harmonic_lower_bound", "harmonic_lower_bound");
  Audit a;
  if (!c.muD().empty()) throw ScenarioError(c.sc().name, "/checks", "harmonic_lower_bound needs u harmonic on closure(D)");
  const std::vector<Point>& S = c.sc().S;
  if (S.empty()) throw ScenarioError(c.sc().name, "/S", "harmonic_lower_bound needs a nonempty S");
  ExtReal inf_u = ExtReal::pos_inf();
  for (const Point& x : S) inf_u = min(inf_u, c.u()(x));
  double sup_dist = 1.0;
  Input worst;
  std::vector<Side> sides;
  for (const Input& in : c.harnack_S()) {
    if (!in.fail.empty()) a.fails.push_back(in.fail);
    if (!in.refuse.empty()) a.refusals.push_back(in.refuse);
    if (in.side == Side::estimate) a.mc = true;
    if (in.value >= sup_dist) {
      sup_dist = in.value;
      worst = in;
    }
    sides.push_back(in.side);
  }
  a.notes.push_back({"harnack_D", sup_dist, worst.side, "sup over S; " + worst.source});
  const Input sup = c.supD_slot();
  a.use("sup_boundary_D", sup);
  rep.lhs = inf_u;
  rep.rhs = ExtReal(-(sup_dist - 1.0) * sup.value);
  rep.rhs_side = combine({worst.side, sup.side}, Side::lower);
  finish(rep, a);
  return {rep};
}

std::vector<MarginReport> check_pointwise(Context& c) {
  const std::vector<Point>& S = c.sc().S;
  const std::vector<Input>& har = c.harnack_S();
  const Input diam = c.diameter_slot();
  const Input sup = c.supD_slot();
  std::vector<MarginReport> out;
  for (std::size_t i = 0; i < S.size(); ++i) {
    MarginReport rep = base_report(c, "pointwise_lower_bound", fmt::format("pointwise_lower_bound[{}]", i));
    rep.x = S[i];
    Audit a;
    a.use("harnack_D", har[i]);
    a.use("sup_boundary_D", sup);
    a.use("diameter", diam);
    rep.lhs = c.u()(S[i]);
    rep.rhs = pointwise_rhs(har[i].value, sup.value, integrated_counting(c.muD(), S[i], diam.value));
    rep.rhs_side = combine({har[i].side, sup.side, diam.side}, Side::lower);
    if (rep.lhs.is_neg_inf()) rep.message = "x is an atom; both sides are -inf";
    finish(rep, a);
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<MarginReport> check_refined(Context& c) {
  const std::vector<Point>& S = c.sc().S;
  const Dimension d = c.dim();
  const std::vector<Input>& har = c.harnack_S();
  const Input diam = c.diameter_slot();
  const Input R = c.inradius_slot();
  const Input g = c.gap_slot();
  const Input supD = c.supD_slot();
  const Input supG = c.supG_slot();
  const Input P = c.punctured_slot(R.value);
  const Input& first = c.sc().substitute_sup_G ? supG : supD;
  const char* first_slot = c.sc().substitute_sup_G ? "sup_boundary_G" : "sup_boundary_D";
  std::vector<MarginReport> out;
  for (std::size_t k = 0; k < c.sc().r_x.size(); ++k) {
    const double rx = c.sc().r_x[k].resolve(diam.value);
    if (!(rx > 0.0) || rx > diam.value * (1.0 + 1e-12)) {
      throw ScenarioError(c.sc().name, fmt::format("/r_x/{}", k), fmt::format("r_x = {:.6g} is outside (0, diam D]", rx));
    }
    for (std::size_t i = 0; i < S.size(); ++i) {
      MarginReport rep = base_report(c, "refined_lower_bound", fmt::format("refined_lower_bound[{}][r_x={}]", i, k));
      rep.x = S[i];
      Audit a;
      a.use("harnack_D", har[i]);
      a.use(first_slot, first);
      a.use("diameter", diam);
      a.use("inradius", R);
      a.use("gap", g);
      const Refined rr = refined_rhs(d, har[i].value, first.value, diam.value, rx, R.value, g.value, P.value, supG.value,
                                     integrated_counting(c.muD(), S[i], rx));
      if (rr.ratio > 0.0) {
        a.use("harnack_punctured", P);
        a.use("sup_boundary_G", supG);
      }
      rep.lhs = c.u()(S[i]);
      rep.rhs = rr.rhs;
      rep.rhs_side = combine({har[i].side, first.side, diam.side, R.side, g.side, P.side, supG.side}, Side::lower);
      rep.message = fmt::format("r_x = {:.6g}", rx);
      finish(rep, a);
      out.push_back(std::move(rep));
    }
  }
  return out;
}

std::vector<MarginReport> check_exceptional_set(Context& c, std::vector<Point>* E_out) {
  if (!c.sc().gauge) throw ScenarioError(c.sc().name, "/gauge", "exceptional_set needs a gauge");
  const Gauge& h = *c.sc().gauge;
  const Dimension d = c.dim();
  const std::vector<Point>& S = c.sc().S;
  const Input diam = c.diameter_slot();
  const Input R = c.inradius_slot();
  const Input g = c.gap_slot();
  const Input supG = c.supG_slot();
  const Input P = c.punctured_slot(R.value);
  if (!(supG.value > 0.0)) {
    throw ScenarioError(c.sc().name, "/function",
                        "exceptional_set needs sup of u over the boundary of G to be positive (u is constant on G)");
  }
  const double r = c.sc().r.resolve(diam.value);
  if (!(r > 0.0) || r > diam.value * (1.0 + 1e-12)) {
    throw ScenarioError(c.sc().name, "/r", fmt::format("r = {:.6g} is outside (0, diam D]", r));
  }
  const std::vector<ExceptionalPoint> E = compute_exceptional_set(S, c.muD(), h, r, supG.value, c.opts().guard_points);
  std::vector<bool> in_E(S.size(), false);
  std::vector<Point> Epts;
  std::vector<double> radii;
  for (const ExceptionalPoint& e : E) {
    in_E[e.index] = true;
    Epts.push_back(S[e.index]);
    radii.push_back(e.t);
  }
  if (E_out) *E_out = Epts;

  const std::vector<Input>& har = c.harnack_S();
  double sup_dist = 1.0;
  Side dist_side = Side::exact;
  Audit base;
  for (const Input& in : har) {
    if (!in.fail.empty()) base.fails.push_back(in.fail);
    if (!in.refuse.empty()) base.refusals.push_back(in.refuse);
    if (in.value >= sup_dist) {
      sup_dist = in.value;
      dist_side = in.side;
    }
  }
  base.notes.push_back({"harnack_D", sup_dist, dist_side, "sup over S"});
  base.use("sup_boundary_G", supG);
  base.use("diameter", diam);
  base.use("inradius", R);
  base.use("gap", g);
  base.use("harnack_punctured", P);
  const std::string note = "E uses the radial counting function of the Riesz measure restricted to closure(D)";

  std::vector<MarginReport> out;
  {
    MarginReport rep = base_report(c, "exceptional_set", "exceptional_set[outside]");
    Audit a = base;
    ExtReal inf_u = ExtReal::pos_inf();
    for (std::size_t i = 0; i < S.size(); ++i)
      if (!in_E[i]) inf_u = min(inf_u, c.u()(S[i]));
    const ExtReal n0h = n0h_integral(h, r, d);
    const double ratio = refinement_ratio(d, diam.value, r, R.value, g.value);
    rep.lhs = inf_u;
    rep.rhs = -(ExtReal(sup_dist - 1.0 + ratio * P.value) + n0h) * ExtReal(supG.value);
    rep.rhs_side = combine({dist_side, supG.side, diam.side, R.side, g.side, P.side}, Side::lower);
    rep.message = fmt::format("|E| = {} of {}, r = {:.6g}; {}", E.size(), S.size(), r, note);
    if (n0h.is_pos_inf()) rep.message += "; gauge integral diverges, bound is vacuous";
    finish(rep, a);
    out.push_back(std::move(rep));
  }
  const double bound = std::pow(5.0, d.value()) * P.value / collar(d, R.value, g.value);
  {
    MarginReport rep = base_report(c, "exceptional_set", "exceptional_set[content]");
    Audit a = base;
    const CoverEstimate cover = content_upper_bound(Epts, h, r);
    rep.relation = Relation::leq;
    rep.lhs = cover.total_gauge;
    rep.lhs_side = Side::upper;
    rep.rhs = bound;
    rep.rhs_side = combine({R.side, g.side, P.side}, Side::upper);
    rep.message = fmt::format("cube cover with {} balls at level {}", cover.balls.size(), cover.level);
    finish(rep, a);
    if (rep.verdict == Verdict::fail && a.fails.empty()) {
      rep.verdict = Verdict::inconclusive;
      rep.message += "; the cover value is only an upper bound for the content";
    }
    out.push_back(std::move(rep));
  }
  {
    MarginReport rep = base_report(c, "exceptional_set", "exceptional_set[besicovitch]");
    Audit a = base;
    const CoverEstimate cover = besicovitch_cover(Epts, radii);
    rep.relation = Relation::leq;
    rep.lhs = cover_gauge_sum(cover, h);
    rep.lhs_side = Side::upper;
    rep.rhs = bound;
    rep.rhs_side = combine({R.side, g.side, P.side}, Side::upper);
    rep.message = fmt::format("subcover of {} balls with multiplicity {} (limit {})", cover.balls.size(),
                              cover.multiplicity, static_cast<int>(std::pow(5.0, d.value())));
    finish(rep, a);
    out.push_back(std::move(rep));
  }
  return out;
}

// H_u^G(o): exact on intervals and on balls centered at o.
Estimate majorant_at_o(Context& c) {
  const Domain& G = c.G();
  if (const Ball* b = G.as_ball(); b && b->center == c.o()) {
    return {sphere_mean(c.u(), c.o(), b->radius).value(), 0.0, Side::exact};
  }
  const TestFunction& u = c.u();
  const ScalarField f = [&u](const Point& p) { return u(p); };
  if (G.as_interval()) return harmonic_average(c.measure(G, c.o(), kStreamMajorant), f);
  if (G.as_ball()) return best_harmonic_majorant(f, G, c.o(), c.est().samples, derive_seed(c.seed(), kStreamMajorant));
  const HarmonicMeasureSample s = c.measure(G, c.o(), kStreamMajorant);
  return harmonic_average(s, f);
}

std::vector<MarginReport> check_riesz_mass_bound(Context& c) {
  MarginReport rep = base_report(c, "riesz_mass_bound", "riesz_mass_bound");
  const Dimension d = c.dim();
  Audit a;
  const Input R = c.inradius_slot();
  const Input g = c.gap_slot();
  const Input P = c.punctured_slot(R.value);
  const Estimate H = majorant_at_o(c);
  const double hw = H.side == Side::estimate ? H.half_width : 0.0;
  const Input Hin = c.resolve("majorant_G", Need::upper, H.value, H.side,
                              H.side == Side::exact ? H.value : H.value - kMcSigmas * hw - 1e-12,
                              H.side == Side::exact ? H.value : H.value + kMcSigmas * hw + 1e-12,
                              H.side == Side::exact ? "closed form" : "harmonic measure estimate", true);
  a.use("inradius", R);
  a.use("gap", g);
  a.use("harnack_punctured", P);
  a.use("majorant_G", Hin);
  rep.relation = Relation::leq;
  rep.lhs = c.muD().total_mass();
  rep.rhs = ExtReal(P.value / collar(d, R.value, g.value)) * ExtReal(Hin.value);
  rep.half_width = Hin.source == "injected" ? 0.0 : P.value / collar(d, R.value, g.value) * hw;
  rep.rhs_side = combine({R.side, g.side, P.side, Hin.side}, Side::upper);
  finish(rep, a);
  return {rep};
}

std::vector<MarginReport> check_green_lower_bound(Context& c) {
  MarginReport rep = base_report(c, "green_lower_bound", "green_lower_bound");
  const Dimension d = c.dim();
  Audit a;
  const Input R = c.inradius_slot();
  const Input g = c.gap_slot();
  const Input P = c.punctured_slot(R.value);
  a.use("inradius", R);
  a.use("gap", g);
  a.use("harnack_punctured", P);
  rep.rhs = ExtReal(collar(d, R.value, g.value) / P.value);
  rep.rhs_side = combine({R.side, g.side, P.side}, Side::lower);

  const Domain& G = c.G();
  const Ball* gb = G.as_ball();
  if (gb && gb->center == c.o()) {
    // g_o^G(y) = k(Rg) - k(|y - o|) decreases in |y - o|.
    double far = 0.0;
    bool exact = true;
    if (const Ball* db = c.D().as_ball()) {
      far = distance(db->center, c.o()) + db->radius;
      exact = db->center == c.o();
    } else if (const Interval* I = c.D().as_interval()) {
      far = std::max(std::abs(I->a - c.o()[0]), std::abs(I->b - c.o()[0]));
    } else {
      const BoundarySample s = boundary_sample(c.D(), c.est().boundary_samples, derive_seed(c.seed(), kStreamGreenG));
      for (const Point& y : s.points) far = std::max(far, distance(y, c.o()));
      far += s.covering_radius;
      exact = false;
    }
    if (std::isfinite(far) && far < gb->radius) {
      rep.lhs = kernel_increment(d, far, gb->radius);
      rep.lhs_side = exact ? Side::exact : Side::lower;
      rep.message = "closed-form Green function of G";
    } else {
      rep.lhs = 0.0;
      rep.lhs_side = Side::lower;
      a.refusals.push_back("no certified bound on the distance from o to the boundary of D");
    }
  } else {
    const HarmonicMeasureSample hm = c.measure(G, c.o(), kStreamGreenG);
    const BoundarySample s = boundary_sample(c.D(), c.est().boundary_samples, derive_seed(c.seed(), kStreamGreenG));
    ExtReal best = ExtReal::pos_inf();
    double hw = 0.0;
    for (const Point& y : s.points) {
      const GreenEstimate ge = green_from_sample(hm, c.o(), y);
      if (ge.value < best) {
        best = ge.value;
        hw = ge.half_width;
      }
    }
    rep.lhs = best;
    // On intervals both the harmonic measure and the boundary of D are two exact points.
    rep.lhs_side = G.as_interval() ? Side::exact : Side::estimate;
    rep.half_width = hw;
    rep.message = fmt::format("minimum of the Green function over {} boundary points", s.points.size());
  }
  finish(rep, a);
  return {rep};
}

struct PoleGreen {
  ExtReal value{0.0};
  double half_width = 0.0;
  Side side = Side::exact;
};

// g_x^D(y) for each y, with the rule-halving difference as the error of
// deterministic quadrature.
std::vector<PoleGreen> green_values(Context& c, const Point& x, const std::vector<Point>& ys, std::uint64_t stream) {
  const Domain& D = c.D();
  std::vector<PoleGreen> out;
  if (const Ball* b = D.as_ball(); b && b->center == x) {
    for (const Point& y : ys) out.push_back({green_ball_center(b->radius, x, y).value, 0.0, Side::exact});
    return out;
  }
  const HarmonicMeasureSample fine = c.measure(D, x, stream);
  std::optional<HarmonicMeasureSample> coarse;
  if (!fine.monte_carlo && D.as_ball()) {
    coarse = harmonic_measure(D, x, std::max<std::size_t>(c.est().samples / 2, 4), 0);
  }
  for (const Point& y : ys) {
    const GreenEstimate g = green_from_sample(fine, x, y);
    PoleGreen pg{g.value, g.half_width, D.as_interval() ? Side::exact : Side::estimate};
    if (coarse && g.value.is_finite()) {
      const GreenEstimate gc = green_from_sample(*coarse, x, y);
      if (gc.value.is_finite()) pg.half_width = std::max(pg.half_width, std::abs(g.value.value() - gc.value.value()));
    }
    out.push_back(pg);
  }
  return out;
}

std::vector<Point> green_targets(const Context& c) {
  std::vector<Point> ys;
  for (std::size_t i : spread_indices(c.sc().S.size(), c.opts().green_points)) {
    if (c.sc().S[i] != c.o()) ys.push_back(c.sc().S[i]);
  }
  return ys;
}

std::vector<Point> pole_points(const Context& c, std::size_t k) {
  std::vector<Point> xs{c.o()};
  for (const Point& y : green_targets(c)) {
    if (xs.size() >= k) break;
    bool atom = false;
    for (const Atom& a : c.mu().atoms()) atom = atom || a.loc == y;
    if (!atom) xs.push_back(y);
  }
  return xs;
}

std::vector<MarginReport> check_green_upper_bound(Context& c) {
  const Input diam = c.diameter_slot();
  const std::vector<Point> ys = green_targets(c);
  const std::vector<PoleGreen> gs = green_values(c, c.o(), ys, kStreamGreenD);
  const Dimension d = c.dim();
  std::vector<MarginReport> out;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    MarginReport rep = base_report(c, "green_upper_bound", fmt::format("green_upper_bound[{}]", i));
    rep.x = ys[i];
    Audit a;
    a.use("diameter", diam);
    rep.relation = Relation::leq;
    rep.lhs = gs[i].value;
    rep.lhs_side = gs[i].side;
    rep.half_width = gs[i].half_width;
    rep.rhs = kernel_increment(d, distance(ys[i], c.o()), diam.value);
    rep.rhs_side = combine({diam.side}, Side::upper);
    finish(rep, a);
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<MarginReport> check_green_potential_bound(Context& c) {
  const Input diam = c.diameter_slot();
  std::vector<Point> atoms_in;
  std::vector<double> masses;
  for (const Atom& at : c.mu().atoms()) {
    if (c.D().contains(at.loc)) {
      atoms_in.push_back(at.loc);
      masses.push_back(at.mass);
    }
  }
  const std::vector<Point> xs = pole_points(c, 4);
  std::vector<MarginReport> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    MarginReport rep = base_report(c, "green_potential_bound", fmt::format("green_potential_bound[{}]", i));
    rep.x = xs[i];
    Audit a;
    a.use("diameter", diam);
    ExtReal lhs{0.0};
    double hw = 0.0;
    Side side = Side::exact;
    if (!atoms_in.empty()) {
      const std::vector<PoleGreen> gs = green_values(c, xs[i], atoms_in, kStreamGreenD + 1 + i);
      for (std::size_t k = 0; k < gs.size(); ++k) {
        lhs += ExtReal(masses[k]) * gs[k].value;
        hw += masses[k] * gs[k].half_width;
        if (gs[k].side == Side::estimate) side = Side::estimate;
      }
    }
    rep.relation = Relation::leq;
    rep.lhs = lhs;
    rep.lhs_side = side;
    rep.half_width = hw;
    rep.rhs = integrated_counting(c.muD(), xs[i], diam.value);
    rep.rhs_side = combine({diam.side}, Side::upper);
    finish(rep, a);
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<MarginReport> check_poisson_jensen(Context& c) {
  const std::vector<Point> xs = pole_points(c, 4);
  const TestFunction& u = c.u();
  const ScalarField f = [&u](const Point& p) { return u(p); };
  const bool interval = c.D().as_interval() != nullptr;
  std::vector<MarginReport> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    MarginReport rep = base_report(c, "poisson_jensen", fmt::format("poisson_jensen[{}]", i));
    rep.x = xs[i];
    Audit a;
    rep.relation = Relation::leq;
    rep.rhs = interval ? kPoissonJensenTolInterval : kPoissonJensenTolQuadrature;
    try {
      const std::size_t n = c.nodes_for(c.D(), xs[i]);
      const Estimate e = poisson_jensen_residual(f, c.mu(), c.D(), xs[i], n, derive_seed(c.seed(), kStreamPoissonJensen + i));
      if (c.D().as_sdf()) c.count_walks(n);
      if (std::isfinite(e.value)) {
        rep.lhs = std::abs(e.value);
      } else {
        rep.lhs = 0.0;
        a.refusals.push_back("residual is not finite (an atom lies on the boundary of D)");
      }
      rep.half_width = e.half_width;
      rep.lhs_side = e.side;
      rep.message = "|u(x) - H_u(x) + Green potential|";
    } catch (const WalkError& err) {
      a.refusals.push_back(err.what());
    }
    finish(rep, a);
    out.push_back(std::move(rep));
  }
  return out;
}

bool applicable(const Context& c, const std::string& check) {
  const Scenario& sc = c.sc();
  if (check == "harmonic_lower_bound") return c.muD().empty() && !sc.S.empty();
  if (check == "refined_lower_bound" || check == "riesz_mass_bound" || check == "green_lower_bound") return sc.has_outer();
  if (check == "exceptional_set") return sc.has_outer() && sc.gauge.has_value();
  return true;
}

std::string needs_message(const std::string& check) {
  if (check == "harmonic_lower_bound") return "needs u harmonic on closure(D) and a nonempty S";
  if (check == "exceptional_set") return "needs G and a gauge";
  return "needs an outer domain G";
}

nlohmann::json ext_json(ExtReal v) {
  if (v.is_pos_inf()) return "inf";
  if (v.is_neg_inf()) return "-inf";
  return v.value();
}

nlohmann::json num_json(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

std::vector<double> coords(const Point& p) { return {p.coords().begin(), p.coords().end()}; }

std::string num_csv(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return fmt::format("{:.17g}", v);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string point_csv(const std::optional<Point>& x) {
  if (!x) return "";
  std::string s;
  for (double v : x->coords()) {
    if (!s.empty()) s += ' ';
    s += fmt::format("{:.17g}", v);
  }
  return s;
}

nlohmann::json options_json(const EngineOptions& o) {
  nlohmann::json j{{"version", SBH_VERSION}, {"seed", o.seed}};
  if (o.samples) j["samples"] = *o.samples;
  if (o.walks) j["walks"] = *o.walks;
  if (o.mesh) j["mesh"] = *o.mesh;
  if (o.shell) j["shell"] = *o.shell;
  return j;
}

std::string options_header(const EngineOptions& o) {
  std::string s = fmt::format("# version={} seed={}", SBH_VERSION, o.seed);
  if (o.samples) s += fmt::format(" samples={}", *o.samples);
  if (o.walks) s += fmt::format(" walks={}", *o.walks);
  if (o.mesh) s += fmt::format(" mesh={}", *o.mesh);
  if (o.shell) s += fmt::format(" shell={}", *o.shell);
  return s + "\n";
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::pass_with_mc: return "pass_with_mc";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::fail: return "fail";
  }
  return "?";
}

std::string_view to_string(Relation r) { return r == Relation::geq ? ">=" : "<="; }

double signed_margin(ExtReal lhs, ExtReal rhs, Relation rel) {
  if (lhs == rhs) return 0.0;
  const double m = lhs.value() - rhs.value();
  return rel == Relation::geq ? m : -m;
}

std::vector<ExceptionalPoint> compute_exceptional_set(const std::vector<Point>& S, const AtomicMeasure& mu,
                                                      const Gauge& h, double r, double level,
                                                      std::size_t guard_points) {
  std::vector<ExceptionalPoint> out;
  for (std::size_t i = 0; i < S.size(); ++i) {
    const Point& x = S[i];
    std::vector<double> cand;
    double at_x = 0.0;
    for (const Atom& a : mu.atoms()) {
      const double t = distance(a.loc, x);
      if (t == 0.0) at_x += a.mass;
      if (t > 0.0 && t <= r) cand.push_back(t);
    }
    for (std::size_t k = 1; k <= guard_points; ++k) cand.push_back(r * static_cast<double>(k) / guard_points);
    double best = 0.0;
    for (double t : cand) {
      if (t > best && radial_counting(mu, x, t) >= h(t) * level) best = t;
    }
    if (best == 0.0 && at_x > 0.0) {
      // Counting is at least the atom mass near 0 while h(t) -> 0.
      double t = r;
      for (int k = 0; k < 400 && h(t) * level > at_x; ++k) t *= 0.5;
      if (h(t) * level <= at_x) best = t;
    }
    if (best > 0.0) out.push_back({i, best});
  }
  return out;
}

ScenarioResult run_scenario(const Scenario& sc, std::uint64_t seed, const EngineOptions& opts) {
  Context c(sc, seed, opts);
  ScenarioResult res;
  res.name = sc.name;
  res.seed = seed;
  res.shift = sc.u->shift();
  std::vector<std::string> checks = sc.checks;
  if (checks.empty()) {
    for (const std::string& k : known_checks())
      if (applicable(c, k)) checks.push_back(k);
  } else {
    for (std::size_t i = 0; i < checks.size(); ++i) {
      if (!applicable(c, checks[i]) && checks[i] != "harmonic_lower_bound") {
        throw ScenarioError(sc.name, fmt::format("/checks/{}", i), checks[i] + " " + needs_message(checks[i]));
      }
    }
  }
  for (const std::string& k : checks) {
    std::vector<MarginReport> reps;
    if (k == "harmonic_lower_bound") reps = check_harmonic_lower_bound(c);
    else if (k == "pointwise_lower_bound") reps = check_pointwise(c);
    else if (k == "refined_lower_bound") reps = check_refined(c);
    else if (k == "exceptional_set") reps = check_exceptional_set(c, &res.exceptional_set);
    else if (k == "riesz_mass_bound") reps = check_riesz_mass_bound(c);
    else if (k == "green_lower_bound") reps = check_green_lower_bound(c);
    else if (k == "green_upper_bound") reps = check_green_upper_bound(c);
    else if (k == "green_potential_bound") reps = check_green_potential_bound(c);
    else if (k == "poisson_jensen") reps = check_poisson_jensen(c);
    for (MarginReport& r : reps) res.reports.push_back(std::move(r));
  }
  res.walks = c.walks_used();
  return res;
}

SuiteResult run_suite(const std::vector<Scenario>& corpus, const EngineOptions& opts) {
  SuiteResult out;
  out.options = opts;
  out.scenarios.resize(corpus.size());
  parallel_for(corpus.size(), opts.threads, [&](std::size_t i) {
    const std::uint64_t seed = corpus[i].est.seed ? *corpus[i].est.seed : derive_seed(opts.seed, i);
    out.scenarios[i] = run_scenario(corpus[i], seed, opts);
  });
  SuiteSummary& s = out.summary;
  s.scenarios = corpus.size();
  std::map<std::string, double> worst;
  for (const ScenarioResult& r : out.scenarios) {
    s.walks += r.walks;
    for (const MarginReport& m : r.reports) {
      ++s.reports;
      switch (m.verdict) {
        case Verdict::pass: ++s.pass; break;
        case Verdict::pass_with_mc: ++s.pass_with_mc; break;
        case Verdict::inconclusive: ++s.inconclusive; break;
        case Verdict::fail: ++s.fail; break;
      }
      auto [it, fresh] = worst.emplace(m.check, m.margin);
      if (!fresh) it->second = std::min(it->second, m.margin);
    }
  }
  for (const std::string& k : known_checks())
    if (auto it = worst.find(k); it != worst.end()) s.worst_margin.emplace_back(k, it->second);
  return out;
}

std::string reports_to_json(const SuiteResult& res) {
  using nlohmann::json;
  json j;
  j["header"] = options_json(res.options);
  json sum{{"scenarios", res.summary.scenarios},       {"reports", res.summary.reports},
           {"pass", res.summary.pass},                 {"pass_with_mc", res.summary.pass_with_mc},
           {"inconclusive", res.summary.inconclusive}, {"fail", res.summary.fail},
           {"walks", res.summary.walks}};
  json worst = json::object();
  for (const auto& [k, v] : res.summary.worst_margin) worst[k] = num_json(v);
  sum["worst_margin"] = worst;
  j["summary"] = sum;
  json scen = json::array();
  for (const ScenarioResult& r : res.scenarios) {
    json sj{{"name", r.name}, {"seed", r.seed}, {"shift", r.shift}, {"walks", r.walks}};
    json E = json::array();
    for (const Point& p : r.exceptional_set) E.push_back(coords(p));
    sj["exceptional_set"] = E;
    json reps = json::array();
    for (const MarginReport& m : r.reports) {
      json mj{{"check", m.check},
              {"id", m.id},
              {"relation", std::string(to_string(m.relation))},
              {"lhs", ext_json(m.lhs)},
              {"lhs_side", std::string(to_string(m.lhs_side))},
              {"rhs", ext_json(m.rhs)},
              {"rhs_side", std::string(to_string(m.rhs_side))},
              {"margin", num_json(m.margin)},
              {"half_width", m.half_width},
              {"verdict", std::string(to_string(m.verdict))}};
      if (m.x) mj["x"] = coords(*m.x);
      json slots = json::array();
      for (const SlotNote& n : m.slots)
        slots.push_back({{"slot", n.slot}, {"value", num_json(n.value)}, {"side", std::string(to_string(n.side))},
                         {"source", n.source}});
      mj["slots"] = slots;
      if (!m.message.empty()) mj["message"] = m.message;
      reps.push_back(mj);
    }
    sj["reports"] = reps;
    scen.push_back(sj);
  }
  j["scenarios"] = scen;
  return j.dump(2) + "\n";
}

std::string reports_to_csv(const SuiteResult& res) {
  std::string out = options_header(res.options);
  out += "scenario,seed,check,id,x,relation,lhs,lhs_side,rhs,rhs_side,margin,half_width,half_width_side,verdict,message\n";
  for (const ScenarioResult& r : res.scenarios) {
    for (const MarginReport& m : r.reports) {
      out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_field(r.name), r.seed, m.check,
                         csv_field(m.id), point_csv(m.x), to_string(m.relation), m.lhs.to_string(), to_string(m.lhs_side),
                         m.rhs.to_string(), to_string(m.rhs_side), num_csv(m.margin), num_csv(m.half_width),
                         m.half_width > 0.0 ? "mc" : "exact", to_string(m.verdict), csv_field(m.message));
    }
  }
  return out;
}

SweepResult sweep(const Scenario& sc, const Point& a, const Point& b, std::size_t n, std::optional<double> r_x,
                  std::uint64_t seed, const EngineOptions& opts) {
  Context c(sc, seed, opts);
  SweepResult res;
  res.scenario = sc.name;
  res.seed = seed;
  res.options = opts;
  if (n == 0) n = 1;
  std::vector<Point> xs;
  std::vector<double> params;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
    const Point x = a + (b - a) * s;
    if (!c.D().contains(x)) {
      throw ScenarioError(sc.name, "/segment", fmt::format("segment point {} leaves D", point_csv(x)));
    }
    if (c.u()(x).is_neg_inf()) {
      res.skipped_atoms.push_back(x);
      continue;
    }
    xs.push_back(x);
    params.push_back(s);
  }
  const std::vector<Input> har = c.harnack_slots(xs);
  const Input diam = c.diameter_slot();
  const Input supD = c.supD_slot();
  std::optional<Input> R, g, supG, P;
  if (sc.has_outer()) {
    R = c.inradius_slot();
    g = c.gap_slot();
    supG = c.supG_slot();
    P = c.punctured_slot(R->value);
    res.r_x = r_x ? *r_x : sc.r_x.front().resolve(diam.value);
    if (!(res.r_x > 0.0) || res.r_x > diam.value * (1.0 + 1e-12)) {
      throw ScenarioError(sc.name, "/r_x", fmt::format("r_x = {:.6g} is outside (0, diam D]", res.r_x));
    }
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    SweepRow row;
    row.s = params[i];
    row.x = xs[i];
    row.norm = distance(xs[i], c.o());
    row.harnack = har[i].value;
    row.harnack_side = har[i].side;
    row.lhs = c.u()(xs[i]);
    row.rhs_pointwise = pointwise_rhs(har[i].value, supD.value, integrated_counting(c.muD(), xs[i], diam.value));
    row.margin_pointwise = signed_margin(row.lhs, row.rhs_pointwise, Relation::geq);
    row.rhs_side = combine({har[i].side, supD.side, diam.side}, Side::lower);
    if (sc.has_outer()) {
      const Input& first = sc.substitute_sup_G ? *supG : supD;
      row.rhs_refined = refined_rhs(c.dim(), har[i].value, first.value, diam.value, res.r_x, R->value, g->value,
                                    P->value, supG->value, integrated_counting(c.muD(), xs[i], res.r_x))
                            .rhs;
      row.margin_refined = signed_margin(row.lhs, *row.rhs_refined, Relation::geq);
    }
    res.rows.push_back(std::move(row));
  }
  return res;
}

std::string sweep_to_csv(const SweepResult& res) {
  std::string out = options_header(res.options);
  out += fmt::format("# scenario={} seed={}", res.scenario, res.seed);
  if (res.r_x > 0.0) out += fmt::format(" r_x={:.17g}", res.r_x);
  out += "\n";
  for (const Point& p : res.skipped_atoms) out += fmt::format("# skipped atom at {}\n", point_csv(p));
  out += "s,x,norm,harnack,harnack_side,lhs,lhs_side,rhs_pointwise,rhs_pointwise_side,rhs_refined,rhs_refined_side,"
         "margin_pointwise,margin_refined\n";
  for (const SweepRow& r : res.rows) {
    out += fmt::format("{},{},{},{},{},{},exact,{},{},{},{},{},{}\n", num_csv(r.s), point_csv(r.x), num_csv(r.norm),
                       num_csv(r.harnack), to_string(r.harnack_side), r.lhs.to_string(), r.rhs_pointwise.to_string(),
                       to_string(r.rhs_side), r.rhs_refined ? r.rhs_refined->to_string() : "", r.rhs_refined ? "lower" : "",
                       num_csv(r.margin_pointwise), r.margin_refined ? num_csv(*r.margin_refined) : "");
  }
  return out;
}

}  // namespace sbh
