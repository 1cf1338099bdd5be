#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sbh/bound.hpp"
#include "sbh/ext_real.hpp"
#include "sbh/hausdorff.hpp"
#include "sbh/point.hpp"
#include "sbh/riesz.hpp"
#include "sbh/scenario.hpp"

namespace sbh {

inline constexpr double kTolClosedForm = 1e-9;
inline constexpr double kMcSigmas = 3.0;
inline constexpr double kPoissonJensenTolInterval = 1e-12;
inline constexpr double kPoissonJensenTolQuadrature = 1e-3;

enum class Verdict { pass, pass_with_mc, inconclusive, fail };
enum class Relation { geq, leq };

std::string_view to_string(Verdict v);
std::string_view to_string(Relation r);

/// Where an input of a check came from and which side of the truth it is on.
struct SlotNote {
  std::string slot;
  double value = 0.0;
  Side side = Side::exact;
  std::string source;  // "closed form", "chain", "sample", "injected", ...
};

struct MarginReport {
  std::string scenario;
  std::string check;
  std::string id;
  std::optional<Point> x;
  Relation relation = Relation::geq;
  ExtReal lhs{0.0};
  ExtReal rhs{0.0};
  double margin = 0.0;  // >= 0 when the relation holds
  double half_width = 0.0;
  Side lhs_side = Side::exact;
  Side rhs_side = Side::exact;
  std::vector<SlotNote> slots;
  Verdict verdict = Verdict::pass;
  std::string message;
};

/// lhs - rhs for geq, rhs - lhs for leq; 0 when both sides are the same infinity.
double signed_margin(ExtReal lhs, ExtReal rhs, Relation rel);

struct EngineOptions {
  std::uint64_t seed = 0;  // suite seed
  std::optional<std::size_t> samples;
  std::optional<std::size_t> walks;
  std::optional<double> mesh;
  std::optional<double> shell;
  unsigned threads = 1;
  std::size_t green_points = 8;  // points of S used by the Green-function checks
  std::size_t guard_points = 64;
};

/// Point of the exceptional set with the largest witnessing radius.
struct ExceptionalPoint {
  std::size_t index = 0;  // into S
  double t = 0.0;
};

/// Points x of S with radial_counting(mu, x, t) >= h(t) * level for some t in
/// (0, r]. Candidates are the atom distances in (0, r], atoms at x itself and
/// `guard_points` equispaced radii.
std::vector<ExceptionalPoint> compute_exceptional_set(const std::vector<Point>& S, const AtomicMeasure& mu,
                                                      const Gauge& h, double r, double level,
                                                      std::size_t guard_points = 64);

struct ScenarioResult {
  std::string name;
  std::uint64_t seed = 0;
  double shift = 0.0;
  std::vector<MarginReport> reports;
  std::vector<Point> exceptional_set;
  std::size_t walks = 0;
};

/// Every requested (or applicable) check of one scenario. Throws ScenarioError
/// for scenarios the checks cannot accept.
ScenarioResult run_scenario(const Scenario& sc, std::uint64_t seed, const EngineOptions& opts = {});

struct SuiteSummary {
  std::size_t scenarios = 0;
  std::size_t reports = 0;
  std::size_t pass = 0;
  std::size_t pass_with_mc = 0;
  std::size_t inconclusive = 0;
  std::size_t fail = 0;
  std::size_t walks = 0;
  /// Smallest margin per check name (closed-form and Monte Carlo reports alike).
  std::vector<std::pair<std::string, double>> worst_margin;
};

struct SuiteResult {
  EngineOptions options;
  std::vector<ScenarioResult> scenarios;
  SuiteSummary summary;
};

/// Scenario i uses its own seed if given, otherwise derive_seed(opts.seed, i).
SuiteResult run_suite(const std::vector<Scenario>& corpus, const EngineOptions& opts = {});

std::string reports_to_json(const SuiteResult& res);
std::string reports_to_csv(const SuiteResult& res);

struct SweepRow {
  double s = 0.0;  // parameter along the segment
  Point x;
  double norm = 0.0;  // |x - o|
  double harnack = 1.0;
  Side harnack_side = Side::exact;
  ExtReal lhs{0.0};
  ExtReal rhs_pointwise{0.0};
  Side rhs_side = Side::exact;
  std::optional<ExtReal> rhs_refined;
  double margin_pointwise = 0.0;
  std::optional<double> margin_refined;
};

struct SweepResult {
  std::string scenario;
  std::uint64_t seed = 0;
  double r_x = 0.0;
  std::vector<SweepRow> rows;
  std::vector<Point> skipped_atoms;
  EngineOptions options;
};

/// Pointwise and refined lower bounds at n equispaced points of the segment
/// [a, b]. Throws ScenarioError if the segment leaves D.
SweepResult sweep(const Scenario& sc, const Point& a, const Point& b, std::size_t n, std::optional<double> r_x,
                  std::uint64_t seed, const EngineOptions& opts = {});

std::string sweep_to_csv(const SweepResult& res);

}  // namespace sbh
