#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbh/bound.hpp"
#include "sbh/domains.hpp"
#include "sbh/hausdorff.hpp"
#include "sbh/testbed.hpp"

namespace sbh {

inline constexpr int kScenarioSchema = 1;

/// Malformed scenario input: `path` is the file (or "<string>"), `field` the
/// JSON pointer of the offending entry.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string path, std::string field, const std::string& what);
  const std::string& path() const { return path_; }
  const std::string& field() const { return field_; }

 private:
  std::string path_;
  std::string field_;
};

struct EstimatorParams {
  std::size_t samples = 4096;          // quadrature nodes per harmonic measure
  std::size_t walks = 20000;           // walk-on-spheres paths per harmonic measure
  std::size_t boundary_samples = 256;  // boundary points for suprema and Harnack sups
  double mesh = 0.05;                  // chain graph spacing
  double shell = 1e-4;                 // walk-on-spheres shell, relative to the diameter
  std::optional<std::uint64_t> seed;   // default: derived from the suite seed and index
};

/// A radius given either absolutely or as a fraction of the (upper) diameter of D.
struct RadiusSpec {
  double value = 1.0;
  bool fraction_of_diameter = true;

  double resolve(double diameter) const { return fraction_of_diameter ? value * diameter : value; }
};

/// Value forced into an engine input slot, with the side it claims.
struct SlotOverride {
  double value = 0.0;
  Side side = Side::exact;
};

struct Scenario {
  std::string name;
  std::string description;
  std::optional<Domain> D;
  std::optional<Domain> G;
  Point o;
  std::optional<TestFunction> u;
  std::vector<Point> S;
  std::optional<Gauge> gauge;
  RadiusSpec r{1.0, true};
  std::vector<RadiusSpec> r_x{{1.0, true}, {0.5, true}, {0.125, true}};
  std::vector<std::string> checks;  // empty: every applicable check
  EstimatorParams est;
  std::map<std::string, SlotOverride> inject;
  bool substitute_sup_G = false;

  int dim() const { return o.dim(); }
  bool has_outer() const { return G.has_value(); }
  NestedPair pair() const;
};

/// Names accepted in "checks".
const std::vector<std::string>& known_checks();

/// Names accepted in "inject".
const std::vector<std::string>& known_slots();

Scenario parse_scenario(const std::string& json_text, const std::string& origin = "<string>");
Scenario load_scenario(const std::string& path);

/// Scenario as schema-1 JSON (S written out as explicit points).
std::string scenario_to_json(const Scenario& sc);

}  // namespace sbh
