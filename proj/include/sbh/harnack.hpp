#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "sbh/domains.hpp"
#include "sbh/point.hpp"

namespace sbh {

inline constexpr double kChainEps = 1e-6;

enum class HarnackKind { exact, upper_bound, oracle_estimate };

std::string_view to_string(HarnackKind k);

/// A Harnack distance value (>= 1, possibly +inf).
struct HarnackValue {
  double value = 1.0;
  HarnackKind kind = HarnackKind::exact;
  std::string diagnostic;
};

/// Harnack distance in a ball of radius r between its center and a point at
/// distance rho < r: the larger of the two extreme Poisson-kernel ratios,
///   max{(r+rho) r^(d-2) / (r-rho)^(d-1), (r+rho)^(d-1) / ((r-rho) r^(d-2))}.
/// The first term is the larger one for d >= 2; for d = 1 the value is r/(r-rho).
double center_distance_formula(Dimension d, double r, double rho);

/// Exact distance between x and the center of B. Throws GeometryError if x is not in B.
HarnackValue ball_center_distance(const Ball& B, const Point& x);

/// Exact two-point distance in a ball, maximizing the Poisson-kernel ratio in
/// closed form on the great circle through the center, x and y.
HarnackValue ball_pair_distance(const Ball& B, const Point& x, const Point& y);

/// Brute-force estimate of the two-point distance from n sampled boundary
/// points of that great circle; nested uniform samples, so it converges from
/// below as n grows along powers of two.
HarnackValue ball_pair_oracle(const Ball& B, const Point& x, const Point& y, std::size_t n_boundary);

/// Exact distance on an interval (positive harmonic = positive affine).
HarnackValue interval_distance(const Interval& I, double x, double y);

/// Graph for chaining Harnack inequalities. Node i carries rho[i], a lower
/// bound on the distance from the node to the boundary; nodes are adjacent when
/// one lies in the ball of radius rho around the other, with weight
/// (1 + kChainEps) * log center_distance_formula(max rho, |a - b|).
struct ChainGraph {
  Dimension dim{1};
  std::vector<Point> nodes;
  std::vector<double> rho;
  double mesh = 0.0;

  /// Log-distance from the nearest source to every node (dense Dijkstra,
  /// ties resolved by lowest node index; +inf when unreachable).
  std::vector<double> shortest_log_distances(const std::vector<std::size_t>& sources) const;
};

/// Nodes: the grid lo + mesh * k over `bbox` (restricted to rho > 0) plus the
/// special points, sorted lexicographically. `special_index[i]` gives the node
/// index of specials[i]. Throws std::invalid_argument if the grid would exceed
/// max_nodes.
ChainGraph build_chain_graph(const std::function<double(const Point&)>& rho, const Box& bbox, double mesh,
                             const std::vector<Point>& specials, std::vector<std::size_t>* special_index,
                             std::size_t max_nodes = 30000);

/// Certified upper bound on the Harnack distance between x and y in Dm.
HarnackValue chain_upper_bound(const Domain& Dm, const Point& x, const Point& y, double mesh);

/// chain_upper_bound from x to each of ys on one shared graph.
std::vector<HarnackValue> chain_upper_bounds(const Domain& Dm, const Point& x, const std::vector<Point>& ys, double mesh);

/// Upper bound for sup over x on the boundary of D of the Harnack distance in
/// G minus o from x to the sphere of radius R about o (inf over the sphere).
/// Requires R <= dist(o, boundary of D). Sampling error on the boundary of D
/// is covered by the certified covering radius; for d = 1 the value is exact.
HarnackValue punctured_sup_distance(const NestedPair& pair, double R, double mesh, std::size_t n_boundary);

}  // namespace sbh
