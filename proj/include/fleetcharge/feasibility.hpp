#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fleetcharge/scenario.hpp"
#include "fleetcharge/simplex_lp.hpp"

namespace fleetcharge {

/// Hard cap on station count: the constraint set is exponential in m by
/// construction (2^m - 2 subset rows), so m stays small.
inline constexpr std::size_t kMaxStations = 12;

/// Per-company reachability sets F_j^i, stored as one station-bitmask per
/// vehicle. A vehicle with an empty mask can reach no station at all; such
/// "stranded" vehicles make every discrete allocation infeasible and mark the
/// fleet as degenerate.
struct FeasibilitySets {
  int company_id = 0;
  std::size_t station_count = 0;

  std::vector<int> station_ids;             // position -> station id, ascending
  std::vector<int> vehicle_ids;             // ascending
  std::vector<std::uint32_t> reach_masks;   // bit j set <=> vehicle reaches station j
  std::vector<int> stranded;                // ids with empty masks

  std::size_t fleet_size() const { return vehicle_ids.size(); }
  bool degenerate() const { return !stranded.empty(); }

  /// |union of F_j^i over stations j in the mask|
  std::size_t union_size(std::uint32_t station_mask) const {
    std::size_t n = 0;
    for (std::uint32_t rm : reach_masks)
      if (rm & station_mask) ++n;
    return n;
  }

  /// Vehicle ids in F_j^i, ascending.
  std::vector<int> station_set(std::size_t j) const {
    std::vector<int> out;
    for (std::size_t v = 0; v < reach_masks.size(); ++v)
      if (reach_masks[v] & (1u << j)) out.push_back(vehicle_ids[v]);
    return out;
  }
};

inline FeasibilitySets feasibility_sets(const Company& c, const std::vector<Station>& stations) {
  if (stations.size() > kMaxStations)
    throw ConfigError("station count " + std::to_string(stations.size()) + " exceeds the hard limit of " +
                      std::to_string(kMaxStations));
  FeasibilitySets fs;
  fs.company_id = c.id;
  fs.station_count = stations.size();
  fs.station_ids.reserve(stations.size());
  for (const auto& st : stations) fs.station_ids.push_back(st.id);
  fs.vehicle_ids.reserve(c.vehicles.size());
  fs.reach_masks.reserve(c.vehicles.size());
  for (const auto& v : c.vehicles) {
    std::uint32_t mask = 0;
    for (std::size_t j = 0; j < stations.size(); ++j)
      if (reachable(v, stations[j])) mask |= 1u << j;
    fs.vehicle_ids.push_back(v.id);
    fs.reach_masks.push_back(mask);
    if (mask == 0) fs.stranded.push_back(v.id);
  }
  return fs;
}

/// One row of the tightened allocation polytope:
/// N_i * sum_{j in mask} x_j <= bound, bound = max{0, |union F_j| - |S|}.
struct SubsetConstraint {
  std::uint32_t mask = 0;
  double bound = 0.0;
};

/// The polytope K-bar: probability simplex over stations intersected with the
/// 2^m - 2 proper-nonempty-subset rows above. Immutable once built; emptiness
/// is decided eagerly by a phase-1 LP and a feasible witness is kept.
struct FeasibleSet {
  std::size_t fleet_size = 0;
  std::size_t station_count = 0;
  std::vector<SubsetConstraint> constraints;  // mask-ascending, 2^m - 2 rows
  std::optional<Vec> witness;                 // nullopt <=> empty

  bool contains(const Vec& x, double tol = 1e-8) const {
    if (x.size() != station_count) throw std::invalid_argument("is_member: dimension mismatch");
    for (double v : x)
      if (v < -tol) return false;
    if (std::abs(sum(x) - 1.0) > tol) return false;
    const double n = static_cast<double>(fleet_size);
    for (const auto& sc : constraints) {
      double s = 0.0;
      for (std::size_t j = 0; j < station_count; ++j)
        if (sc.mask & (1u << j)) s += x[j];
      if (n * s > sc.bound + n * tol) return false;
    }
    return true;
  }
};

namespace detail {

inline SimplexLp lp_over(const FeasibleSet& k) {
  SimplexLp lp(k.station_count);
  const double n = static_cast<double>(k.fleet_size);
  for (const auto& sc : k.constraints) {
    Vec row(k.station_count, 0.0);
    for (std::size_t j = 0; j < k.station_count; ++j)
      if (sc.mask & (1u << j)) row[j] = n;
    lp.add_less_equal(std::move(row), sc.bound);
  }
  lp.add_equal(Vec(k.station_count, 1.0), 1.0);
  return lp;
}

}  // namespace detail

inline FeasibleSet build_constraint_set(const FeasibilitySets& fs, std::size_t max_stations = kMaxStations) {
  const std::size_t m = fs.station_count;
  if (m == 0) throw ConfigError("constraint set needs at least one station");
  if (m > max_stations || m > kMaxStations)
    throw ConfigError("station count " + std::to_string(m) + " exceeds the hard limit of " +
                      std::to_string(std::min(max_stations, kMaxStations)));
  FeasibleSet k;
  k.fleet_size = fs.fleet_size();
  k.station_count = m;
  const std::uint32_t full = (1u << m) - 1;
  k.constraints.reserve((std::size_t(1) << m) - 2);
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    const double covered = static_cast<double>(fs.union_size(mask));
    const double bound = std::max(0.0, covered - std::popcount(mask));
    k.constraints.push_back({mask, bound});
  }
  auto sol = detail::lp_over(k).find_feasible();
  if (sol.status == detail::LpStatus::optimal) k.witness = std::move(sol.x);
  return k;
}

inline bool is_member(const Vec& x, const FeasibleSet& k, double tol = 1e-8) { return k.contains(x, tol); }

inline bool is_empty(const FeasibleSet& k) { return !k.witness.has_value(); }

/// A vertex of K-bar maximizing objective'x. Vertex sampling for tests and
/// certificates; throws on empty sets.
inline Vec argmax_vertex(const FeasibleSet& k, const Vec& objective) {
  if (is_empty(k)) throw InfeasibleError("argmax_vertex: empty feasible set");
  auto sol = detail::lp_over(k).maximize(objective);
  if (sol.status != detail::LpStatus::optimal) throw NumericError("argmax_vertex: LP did not solve");
  return sol.x;
}

}  // namespace fleetcharge
