#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "fleetcharge/feasibility.hpp"

namespace fleetcharge {

struct IntegerAllocation {
  int company_id = 0;
  std::vector<int> counts;  // per station, sums to the fleet size

  int total() const {
    int t = 0;
    for (int n : counts) t += n;
    return t;
  }
};

/// Largest-remainder rounding of N*x: start from the floors, hand the deficit
/// to the largest fractional parts, ties broken by ascending station id.
inline IntegerAllocation round_allocation(const Vec& x, std::size_t fleet_size, int company_id = 0) {
  const std::size_t m = x.size();
  if (m == 0) throw std::invalid_argument("round_allocation: empty vector");
  double total = 0.0;
  for (double v : x) {
    if (v < -1e-6) throw std::invalid_argument("round_allocation: x not on the simplex (negative entry)");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-6) throw std::invalid_argument("round_allocation: x not on the simplex (sum != 1)");

  const double n = static_cast<double>(fleet_size);
  IntegerAllocation alloc;
  alloc.company_id = company_id;
  alloc.counts.assign(m, 0);
  std::vector<double> remainder(m, 0.0);
  long long assigned = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const double exact = n * std::max(0.0, x[j]);
    const double fl = std::floor(exact);
    alloc.counts[j] = static_cast<int>(fl);
    remainder[j] = exact - fl;
    assigned += alloc.counts[j];
  }
  long long deficit = static_cast<long long>(fleet_size) - assigned;

  std::vector<std::size_t> order(m);
  for (std::size_t j = 0; j < m; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t idx = 0; deficit > 0 && idx < m; ++idx, --deficit) ++alloc.counts[order[idx]];
  // float drift can only leave |deficit| <= 1; take back from the smallest remainder
  for (std::size_t idx = m; deficit < 0 && idx-- > 0;) {
    if (alloc.counts[order[idx]] > 0) {
      --alloc.counts[order[idx]];
      ++deficit;
    }
  }
  return alloc;
}

/// Hall condition over every nonempty station subset S:
/// sum_{j in S} n_j <= |union of F_j over S|. Holds with equality at S = M
/// for non-degenerate fleets.
inline bool hall_condition(const IntegerAllocation& alloc, const FeasibilitySets& fs) {
  const std::size_t m = fs.station_count;
  if (alloc.counts.size() != m) throw std::invalid_argument("hall_condition: dimension mismatch");
  const std::uint32_t full = (1u << m) - 1;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    int need = 0;
    for (std::size_t j = 0; j < m; ++j)
      if (mask & (1u << j)) need += alloc.counts[j];
    if (static_cast<std::size_t>(need) > fs.union_size(mask)) return false;
  }
  return true;
}

struct Assignment {
  int company_id = 0;
  std::vector<std::pair<int, int>> vehicle_to_station;  // (vehicle id, station id), vehicle-ascending
};

namespace detail {

inline bool fill_slot(std::size_t station, const FeasibilitySets& fs, std::vector<int>& owner,
                      std::vector<char>& visited) {
  for (std::size_t v = 0; v < fs.reach_masks.size(); ++v) {
    if (visited[v] || !(fs.reach_masks[v] & (1u << station))) continue;
    visited[v] = 1;
    if (owner[v] < 0 || fill_slot(static_cast<std::size_t>(owner[v]), fs, owner, visited)) {
      owner[v] = static_cast<int>(station);
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Perfect vehicle-to-slot matching by augmenting paths on the bipartite
/// graph with n_j station copies. Station slots are filled in ascending
/// station order, scanning vehicles in ascending order, so the output is
/// deterministic. On failure throws InfeasibleError naming a violating
/// station subset (extracted from the failed alternating search).
inline Assignment match_vehicles(const IntegerAllocation& alloc, const FeasibilitySets& fs) {
  const std::size_t m = fs.station_count;
  if (alloc.counts.size() != m) throw std::invalid_argument("match_vehicles: dimension mismatch");
  if (static_cast<std::size_t>(alloc.total()) != fs.fleet_size())
    throw std::invalid_argument("match_vehicles: allocation total differs from fleet size");

  std::vector<int> owner(fs.fleet_size(), -1);  // station index per vehicle
  for (std::size_t j = 0; j < m; ++j) {
    for (int s = 0; s < alloc.counts[j]; ++s) {
      std::vector<char> visited(fs.fleet_size(), 0);
      if (detail::fill_slot(j, fs, owner, visited)) continue;

      // Hall violator: stations whose slots sit on the failed alternating
      // search. All their slots are full with vehicles that can reach only
      // those stations, and this station still wants one more.
      std::uint32_t violator = 1u << j;
      for (std::size_t v = 0; v < visited.size(); ++v)
        if (visited[v] && owner[v] >= 0) violator |= 1u << static_cast<std::size_t>(owner[v]);
      int need = 0;
      std::string stations;
      for (std::size_t sj = 0; sj < m; ++sj) {
        if (!(violator & (1u << sj))) continue;
        need += alloc.counts[sj];
        if (!stations.empty()) stations += ",";
        stations += std::to_string(fs.station_ids[sj]);
      }
      throw InfeasibleError("no feasible matching: stations {" + stations + "} need " + std::to_string(need) +
                            " vehicles but only " + std::to_string(fs.union_size(violator)) +
                            " can reach them (Hall violation)");
    }
  }

  Assignment a;
  a.company_id = alloc.company_id;
  a.vehicle_to_station.reserve(fs.fleet_size());
  for (std::size_t v = 0; v < owner.size(); ++v)
    a.vehicle_to_station.emplace_back(fs.vehicle_ids[v], fs.station_ids[static_cast<std::size_t>(owner[v])]);
  return a;
}

}  // namespace fleetcharge
