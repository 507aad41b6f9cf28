#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fleetcharge/common.hpp"
#include "fleetcharge/rng.hpp"

namespace fleetcharge {

// Battery levels are percentages in [0,100]; positions and ranges are in
// distance-units (km); demand is in charge-units (beta units per percent).

struct Vehicle {
  int id = 0;
  double x = 0.0, y = 0.0;
  double s_start = 0.0;  // current battery, percent
  double s_des = 0.0;    // desired battery, percent
  double d_max = 0.0;    // max range on a full battery
  double beta = 1.0;     // charge-units per battery-percent

  friend bool operator==(const Vehicle&, const Vehicle&) = default;
};

struct Station {
  int id = 0;
  double x = 0.0, y = 0.0;
  int capacity = 0;  // number of charging spots

  friend bool operator==(const Station&, const Station&) = default;
};

struct Company {
  int id = 0;
  std::vector<Vehicle> vehicles;
  double u = 0.0;  // monetary value per km occupied

  std::size_t fleet_size() const { return vehicles.size(); }

  friend bool operator==(const Company&, const Company&) = default;
};

/// Quadratic tracking objective 1/2 sigma'*A_G*sigma + b_G'*sigma. When a
/// target vehicle-count vector is present, b_G = -A_G*target and the cost is
/// reported as the equivalent squared deviation form.
struct GovernmentObjective {
  Vec a_g;  // diagonal of A_G, all entries > 0
  Vec b_g;
  std::optional<Vec> target;

  friend bool operator==(const GovernmentObjective&, const GovernmentObjective&) = default;
};

struct Scenario {
  std::vector<Company> companies;
  std::vector<Station> stations;
  GovernmentObjective objective;
  Vec q;           // diagonal queuing-scale matrix, entries > 0
  Vec p_occupied;  // per-station probability of a vehicle being occupied
  Vec e_pro;       // expected profit around each station
  double region_side = 0.0;

  std::size_t station_count() const { return stations.size(); }
  std::size_t company_count() const { return companies.size(); }
  Vec capacities() const {
    Vec m(stations.size());
    for (std::size_t j = 0; j < stations.size(); ++j) m[j] = stations[j].capacity;
    return m;
  }
  std::vector<double> fleet_sizes() const {
    std::vector<double> n(companies.size());
    for (std::size_t i = 0; i < companies.size(); ++i) n[i] = static_cast<double>(companies[i].fleet_size());
    return n;
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// ---------------------------------------------------------------- formulas

inline double distance(const Vehicle& v, const Station& k) {
  const double dx = v.x - k.x;
  const double dy = v.y - k.y;
  return std::sqrt(dx * dx + dy * dy);
}

/// True iff the vehicle arrives with strictly positive battery under the
/// linear discharge model: s_start - (100/d_max)*d > 0.
inline bool reachable(const Vehicle& v, const Station& k) {
  return v.s_start - (100.0 / v.d_max) * distance(v, k) > 0.0;
}

/// Charge-units needed to reach s_des after driving to the station:
/// beta * (s_des - (s_start - (100/d_max)*d)).
inline double charging_demand(const Vehicle& v, const Station& k) {
  if (!reachable(v, k)) {
    throw std::invalid_argument("charging_demand: station " + std::to_string(k.id) +
                                " not reachable by vehicle " + std::to_string(v.id));
  }
  return v.beta * (v.s_des - (v.s_start - (100.0 / v.d_max) * distance(v, k)));
}

// ---------------------------------------------------------------- validation

inline void validate(const Scenario& s) {
  const std::size_t m = s.stations.size();
  auto fail = [](const std::string& field, const std::string& why) {
    throw ValidationError("scenario field '" + field + "': " + why);
  };
  if (m == 0) fail("stations", "must contain at least one station");
  if (s.companies.empty()) fail("companies", "must contain at least one company");
  // station-indexed vectors (Q, P, e_pro, ...) rely on id-ascending order
  for (std::size_t j = 0; j + 1 < m; ++j)
    if (s.stations[j].id >= s.stations[j + 1].id)
      fail("stations.id", "must be strictly ascending");
  for (std::size_t i = 0; i + 1 < s.companies.size(); ++i)
    if (s.companies[i].id >= s.companies[i + 1].id)
      fail("companies.id", "must be strictly ascending");
  for (const auto& st : s.stations) {
    if (st.capacity <= 0) fail("stations.capacity", "must be > 0 (station " + std::to_string(st.id) + ")");
  }
  for (const auto& c : s.companies) {
    if (c.vehicles.empty()) fail("companies.vehicles", "company " + std::to_string(c.id) + " has no vehicles");
    if (c.u < 0.0) fail("companies.u", "must be >= 0");
    for (const auto& v : c.vehicles) {
      const std::string tag = " (vehicle " + std::to_string(v.id) + ")";
      if (!(v.s_start >= 0.0 && v.s_start <= 100.0)) fail("vehicles.s_start", "must be in [0,100]" + tag);
      if (!(v.s_des >= 0.0 && v.s_des <= 100.0)) fail("vehicles.s_des", "must be in [0,100]" + tag);
      if (v.s_start > v.s_des) fail("vehicles.s_des", "must be >= s_start" + tag);
      if (!(v.d_max > 0.0)) fail("vehicles.d_max", "must be > 0" + tag);
      if (!(v.beta > 0.0)) fail("vehicles.beta", "must be > 0" + tag);
    }
  }
  if (s.objective.a_g.size() != m) fail("objective.A_G", "length must equal station count");
  for (double a : s.objective.a_g)
    if (!(a > 0.0)) fail("objective.A_G", "diagonal entries must be > 0");
  if (s.objective.b_g.size() != m) fail("objective.b_G", "length must equal station count");
  if (s.objective.target) {
    if (s.objective.target->size() != m) fail("objective.target", "length must equal station count");
    for (std::size_t j = 0; j < m; ++j) {
      if (s.objective.b_g[j] != -s.objective.a_g[j] * (*s.objective.target)[j])
        fail("objective.b_G", "must equal -A_G*target when target is present");
    }
  }
  if (s.q.size() != m) fail("Q", "length must equal station count");
  for (double v : s.q)
    if (!(v > 0.0)) fail("Q", "diagonal entries must be > 0");
  if (s.p_occupied.size() != m) fail("P", "length must equal station count");
  for (double v : s.p_occupied)
    if (!(v >= 0.0 && v <= 1.0)) fail("P", "entries must be in [0,1]");
  if (s.e_pro.size() != m) fail("e_pro", "length must equal station count");
  if (!(s.region_side > 0.0)) fail("region_side", "must be > 0");
}

// ---------------------------------------------------------------- generation

struct GenerationConfig {
  struct Range {
    double lo = 0.0, hi = 0.0;
  };

  std::vector<int> fleet_sizes;  // N_i per company
  std::vector<int> capacities;   // M_j per station
  // Side of the square region. 60 leaves a meaningful share of
  // vehicle-station pairs out of range without making stranded vehicles (a
  // degenerate fleet) the common case.
  double region_side = 60.0;

  Range s_start{20.0, 40.0};
  Range s_des{80.0, 100.0};
  Range d_max{150.0, 200.0};
  Range e_pro{100.0, 350.0};
  std::optional<Vec> fixed_e_pro;  // pins e_pro instead of drawing it

  Vec q;                    // diagonal of Q
  std::optional<Vec> a_g;   // diagonal of A_G; defaults to 2*Q
  Vec target;               // desired vehicle counts per station
  Vec p_occupied;
  double u = 1.0;
  double beta = 1.0;
};

inline void validate(const GenerationConfig& cfg) {
  auto bad = [](const std::string& what) { throw ConfigError("generation config: " + what); };
  if (cfg.fleet_sizes.empty()) bad("no companies");
  for (int n : cfg.fleet_sizes)
    if (n <= 0) bad("fleet sizes must be positive");
  if (cfg.capacities.empty()) bad("no stations");
  for (int c : cfg.capacities)
    if (c <= 0) bad("station capacities must be positive");
  if (!(cfg.region_side > 0.0)) bad("region side must be positive");
  for (const auto* r : {&cfg.s_start, &cfg.s_des, &cfg.d_max, &cfg.e_pro})
    if (r->lo > r->hi) bad("distribution bounds inverted (lo > hi)");
  const std::size_t m = cfg.capacities.size();
  if (cfg.q.size() != m) bad("Q length must equal station count");
  if (cfg.target.size() != m) bad("target length must equal station count");
  if (cfg.p_occupied.size() != m) bad("P length must equal station count");
  if (cfg.fixed_e_pro && cfg.fixed_e_pro->size() != m) bad("fixed e_pro length must equal station count");
  if (cfg.a_g && cfg.a_g->size() != m) bad("A_G length must equal station count");
}

/// Draw order is fixed (stations, then vehicles company by company, then
/// e_pro) so that a seed pins the scenario byte for byte.
inline Scenario generate_scenario(const GenerationConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  Rng rng(seed);
  Scenario s;
  s.region_side = cfg.region_side;

  const std::size_t m = cfg.capacities.size();
  s.stations.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    Station st;
    st.id = static_cast<int>(j) + 1;
    st.x = rng.uniform(0.0, cfg.region_side);
    st.y = rng.uniform(0.0, cfg.region_side);
    st.capacity = cfg.capacities[j];
    s.stations.push_back(st);
  }

  int next_vehicle_id = 1;
  s.companies.reserve(cfg.fleet_sizes.size());
  for (std::size_t i = 0; i < cfg.fleet_sizes.size(); ++i) {
    Company c;
    c.id = static_cast<int>(i) + 1;
    c.u = cfg.u;
    c.vehicles.reserve(cfg.fleet_sizes[i]);
    for (int l = 0; l < cfg.fleet_sizes[i]; ++l) {
      Vehicle v;
      v.id = next_vehicle_id++;
      v.x = rng.uniform(0.0, cfg.region_side);
      v.y = rng.uniform(0.0, cfg.region_side);
      v.s_start = rng.uniform(cfg.s_start.lo, cfg.s_start.hi);
      v.s_des = rng.uniform(cfg.s_des.lo, cfg.s_des.hi);
      v.d_max = rng.uniform(cfg.d_max.lo, cfg.d_max.hi);
      v.beta = cfg.beta;
      c.vehicles.push_back(v);
    }
    s.companies.push_back(std::move(c));
  }

  if (cfg.fixed_e_pro) {
    s.e_pro = *cfg.fixed_e_pro;
  } else {
    s.e_pro.resize(m);
    for (std::size_t j = 0; j < m; ++j) s.e_pro[j] = rng.uniform(cfg.e_pro.lo, cfg.e_pro.hi);
  }

  s.q = cfg.q;
  s.p_occupied = cfg.p_occupied;
  s.objective.a_g = cfg.a_g ? *cfg.a_g : scaled(cfg.q, 2.0);
  s.objective.target = cfg.target;
  s.objective.b_g.resize(m);
  for (std::size_t j = 0; j < m; ++j) s.objective.b_g[j] = -s.objective.a_g[j] * cfg.target[j];

  validate(s);
  return s;
}

}  // namespace fleetcharge
