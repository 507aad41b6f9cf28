#pragma once

#include <vector>

#include "fleetcharge/feasibility.hpp"
#include "fleetcharge/scenario.hpp"

namespace fleetcharge {

/// Pseudo-inverse of a diagonal matrix given by its diagonal: 1/a where a is
/// nonzero, 0 otherwise.
inline Vec pseudo_inverse_diag(const Vec& diag) {
  Vec out(diag.size(), 0.0);
  for (std::size_t i = 0; i < diag.size(); ++i)
    if (diag[i] != 0.0) out[i] = 1.0 / diag[i];
  return out;
}

/// Dense overload; rejects matrices with off-diagonal entries.
inline Vec pseudo_inverse_diag(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("pseudo_inverse_diag: matrix not square");
  Vec diag(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (r != c && a(r, c) != 0.0)
        throw std::invalid_argument("pseudo_inverse_diag: matrix not diagonal");
    diag[r] = a(r, r);
  }
  return pseudo_inverse_diag(diag);
}

/// The general quadratic form of the government cost, target or not. This is
/// the exact potential of the priced game.
inline double government_cost_quadratic(const Vec& sigma, const GovernmentObjective& obj) {
  if (sigma.size() != obj.a_g.size()) throw std::invalid_argument("government_cost: dimension mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < sigma.size(); ++j)
    s += 0.5 * obj.a_g[j] * sigma[j] * sigma[j] + obj.b_g[j] * sigma[j];
  return s;
}

/// Government cost. With a target: the tracking form
/// 1/2 |sigma - target|^2_{A_G}; otherwise the general quadratic
/// 1/2 sigma'A_G sigma + b_G' sigma. The two differ by the constant
/// 1/2 target'A_G target (see government_cost_offset).
inline double government_cost(const Vec& sigma, const GovernmentObjective& obj) {
  if (sigma.size() != obj.a_g.size()) throw std::invalid_argument("government_cost: dimension mismatch");
  if (obj.target) {
    double s = 0.0;
    for (std::size_t j = 0; j < sigma.size(); ++j) {
      const double d = sigma[j] - (*obj.target)[j];
      s += obj.a_g[j] * d * d;
    }
    return 0.5 * s;
  }
  return government_cost_quadratic(sigma, obj);
}

/// Constant by which the tracking form exceeds the quadratic form.
inline double government_cost_offset(const GovernmentObjective& obj) {
  if (!obj.target) return 0.0;
  double s = 0.0;
  for (std::size_t j = 0; j < obj.a_g.size(); ++j) s += obj.a_g[j] * (*obj.target)[j] * (*obj.target)[j];
  return 0.5 * s;
}

/// Per-company cost coefficients. All matrices are diagonal and stored as
/// their diagonals. In the reference setup A_i = 2 N_i^2 Q, B_i = N_i Q,
/// c_i = -N_i Q M, D_i = N_i R_i and f_i = N_i (e_arr - e_pro).
struct CompanyCostParams {
  int company_id = 0;
  double fleet_size = 0.0;
  Vec a_i, b_i, d_i;
  Vec c_i, f_i;
  Vec r_i;    // average charging demand per vehicle, 0 at unreachable stations
  Vec e_arr;  // average idle-travel cost, 0 at unreachable stations
};

/// J_1: 1/2 x'A_i x + x'B_i sigma_others + c_i'x.
inline double queuing_cost(const Vec& x, const Vec& sigma_others, const CompanyCostParams& p) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    s += 0.5 * p.a_i[j] * x[j] * x[j] + p.b_i[j] * x[j] * sigma_others[j] + p.c_i[j] * x[j];
  return s;
}

/// The expected-queuing form N_i x'Q(sigma - M); equals queuing_cost when
/// A_i = 2 N_i^2 Q, B_i = N_i Q, c_i = -N_i Q M. Kept as a second route for
/// tests.
inline double queuing_cost_direct(const Vec& x, const Vec& sigma_total, const Vec& q, const Vec& capacities,
                                  double fleet_size) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += x[j] * q[j] * (sigma_total[j] - capacities[j]);
  return fleet_size * s;
}

/// J_2: x'D_i p.
inline double charging_cost(const Vec& x, const Vec& price, const Vec& d_i) {
  if (x.size() != price.size() || x.size() != d_i.size())
    throw std::invalid_argument("charging_cost: dimension mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += x[j] * d_i[j] * price[j];
  return s;
}

/// J_3: f_i'x.
inline double revenue_cost(const Vec& x, const Vec& f_i) {
  if (x.size() != f_i.size()) throw std::invalid_argument("revenue_cost: dimension mismatch");
  return dot(f_i, x);
}

/// Builds the reference cost parameters from scenario data: R_i and e_arr as
/// per-station averages over the reachable fleet (zero where no vehicle can
/// reach), and the queuing coefficients from Q and the capacities.
inline std::vector<CompanyCostParams> build_example_params(const Scenario& s,
                                                           const std::vector<FeasibilitySets>& fsets) {
  const std::size_t m = s.station_count();
  const Vec caps = s.capacities();
  std::vector<CompanyCostParams> out;
  out.reserve(s.companies.size());
  for (std::size_t i = 0; i < s.companies.size(); ++i) {
    const Company& c = s.companies[i];
    const FeasibilitySets& fs = fsets[i];
    CompanyCostParams p;
    p.company_id = c.id;
    p.fleet_size = static_cast<double>(c.fleet_size());
    p.r_i.assign(m, 0.0);
    p.e_arr.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      double demand = 0.0, dist = 0.0;
      std::size_t cnt = 0;
      for (std::size_t v = 0; v < c.vehicles.size(); ++v) {
        if (!(fs.reach_masks[v] & (1u << j))) continue;
        demand += charging_demand(c.vehicles[v], s.stations[j]);
        dist += distance(c.vehicles[v], s.stations[j]);
        ++cnt;
      }
      if (cnt > 0) {
        p.r_i[j] = demand / static_cast<double>(cnt);
        p.e_arr[j] = c.u * s.p_occupied[j] * (dist / static_cast<double>(cnt));
      }
    }
    const double n = p.fleet_size;
    p.a_i.resize(m);
    p.b_i.resize(m);
    p.c_i.resize(m);
    p.d_i.resize(m);
    p.f_i.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      p.a_i[j] = 2.0 * n * n * s.q[j];
      p.b_i[j] = n * s.q[j];
      p.c_i[j] = -n * s.q[j] * caps[j];
      p.d_i[j] = n * p.r_i[j];
      p.f_i[j] = n * (p.e_arr[j] - s.e_pro[j]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

/// Coefficients of the announced pricing map
/// p_i(x) = D_i^* [ 1/2 Abar_i x_i + Bbar_i sigma_others + Delta_i ].
struct PolicyCoefficients {
  Vec abar;   // N_i^2 A_G - A_i
  Vec bbar;   // N_i A_G - B_i
  Vec delta;  // N_i b_G - c_i - f_i
  Vec dstar;  // pseudo-inverse of D_i
};

inline PolicyCoefficients synthesize_policy(const CompanyCostParams& p, const GovernmentObjective& obj) {
  const std::size_t m = p.a_i.size();
  const double n = p.fleet_size;
  PolicyCoefficients pc;
  pc.abar.resize(m);
  pc.bbar.resize(m);
  pc.delta.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    pc.abar[j] = n * n * obj.a_g[j] - p.a_i[j];
    pc.bbar[j] = n * obj.a_g[j] - p.b_i[j];
    pc.delta[j] = n * obj.b_g[j] - p.c_i[j] - p.f_i[j];
  }
  pc.dstar = pseudo_inverse_diag(p.d_i);
  return pc;
}

/// Price vector announced to a company for a given joint decision. Stations
/// with zero demand weight get price zero through the pseudo-inverse.
inline Vec evaluate_policy(const PolicyCoefficients& pc, const Vec& x, const Vec& sigma_others) {
  if (x.size() != pc.abar.size() || sigma_others.size() != pc.abar.size())
    throw std::invalid_argument("evaluate_policy: dimension mismatch");
  Vec price(x.size());
  for (std::size_t j = 0; j < x.size(); ++j)
    price[j] = pc.dstar[j] * (0.5 * pc.abar[j] * x[j] + pc.bbar[j] * sigma_others[j] + pc.delta[j]);
  return price;
}

/// Full company cost J_1 + J_2 + J_3 under the announced policy. For members
/// of K-bar this collapses to the reduced form
/// 1/2 x'N^2 A_G x + x'N(A_G sigma_others + b_G).
inline double company_cost(const Vec& x, const Vec& sigma_others, const CompanyCostParams& p,
                           const PolicyCoefficients& pc) {
  return queuing_cost(x, sigma_others, p) + charging_cost(x, evaluate_policy(pc, x, sigma_others), p.d_i) +
         revenue_cost(x, p.f_i);
}

/// The reduced form from the pricing cancellation; used as the second route
/// in tests and by the Nash-gap probes.
inline double reduced_company_cost(const Vec& x, const Vec& sigma_others, double fleet_size,
                                   const GovernmentObjective& obj) {
  double s = 0.0;
  const double n = fleet_size;
  for (std::size_t j = 0; j < x.size(); ++j)
    s += 0.5 * n * n * obj.a_g[j] * x[j] * x[j] + n * x[j] * (obj.a_g[j] * sigma_others[j] + obj.b_g[j]);
  return s;
}

/// Affine game map F(x) = F1 x + F2 of the priced game, where x stacks the
/// company vectors. F1 has blocks N_i N_j A_G and equals A'A_G A for the
/// stacking matrix A = [N_1 I ... N_C I]; F2 stacks N_i b_G.
struct GameMap {
  Matrix f1;      // (m*C) x (m*C), symmetric PSD
  Vec f2;         // m*C
  Matrix a_stack; // m x (m*C), sigma(x) = A x
  Vec a_g, b_g;
  std::vector<double> fleet_sizes;
  std::size_t m = 0;

  std::size_t company_count() const { return fleet_sizes.size(); }

  Vec sigma(const std::vector<Vec>& x) const {
    Vec s(m, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < m; ++j) s[j] += fleet_sizes[i] * x[i][j];
    return s;
  }

  /// Gradient of company i's reduced cost at aggregate sigma:
  /// N_i (A_G sigma + b_G). This is block i of F1 x + F2.
  Vec gradient_block(std::size_t i, const Vec& sigma_total) const {
    Vec g(m);
    for (std::size_t j = 0; j < m; ++j) g[j] = fleet_sizes[i] * (a_g[j] * sigma_total[j] + b_g[j]);
    return g;
  }

  /// Dense route F1 x + F2 over the stacked vector; analysis and tests.
  Vec apply(const Vec& stacked) const { return add(mul(f1, stacked), f2); }
};

inline GameMap build_game_map(const std::vector<CompanyCostParams>& params, const GovernmentObjective& obj) {
  GameMap gm;
  gm.m = obj.a_g.size();
  gm.a_g = obj.a_g;
  gm.b_g = obj.b_g;
  gm.fleet_sizes.reserve(params.size());
  for (const auto& p : params) gm.fleet_sizes.push_back(p.fleet_size);

  const std::size_t c = params.size();
  const std::size_t dim = gm.m * c;
  gm.a_stack = Matrix(gm.m, dim);
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t j = 0; j < gm.m; ++j) gm.a_stack(j, i * gm.m + j) = gm.fleet_sizes[i];

  gm.f1 = Matrix(dim, dim);
  gm.f2.assign(dim, 0.0);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < gm.m; ++j) gm.f2[i * gm.m + j] = gm.fleet_sizes[i] * obj.b_g[j];
    for (std::size_t i2 = 0; i2 < c; ++i2) {
      const double w = gm.fleet_sizes[i] * gm.fleet_sizes[i2];
      for (std::size_t j = 0; j < gm.m; ++j) gm.f1(i * gm.m + j, i2 * gm.m + j) = w * obj.a_g[j];
    }
  }
  return gm;
}

}  // namespace fleetcharge
