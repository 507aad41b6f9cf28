#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "fleetcharge/feasibility.hpp"

namespace fleetcharge {

namespace detail {

// Inequality rows of K-bar in normalized form a'z <= b:
//   nonnegativity  -z_j <= 0          (sign -1, singleton mask)
//   subset rows     sum_{j in S} z_j <= c_S / N_i   (sign +1)
// Subset rows with b >= 1 can never bind on the simplex and are dropped.
struct ProjRow {
  std::uint32_t mask = 0;
  double sign = 1.0;
  double rhs = 0.0;
};

inline double row_dot(const ProjRow& r, const Vec& v) {
  double s = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j)
    if (r.mask & (1u << j)) s += v[j];
  return r.sign * s;
}

inline std::vector<ProjRow> projection_rows(const FeasibleSet& k) {
  std::vector<ProjRow> rows;
  const double n = static_cast<double>(k.fleet_size);
  for (std::size_t j = 0; j < k.station_count; ++j) rows.push_back({1u << j, -1.0, 0.0});
  for (const auto& sc : k.constraints) {
    const double rhs = sc.bound / n;
    if (rhs < 1.0) rows.push_back({sc.mask, 1.0, rhs});
  }
  return rows;
}

}  // namespace detail

/// Euclidean projection onto K-bar by a primal active-set QP.
///
/// Each subproblem projects y onto the affine set {1'z = 1} with the working
/// set held at equality; the KKT system (E E') mu = E y - e is tiny (at most
/// m+1 rows). Blocking rows are linearly independent of the working set by
/// construction, so the system stays nonsingular. `start` must lie in K-bar
/// (loosely); warm starts from a previous iterate make solver-loop calls
/// nearly free.
inline Vec project(const Vec& y, const FeasibleSet& k, const Vec& start) {
  const std::size_t m = k.station_count;
  if (y.size() != m || start.size() != m) throw std::invalid_argument("project: dimension mismatch");
  const auto rows = detail::projection_rows(k);

  Vec x = start;
  std::vector<std::size_t> working;  // indices into rows
  std::vector<char> in_working(rows.size(), 0);

  const int max_steps = 200 * static_cast<int>(rows.size() + m + 2);
  for (int step = 0; step < max_steps; ++step) {
    // Solve: min 1/2 |z - y|^2  s.t. 1'z = 1, rows[w] at equality.
    const std::size_t nw = working.size();
    Matrix gram(nw + 1, nw + 1);
    Vec rhs(nw + 1, 0.0);
    // row 0 is the simplex equality (all-ones)
    gram(0, 0) = static_cast<double>(m);
    rhs[0] = sum(y) - 1.0;
    for (std::size_t a = 0; a < nw; ++a) {
      const auto& ra = rows[working[a]];
      const double pop = static_cast<double>(std::popcount(ra.mask));
      gram(0, a + 1) = gram(a + 1, 0) = ra.sign * pop;
      gram(a + 1, a + 1) = pop;
      for (std::size_t b = a + 1; b < nw; ++b) {
        const auto& rb = rows[working[b]];
        const double common = static_cast<double>(std::popcount(ra.mask & rb.mask));
        gram(a + 1, b + 1) = gram(b + 1, a + 1) = ra.sign * rb.sign * common;
      }
      rhs[a + 1] = detail::row_dot(ra, y) - ra.rhs;
    }
    const Vec mu = detail::solve_linear(std::move(gram), std::move(rhs));

    Vec z = y;
    for (std::size_t j = 0; j < m; ++j) z[j] -= mu[0];
    for (std::size_t a = 0; a < nw; ++a) {
      const auto& ra = rows[working[a]];
      for (std::size_t j = 0; j < m; ++j)
        if (ra.mask & (1u << j)) z[j] -= mu[a + 1] * ra.sign;
    }

    if (inf_dist(z, x) <= 1e-13) {
      // stationary on the working face; check multiplier signs
      std::size_t drop = nw;
      double most_negative = -1e-11;
      for (std::size_t a = 0; a < nw; ++a) {
        if (mu[a + 1] < most_negative) {
          most_negative = mu[a + 1];
          drop = a;
        }
      }
      if (drop == nw) return z;
      in_working[working[drop]] = 0;
      working.erase(working.begin() + static_cast<std::ptrdiff_t>(drop));
      continue;
    }

    // move x toward z, stopping at the first blocking row
    Vec d = sub(z, x);
    double alpha = 1.0;
    std::size_t blocker = rows.size();
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (in_working[r]) continue;
      const double ad = detail::row_dot(rows[r], d);
      if (ad > 1e-13) {
        const double slack = rows[r].rhs - detail::row_dot(rows[r], x);
        const double a = std::max(0.0, slack) / ad;
        if (a < alpha) {
          alpha = a;
          blocker = r;
        }
      }
    }
    x = axpy(std::move(x), alpha, d);
    if (blocker < rows.size()) {
      in_working[blocker] = 1;
      working.push_back(blocker);
    }
  }
  throw NumericError("project: active-set iteration did not terminate");
}

/// Cold-start overload; uses the stored feasible witness.
inline Vec project(const Vec& y, const FeasibleSet& k) {
  if (is_empty(k)) throw InfeasibleError("project: empty feasible set");
  return project(y, k, *k.witness);
}

}  // namespace fleetcharge
