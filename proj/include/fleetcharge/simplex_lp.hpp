#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "fleetcharge/common.hpp"

namespace fleetcharge::detail {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Vec x;
  double value = 0.0;
};

/// maximize c'x  s.t.  A_le x <= b_le, A_eq x = b_eq, x >= 0.
///
/// Dense two-phase tableau simplex with Bland's rule. Sized for the feasible
/// sets of this library (at most 2^m - 1 rows with m <= 12); not a general
/// purpose LP code.
class SimplexLp {
 public:
  explicit SimplexLp(std::size_t num_vars) : n_(num_vars) {}

  void add_less_equal(Vec row, double rhs) { le_.emplace_back(std::move(row), rhs); }
  void add_equal(Vec row, double rhs) { eq_.emplace_back(std::move(row), rhs); }

  LpSolution maximize(const Vec& objective) const {
    if (objective.size() != n_) throw std::invalid_argument("lp objective size mismatch");
    Tableau t = build(objective);
    if (!phase1(t)) return {LpStatus::infeasible, {}, 0.0};
    return phase2(t, objective);
  }

  /// Feasibility only; returns a witness when one exists.
  LpSolution find_feasible() const {
    Tableau t = build(Vec(n_, 0.0));
    if (!phase1(t)) return {LpStatus::infeasible, {}, 0.0};
    return {LpStatus::optimal, extract(t), 0.0};
  }

 private:
  static constexpr double kPivotTol = 1e-11;
  static constexpr double kFeasTol = 1e-9;

  struct Tableau {
    std::size_t n = 0;           // structural vars
    std::size_t total = 0;       // structural + slack + artificial
    std::size_t first_art = 0;   // index of first artificial column
    std::vector<Vec> rows;       // each length total, rhs kept separately
    Vec rhs;
    std::vector<std::size_t> basis;  // basic column per row
  };

  std::size_t n_;
  std::vector<std::pair<Vec, double>> le_;
  std::vector<std::pair<Vec, double>> eq_;

  Tableau build(const Vec&) const {
    Tableau t;
    const std::size_t rows = le_.size() + eq_.size();
    t.n = n_;
    const std::size_t slacks = le_.size();
    // artificials: every equality row, plus <= rows whose rhs is negative
    // (negating those turns the slack coefficient to -1).
    std::size_t arts = eq_.size();
    for (const auto& [row, b] : le_)
      if (b < 0.0) ++arts;
    t.first_art = n_ + slacks;
    t.total = n_ + slacks + arts;
    t.rows.assign(rows, Vec(t.total, 0.0));
    t.rhs.assign(rows, 0.0);
    t.basis.assign(rows, 0);

    std::size_t r = 0, art = t.first_art;
    for (std::size_t k = 0; k < le_.size(); ++k, ++r) {
      const double sgn = le_[k].second < 0.0 ? -1.0 : 1.0;
      for (std::size_t c = 0; c < n_; ++c) t.rows[r][c] = sgn * le_[k].first[c];
      t.rhs[r] = sgn * le_[k].second;
      t.rows[r][n_ + k] = sgn;  // slack
      if (sgn < 0.0) {
        t.rows[r][art] = 1.0;
        t.basis[r] = art++;
      } else {
        t.basis[r] = n_ + k;
      }
    }
    for (std::size_t k = 0; k < eq_.size(); ++k, ++r) {
      const double sgn = eq_[k].second < 0.0 ? -1.0 : 1.0;
      for (std::size_t c = 0; c < n_; ++c) t.rows[r][c] = sgn * eq_[k].first[c];
      t.rhs[r] = sgn * eq_[k].second;
      t.rows[r][art] = 1.0;
      t.basis[r] = art++;
    }
    return t;
  }

  static void pivot(Tableau& t, std::size_t pr, std::size_t pc) {
    Vec& prow = t.rows[pr];
    const double d = prow[pc];
    for (double& v : prow) v /= d;
    t.rhs[pr] /= d;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      if (r == pr) continue;
      const double f = t.rows[r][pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < t.total; ++c) t.rows[r][c] -= f * prow[c];
      t.rows[r][pc] = 0.0;
      t.rhs[r] -= f * t.rhs[pr];
      if (t.rhs[r] < 0.0 && t.rhs[r] > -1e-12) t.rhs[r] = 0.0;
    }
    t.basis[pr] = pc;
  }

  /// Runs simplex on the tableau for reduced costs computed from `cost`
  /// (a cost per column, minimization). Bland's rule. Columns >= col_limit
  /// may not enter the basis. Returns false if unbounded.
  static bool run(Tableau& t, const Vec& cost, std::size_t col_limit) {
    for (;;) {
      // reduced cost per column: cost[c] - sum_r cost[basis[r]] * rows[r][c]
      std::size_t enter = t.total;
      for (std::size_t c = 0; c < col_limit; ++c) {
        double rc = cost[c];
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
          const double a = t.rows[r][c];
          if (a != 0.0) rc -= cost[t.basis[r]] * a;
        }
        if (rc < -kPivotTol) {
          enter = c;  // Bland: smallest index wins
          break;
        }
      }
      if (enter == t.total) return true;  // optimal
      std::size_t leave = t.rows.size();
      double best = 0.0;
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double a = t.rows[r][enter];
        if (a > kPivotTol) {
          const double ratio = t.rhs[r] / a;
          if (leave == t.rows.size() || ratio < best - 1e-15 ||
              (ratio < best + 1e-15 && t.basis[r] < t.basis[leave])) {
            best = ratio;
            leave = r;
          }
        }
      }
      if (leave == t.rows.size()) return false;  // unbounded
      pivot(t, leave, enter);
    }
  }

  bool phase1(Tableau& t) const {
    if (t.first_art == t.total) return true;  // no artificials needed
    Vec cost(t.total, 0.0);
    for (std::size_t c = t.first_art; c < t.total; ++c) cost[c] = 1.0;
    run(t, cost, t.total);  // bounded by construction (artificials >= 0)
    double art_sum = 0.0;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
      if (t.basis[r] >= t.first_art) art_sum += t.rhs[r];
    if (art_sum > kFeasTol) return false;
    // drive leftover (value ~0) artificials out of the basis where possible
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      if (t.basis[r] < t.first_art) continue;
      std::size_t pc = t.first_art;
      for (std::size_t c = 0; c < t.first_art; ++c) {
        if (std::abs(t.rows[r][c]) > 1e-9) {
          pc = c;
          break;
        }
      }
      if (pc < t.first_art) pivot(t, r, pc);
      // else: redundant row, keep the artificial pinned at zero
    }
    return true;
  }

  LpSolution phase2(Tableau& t, const Vec& objective) const {
    Vec cost(t.total, 0.0);
    for (std::size_t c = 0; c < n_; ++c) cost[c] = -objective[c];  // maximize
    if (!run(t, cost, t.first_art)) return {LpStatus::unbounded, {}, 0.0};
    Vec x = extract(t);
    return {LpStatus::optimal, x, dot(objective, x)};
  }

  static Vec extract(const Tableau& t) {
    Vec x(t.n, 0.0);
    for (std::size_t r = 0; r < t.rows.size(); ++r)
      if (t.basis[r] < t.n) x[t.basis[r]] = std::max(0.0, t.rhs[r]);
    return x;
  }
};

}  // namespace fleetcharge::detail
