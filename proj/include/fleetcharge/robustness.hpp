#pragma once

#include <cstdint>
#include <vector>

#include "fleetcharge/solver.hpp"

namespace fleetcharge {

struct RobustnessConfig {
  std::vector<double> alphas{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  int samples_per_alpha = 100;
  std::uint64_t seed = 1;
  bool perturb_e_arr = false;  // off by default; the reference sweep perturbs only R_i
};

struct RobustnessRow {
  double alpha = 0.0;
  double mean_jg = 0.0;
  double min_jg = 0.0;
  double max_jg = 0.0;
};

namespace detail {

/// The game induced by announcing policies synthesized from *estimated*
/// parameters while companies still pay their true costs. Gradients:
///   grad_i = (A_i + E_i Abar_i) x_i + (B_i + E_i Bbar_i) sigma_others
///            + (c_i + f_i + E_i Delta_i),      E_i = D_i * Dbar_i^*.
/// With exact estimates E_i is the identity on reachable stations and the
/// map coincides with the system-optimal one wherever allocations can be
/// nonzero.
struct AnnouncedGame {
  std::vector<Vec> quad;   // diagonal of A_i + E_i Abar_i
  std::vector<Vec> cross;  // diagonal of B_i + E_i Bbar_i
  std::vector<Vec> consts; // c_i + f_i + E_i Delta_i
  std::vector<double> fleet_sizes;
  std::size_t m = 0;

  Vec gradient_block(std::size_t i, const Vec& x, const Vec& sigma_others) const {
    Vec g(m);
    for (std::size_t j = 0; j < m; ++j)
      g[j] = quad[i][j] * x[j] + cross[i][j] * sigma_others[j] + consts[i][j];
    return g;
  }

  /// Dense stacked linear part; used only for the step-size bound.
  Matrix f1() const {
    const std::size_t c = fleet_sizes.size();
    Matrix f(m * c, m * c);
    for (std::size_t i = 0; i < c; ++i)
      for (std::size_t i2 = 0; i2 < c; ++i2)
        for (std::size_t j = 0; j < m; ++j)
          f(i * m + j, i2 * m + j) = (i == i2) ? quad[i][j] : cross[i][j] * fleet_sizes[i2];
    return f;
  }
};

inline AnnouncedGame build_announced_game(const std::vector<CompanyCostParams>& truth,
                                          const std::vector<PolicyCoefficients>& announced) {
  AnnouncedGame g;
  g.m = truth.front().a_i.size();
  const std::size_t c = truth.size();
  g.quad.resize(c);
  g.cross.resize(c);
  g.consts.resize(c);
  g.fleet_sizes.resize(c);
  for (std::size_t i = 0; i < c; ++i) {
    g.fleet_sizes[i] = truth[i].fleet_size;
    g.quad[i].resize(g.m);
    g.cross[i].resize(g.m);
    g.consts[i].resize(g.m);
    for (std::size_t j = 0; j < g.m; ++j) {
      const double e = truth[i].d_i[j] * announced[i].dstar[j];
      g.quad[i][j] = truth[i].a_i[j] + e * announced[i].abar[j];
      g.cross[i][j] = truth[i].b_i[j] + e * announced[i].bbar[j];
      g.consts[i][j] = truth[i].c_i[j] + truth[i].f_i[j] + e * announced[i].delta[j];
    }
  }
  return g;
}

/// Largest eigenvalue of a general symmetric matrix via a Gershgorin shift
/// (power iteration needs a PSD operand).
inline double largest_eigenvalue_symmetric(const Matrix& s) {
  double shift = 0.0;
  for (std::size_t r = 0; r < s.rows(); ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < s.cols(); ++c) row += std::abs(s(r, c));
    shift = std::max(shift, row);
  }
  if (shift == 0.0) return 0.0;
  Matrix t = s;
  for (std::size_t r = 0; r < t.rows(); ++r) t(r, r) += shift;
  return largest_eigenvalue(t) - shift;
}

/// Krasnoselskij iteration on the announced game; same initialization and
/// stopping rules as the equilibrium solver. Returns the true government
/// tracking loss at the final point.
inline double solve_announced(const GameInstance& inst, const AnnouncedGame& ag, const SolverConfig& cfg) {
  const std::size_t c = ag.fleet_sizes.size();
  const std::size_t m = ag.m;
  Matrix f1 = ag.f1();
  Matrix sym(f1.rows(), f1.cols());
  for (std::size_t r = 0; r < f1.rows(); ++r)
    for (std::size_t cc = 0; cc < f1.cols(); ++cc) sym(r, cc) = 0.5 * (f1(r, cc) + f1(cc, r));
  const double lambda = largest_eigenvalue_symmetric(sym);
  if (!(lambda > 0.0)) throw NumericError("announced game: degenerate map");
  const double gamma = cfg.gamma ? *cfg.gamma : cfg.safety * 2.0 / lambda;

  std::vector<Vec> x(c);
  for (std::size_t i = 0; i < c; ++i)
    x[i] = project(Vec(m, 1.0 / static_cast<double>(m)), inst.constraint_sets[i]);

  const bool use_tol = std::isfinite(cfg.tol);
  for (int k = 0; k < cfg.max_iters; ++k) {
    Vec sig(m, 0.0);
    for (std::size_t i = 0; i < c; ++i)
      for (std::size_t j = 0; j < m; ++j) sig[j] += ag.fleet_sizes[i] * x[i][j];
    std::vector<Vec> next(c);
    double change = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      Vec sigma_others = sig;
      for (std::size_t j = 0; j < m; ++j) sigma_others[j] -= ag.fleet_sizes[i] * x[i][j];
      const Vec g = ag.gradient_block(i, x[i], sigma_others);
      const Vec z = project(axpy(x[i], -gamma, g), inst.constraint_sets[i], x[i]);
      Vec xi(m);
      for (std::size_t j = 0; j < m; ++j) xi[j] = 0.5 * (x[i][j] + z[j]);
      change = std::max(change, inf_dist(xi, x[i]));
      next[i] = std::move(xi);
    }
    x = std::move(next);
    if (use_tol && change < cfg.tol) break;
  }

  Vec sig(m, 0.0);
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t j = 0; j < m; ++j) sig[j] += ag.fleet_sizes[i] * x[i][j];
  return government_cost(sig, inst.objective);
}

}  // namespace detail

/// For each alpha: perturb every reachable diagonal entry of each company's
/// R_i with independent Gaussian noise of deviation alpha*R_min/5 (R_min the
/// smallest nonzero entry of that R_i), floor at 1e-6, synthesize policies
/// from the estimate, solve the resulting game and record the true tracking
/// loss. alpha = 0 reproduces the unperturbed equilibrium exactly.
inline std::vector<RobustnessRow> robustness_sweep(const Scenario& s, const RobustnessConfig& rc,
                                                   const SolverConfig& solver_cfg = {}) {
  if (rc.samples_per_alpha < 1) throw ConfigError("robustness: samples_per_alpha must be >= 1");
  for (double a : rc.alphas)
    if (a < 0.0) throw ConfigError("robustness: alpha must be >= 0");

  const GameInstance inst = build_game_instance(s);
  const std::size_t m = s.station_count();

  std::vector<RobustnessRow> rows;
  rows.reserve(rc.alphas.size());
  for (std::size_t ai = 0; ai < rc.alphas.size(); ++ai) {
    const double alpha = rc.alphas[ai];
    RobustnessRow row;
    row.alpha = alpha;
    double total = 0.0;
    for (int sample = 0; sample < rc.samples_per_alpha; ++sample) {
      Rng rng(derive_seed(rc.seed, ai, static_cast<std::uint64_t>(sample)));

      std::vector<CompanyCostParams> estimated = inst.params;
      for (auto& p : estimated) {
        double r_min = 0.0;
        for (double r : p.r_i)
          if (r > 0.0 && (r_min == 0.0 || r < r_min)) r_min = r;
        const double dev = alpha * r_min / 5.0;
        for (std::size_t j = 0; j < m; ++j) {
          if (p.r_i[j] <= 0.0) continue;
          const double w = dev * rng.gauss();
          if (w == 0.0) continue;  // alpha = 0 stays bit-exact
          p.r_i[j] = std::max(p.r_i[j] + w, 1e-6);
          p.d_i[j] = p.fleet_size * p.r_i[j];
        }
        if (rc.perturb_e_arr) {
          double e_min = 0.0;
          for (double e : p.e_arr)
            if (e > 0.0 && (e_min == 0.0 || e < e_min)) e_min = e;
          const double edev = alpha * e_min / 5.0;
          for (std::size_t j = 0; j < m; ++j) {
            if (p.e_arr[j] <= 0.0) continue;
            const double w = edev * rng.gauss();
            if (w == 0.0) continue;
            p.e_arr[j] = std::max(p.e_arr[j] + w, 0.0);
            p.f_i[j] = p.fleet_size * (p.e_arr[j] - s.e_pro[j]);
          }
        }
      }

      std::vector<PolicyCoefficients> announced;
      announced.reserve(estimated.size());
      for (const auto& p : estimated) announced.push_back(synthesize_policy(p, s.objective));

      const double jg = detail::solve_announced(inst, detail::build_announced_game(inst.params, announced),
                                                solver_cfg);
      total += jg;
      if (sample == 0) {
        row.min_jg = row.max_jg = jg;
      } else {
        row.min_jg = std::min(row.min_jg, jg);
        row.max_jg = std::max(row.max_jg, jg);
      }
    }
    row.mean_jg = total / static_cast<double>(rc.samples_per_alpha);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fleetcharge
