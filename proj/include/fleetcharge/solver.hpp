#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fleetcharge/game.hpp"
#include "fleetcharge/projection.hpp"

namespace fleetcharge {

namespace detail {

/// Largest eigenvalue of a symmetric PSD matrix by power iteration with a
/// deterministic start vector; Rayleigh quotient to relative tolerance.
inline double largest_eigenvalue(const Matrix& s, double rel_tol = 1e-12, int max_iters = 500000) {
  const std::size_t n = s.rows();
  if (n == 0 || s.cols() != n) throw std::invalid_argument("largest_eigenvalue: not square");
  Vec v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + static_cast<double>(i) / static_cast<double>(n);
  double norm = two_norm(v);
  for (double& e : v) e /= norm;
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vec w = mul(s, v);
    const double next = dot(v, w);
    const double wn = two_norm(w);
    if (wn <= 0.0) return 0.0;  // start vector in the kernel of a PSD matrix: matrix is zero
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
    if (it > 0 && std::abs(next - lambda) <= rel_tol * std::max(std::abs(next), 1e-300)) return next;
    lambda = next;
  }
  return lambda;
}

}  // namespace detail

/// Step-size bound 2/lambda_max(F1); iterations must use gamma strictly below
/// it. Throws on a degenerate (zero) map.
inline double max_step_size(const Matrix& f1) {
  const double lambda = detail::largest_eigenvalue(f1);
  if (!(lambda > 0.0)) throw NumericError("max_step_size: degenerate game map (F1 = 0)");
  return 2.0 / lambda;
}

struct SolverConfig {
  std::optional<double> gamma;  // default: safety * 2/lambda_max(F1)
  int max_iters = 3000;
  double tol = 1e-9;            // sup-norm iterate change; non-finite disables the criterion
  bool record_trace = true;
  double safety = 0.99;
};

struct EquilibriumResult {
  std::vector<Vec> x;          // per-company allocation fractions
  Vec sigma;                   // aggregate vehicle counts per station
  std::vector<Vec> prices;     // announced prices at the final point
  std::vector<double> jg_trace;
  std::vector<Vec> sigma_trace;
  int iterations = 0;
  double vi_residual = 0.0;
  bool converged = false;

  // audit
  double gamma = 0.0;
  double lambda_max = 0.0;
  double jg_final = 0.0;
  double jg_offset = 0.0;  // tracking form minus quadratic form, constant
};

/// Coordinator -> company: the only cross-company information a company sees.
struct DownstreamMessage {
  int round = 0;
  int company_id = 0;
  Vec sigma_others;
};

/// Company -> coordinator: its weighted allocation N_i x_i, nothing else.
struct UpstreamMessage {
  int round = 0;
  int company_id = 0;
  Vec weighted_allocation;
};

struct MessageLog {
  std::vector<DownstreamMessage> downstream;
  std::vector<UpstreamMessage> upstream;
};

/// Everything derived from a scenario that the solver needs. Building it
/// performs the degeneracy checks: stranded vehicles or an empty K-bar are
/// rejected here.
struct GameInstance {
  std::vector<FeasibilitySets> fsets;
  std::vector<FeasibleSet> constraint_sets;
  std::vector<CompanyCostParams> params;
  std::vector<PolicyCoefficients> policies;
  GameMap map;
  GovernmentObjective objective;
};

inline GameInstance build_game_instance(const Scenario& s) {
  validate(s);
  GameInstance g;
  g.objective = s.objective;
  for (const auto& c : s.companies) {
    FeasibilitySets fs = feasibility_sets(c, s.stations);
    if (fs.degenerate())
      throw InfeasibleError("company " + std::to_string(c.id) + " is degenerate: vehicle " +
                            std::to_string(fs.stranded.front()) + " can reach no station");
    FeasibleSet k = build_constraint_set(fs);
    if (is_empty(k))
      throw InfeasibleError("company " + std::to_string(c.id) + " has an empty feasible set K-bar");
    g.fsets.push_back(std::move(fs));
    g.constraint_sets.push_back(std::move(k));
  }
  g.params = build_example_params(s, g.fsets);
  g.policies.reserve(g.params.size());
  for (const auto& p : g.params) g.policies.push_back(synthesize_policy(p, s.objective));
  g.map = build_game_map(g.params, s.objective);
  return g;
}

namespace detail {

/// Company-local half of one round: everything here depends only on the
/// company's own state plus the received sigma_others.
inline Vec company_update(const Vec& x, const Vec& sigma_others, double fleet, const GameMap& gm,
                          const FeasibleSet& k, double gamma) {
  const std::size_t m = x.size();
  Vec local = sigma_others;
  for (std::size_t j = 0; j < m; ++j) local[j] += fleet * x[j];
  Vec grad(m);
  for (std::size_t j = 0; j < m; ++j) grad[j] = fleet * (gm.a_g[j] * local[j] + gm.b_g[j]);
  const Vec z = project(axpy(x, -gamma, grad), k, x);
  Vec next(m);
  for (std::size_t j = 0; j < m; ++j) next[j] = 0.5 * (x[j] + z[j]);
  return next;
}

}  // namespace detail

/// One synchronized round of the averaged projected-gradient scheme
/// x_i <- 1/2 (x_i + Pi_K[x_i - gamma * grad_i]). All gradients are evaluated
/// at the incoming x (Jacobi update); each block uses only sigma_others plus
/// the company's own data.
inline std::vector<Vec> krasnoselskij_step(const std::vector<Vec>& x, const GameMap& gm,
                                           const std::vector<FeasibleSet>& ks, double gamma) {
  const std::size_t m = gm.m;
  const Vec sig = gm.sigma(x);
  std::vector<Vec> next(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Vec sigma_others = sig;
    for (std::size_t j = 0; j < m; ++j) sigma_others[j] -= gm.fleet_sizes[i] * x[i][j];
    next[i] = detail::company_update(x[i], sigma_others, gm.fleet_sizes[i], gm, ks[i], gamma);
  }
  return next;
}

namespace detail {

inline double resolve_gamma(const SolverConfig& cfg, double bound) {
  if (cfg.gamma) {
    if (!(*cfg.gamma > 0.0) || !(*cfg.gamma < bound))
      throw NumericError("gamma " + std::to_string(*cfg.gamma) + " outside (0, " + std::to_string(bound) +
                         "), the step-size bound 2/lambda_max(F1)");
    return *cfg.gamma;
  }
  return cfg.safety * bound;
}

inline EquilibriumResult iterate_equilibrium(const GameInstance& g, const SolverConfig& cfg, MessageLog* log) {
  if (cfg.max_iters < 1) throw ConfigError("max_iters must be >= 1");
  const std::size_t c = g.constraint_sets.size();
  const std::size_t m = g.map.m;

  EquilibriumResult res;
  res.lambda_max = detail::largest_eigenvalue(g.map.f1);
  if (!(res.lambda_max > 0.0)) throw NumericError("degenerate game map (F1 = 0)");
  res.gamma = resolve_gamma(cfg, 2.0 / res.lambda_max);
  res.jg_offset = government_cost_offset(g.objective);

  // x(0): projection of the uniform vector onto each K-bar
  std::vector<Vec> x(c);
  for (std::size_t i = 0; i < c; ++i)
    x[i] = project(Vec(m, 1.0 / static_cast<double>(m)), g.constraint_sets[i]);

  auto record = [&](const std::vector<Vec>& xs) {
    if (!cfg.record_trace) return;
    const Vec sig = g.map.sigma(xs);
    res.jg_trace.push_back(government_cost(sig, g.objective));
    res.sigma_trace.push_back(sig);
  };
  record(x);

  res.converged = false;
  res.iterations = 0;
  const bool use_tol = std::isfinite(cfg.tol);
  for (int k = 0; k < cfg.max_iters; ++k) {
    const Vec sig = g.map.sigma(x);
    std::vector<Vec> next(c);
    double change = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      Vec sigma_others = sig;
      for (std::size_t j = 0; j < m; ++j) sigma_others[j] -= g.map.fleet_sizes[i] * x[i][j];
      if (log) log->downstream.push_back({k, g.params[i].company_id, sigma_others});

      Vec xi = company_update(x[i], sigma_others, g.map.fleet_sizes[i], g.map, g.constraint_sets[i], res.gamma);
      change = std::max(change, inf_dist(xi, x[i]));

      if (log) {
        Vec up(m);
        for (std::size_t j = 0; j < m; ++j) up[j] = g.map.fleet_sizes[i] * xi[j];
        log->upstream.push_back({k, g.params[i].company_id, std::move(up)});
      }
      next[i] = std::move(xi);
    }
    x = std::move(next);
    res.iterations = k + 1;
    record(x);
    if (use_tol && change < cfg.tol) {
      res.converged = true;
      break;
    }
  }

  res.x = x;
  res.sigma = g.map.sigma(x);
  res.jg_final = government_cost(res.sigma, g.objective);
  res.prices.resize(c);
  double resid = 0.0;
  for (std::size_t i = 0; i < c; ++i) {
    Vec sigma_others = res.sigma;
    for (std::size_t j = 0; j < m; ++j) sigma_others[j] -= g.map.fleet_sizes[i] * x[i][j];
    res.prices[i] = evaluate_policy(g.policies[i], x[i], sigma_others);
    const Vec grad = g.map.gradient_block(i, res.sigma);
    const Vec z = project(axpy(x[i], -res.gamma, grad), g.constraint_sets[i], x[i]);
    resid = std::max(resid, inf_dist(x[i], z));
  }
  res.vi_residual = resid;
  return res;
}

}  // namespace detail

/// Decentralized rounds: each company receives sigma(x^{-i}) and returns
/// N_i x_i; the coordinator never sees K-bar, R_i internals or vehicle data.
/// Pass a MessageLog to capture the exchange.
inline EquilibriumResult run_decentralized(const Scenario& s, const SolverConfig& cfg = {},
                                           MessageLog* log = nullptr) {
  const GameInstance g = build_game_instance(s);
  return detail::iterate_equilibrium(g, cfg, log);
}

/// Nash equilibrium of the priced game. Same computation as
/// run_decentralized round for round.
inline EquilibriumResult solve_equilibrium(const Scenario& s, const SolverConfig& cfg = {}) {
  return run_decentralized(s, cfg, nullptr);
}

struct CentralizedOptimum {
  std::vector<Vec> x;
  Vec sigma;
  double jg = 0.0;  // tracking form when a target is present
};

/// Independent testing oracle: plain projected-gradient descent on the
/// centralized program min 1/2 x'A'A_G A x + b_G'A x over K-bar, with the
/// gradient evaluated through the stacking matrix A. Verifies the first-order
/// optimality certificate <grad, y - x*> >= -1e-6 on sampled feasible points
/// before returning. Never used by the equilibrium solver.
inline CentralizedOptimum centralized_optimum(const Scenario& s, int max_iters = 200000) {
  const GameInstance g = build_game_instance(s);
  const std::size_t c = g.constraint_sets.size();
  const std::size_t m = g.map.m;
  const std::size_t dim = m * c;
  const double eta = 1.0 / detail::largest_eigenvalue(g.map.f1);

  auto stack = [&](const std::vector<Vec>& xs) {
    Vec v(dim);
    for (std::size_t i = 0; i < c; ++i)
      for (std::size_t j = 0; j < m; ++j) v[i * m + j] = xs[i][j];
    return v;
  };
  auto gradient = [&](const std::vector<Vec>& xs) {
    // A'(A_G (A x) + b_G), going through the stacking matrix
    const Vec ax = mul(g.map.a_stack, stack(xs));
    Vec w(m);
    for (std::size_t j = 0; j < m; ++j) w[j] = g.objective.a_g[j] * ax[j] + g.objective.b_g[j];
    std::vector<Vec> grad(c, Vec(m));
    for (std::size_t i = 0; i < c; ++i)
      for (std::size_t j = 0; j < m; ++j) grad[i][j] = g.map.a_stack(j, i * m + j) * w[j];
    return grad;
  };

  std::vector<Vec> x(c);
  for (std::size_t i = 0; i < c; ++i)
    x[i] = project(Vec(m, 1.0 / static_cast<double>(m)), g.constraint_sets[i]);
  for (int k = 0; k < max_iters; ++k) {
    const auto grad = gradient(x);
    double change = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      Vec z = project(axpy(x[i], -eta, grad[i]), g.constraint_sets[i], x[i]);
      change = std::max(change, inf_dist(z, x[i]));
      x[i] = std::move(z);
    }
    if (change < 1e-13) break;
  }

  // first-order optimality certificate on sampled feasible directions
  const auto grad = gradient(x);
  Rng rng(20240901);
  for (int probe = 0; probe < 64; ++probe) {
    double inner = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      Vec obj(m);
      for (std::size_t j = 0; j < m; ++j) obj[j] = rng.uniform(-1.0, 1.0);
      const Vec y = argmax_vertex(g.constraint_sets[i], obj);
      for (std::size_t j = 0; j < m; ++j) inner += grad[i][j] * (y[j] - x[i][j]);
    }
    if (inner < -1e-6)
      throw NumericError("centralized_optimum: optimality certificate failed (inner product " +
                         std::to_string(inner) + ")");
  }

  CentralizedOptimum out;
  out.x = x;
  out.sigma = g.map.sigma(x);
  out.jg = government_cost(out.sigma, g.objective);
  return out;
}

}  // namespace fleetcharge
