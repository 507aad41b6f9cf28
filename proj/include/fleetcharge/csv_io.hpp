#pragma once

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fleetcharge/allocation.hpp"
#include "fleetcharge/robustness.hpp"
#include "fleetcharge/solver.hpp"

namespace fleetcharge {

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << v;
  return os.str();
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

}  // namespace detail

/// iter,J_G,sigma_1..sigma_m — one row per recorded iteration (row 0 is the
/// initial point).
inline void write_trace_csv(const std::filesystem::path& path, const EquilibriumResult& res) {
  auto out = detail::open_out(path);
  const std::size_t m = res.sigma.size();
  out << "iter,J_G";
  for (std::size_t j = 0; j < m; ++j) out << ",sigma_" << (j + 1);
  out << "\n";
  for (std::size_t k = 0; k < res.jg_trace.size(); ++k) {
    out << k << "," << detail::fmt(res.jg_trace[k]);
    for (std::size_t j = 0; j < m; ++j) out << "," << detail::fmt(res.sigma_trace[k][j]);
    out << "\n";
  }
}

/// company,station,x,price — the equilibrium decision table.
inline void write_decisions_csv(const std::filesystem::path& path, const Scenario& s,
                                const EquilibriumResult& res) {
  auto out = detail::open_out(path);
  out << "company,station,x,price\n";
  for (std::size_t i = 0; i < s.companies.size(); ++i)
    for (std::size_t j = 0; j < s.stations.size(); ++j)
      out << s.companies[i].id << "," << s.stations[j].id << "," << detail::fmt(res.x[i][j]) << ","
          << detail::fmt(res.prices[i][j]) << "\n";
}

/// vehicle_id,company_id,station_id,distance,delta_demand
inline void write_assignment_csv(const std::filesystem::path& path, const Scenario& s,
                                 const std::vector<Assignment>& assignments) {
  auto out = detail::open_out(path);
  out << "vehicle_id,company_id,station_id,distance,delta_demand\n";
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    const Company& c = s.companies[i];
    for (const auto& [vid, sid] : assignments[i].vehicle_to_station) {
      const Vehicle* v = nullptr;
      for (const auto& cand : c.vehicles)
        if (cand.id == vid) v = &cand;
      const Station* st = nullptr;
      for (const auto& cand : s.stations)
        if (cand.id == sid) st = &cand;
      if (!v || !st) throw NumericError("assignment references unknown vehicle or station");
      out << vid << "," << c.id << "," << sid << "," << detail::fmt(distance(*v, *st)) << ","
          << detail::fmt(charging_demand(*v, *st)) << "\n";
    }
  }
}

/// alpha,mean_JG,min_JG,max_JG
inline void write_robustness_csv(const std::filesystem::path& path, const std::vector<RobustnessRow>& rows) {
  auto out = detail::open_out(path);
  out << "alpha,mean_JG,min_JG,max_JG\n";
  for (const auto& r : rows)
    out << detail::fmt(r.alpha) << "," << detail::fmt(r.mean_jg) << "," << detail::fmt(r.min_jg) << ","
        << detail::fmt(r.max_jg) << "\n";
}

/// Machine-readable audit of a solve: final allocations and prices, the VI
/// residual, the step size and its eigenvalue bound, plus the subset
/// constraints of every company's K-bar for inspection.
inline void write_audit_json(const std::filesystem::path& path, const Scenario& s,
                             const EquilibriumResult& res) {
  nlohmann::json j;
  j["gamma"] = res.gamma;
  j["lambda_max"] = res.lambda_max;
  j["step_size_bound"] = 2.0 / res.lambda_max;
  j["iterations"] = res.iterations;
  j["converged"] = res.converged;
  j["vi_residual"] = res.vi_residual;
  j["J_G"] = res.jg_final;
  j["J_G_quadratic_offset"] = res.jg_offset;
  j["sigma"] = res.sigma;
  j["companies"] = nlohmann::json::array();
  for (std::size_t i = 0; i < s.companies.size(); ++i) {
    const FeasibilitySets fs = feasibility_sets(s.companies[i], s.stations);
    const FeasibleSet k = build_constraint_set(fs);
    nlohmann::json jc;
    jc["id"] = s.companies[i].id;
    jc["x"] = res.x[i];
    jc["prices"] = res.prices[i];
    jc["subset_constraints"] = nlohmann::json::array();
    for (const auto& sc : k.constraints) {
      std::vector<int> stations;
      for (std::size_t sj = 0; sj < k.station_count; ++sj)
        if (sc.mask & (1u << sj)) stations.push_back(fs.station_ids[sj]);
      jc["subset_constraints"].push_back({{"stations", stations}, {"bound", sc.bound}});
    }
    j["companies"].push_back(std::move(jc));
  }
  auto out = detail::open_out(path);
  out << j.dump(2) << "\n";
}

/// Reads a decisions.csv back into per-company allocation vectors, validated
/// against the scenario's company/station ids.
inline std::vector<Vec> read_decisions_csv(const std::filesystem::path& path, const Scenario& s) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open decisions file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError("decisions file: empty");
  if (line.rfind("company,station,x", 0) != 0)
    throw ParseError("decisions file: unexpected header '" + line + "'");
  std::vector<Vec> x(s.companies.size(), Vec(s.stations.size(), 0.0));
  std::vector<std::vector<char>> seen(s.companies.size(), std::vector<char>(s.stations.size(), 0));
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    auto next_cell = [&]() {
      if (!std::getline(row, cell, ',')) throw ParseError("decisions file: short row at line " + std::to_string(lineno));
      return cell;
    };
    int cid = 0, sid = 0;
    double val = 0.0;
    try {
      cid = std::stoi(next_cell());
      sid = std::stoi(next_cell());
      val = std::stod(next_cell());
    } catch (const std::logic_error&) {
      throw ParseError("decisions file: non-numeric cell at line " + std::to_string(lineno));
    }
    std::size_t ci = s.companies.size(), sj = s.stations.size();
    for (std::size_t i = 0; i < s.companies.size(); ++i)
      if (s.companies[i].id == cid) ci = i;
    for (std::size_t jj = 0; jj < s.stations.size(); ++jj)
      if (s.stations[jj].id == sid) sj = jj;
    if (ci == s.companies.size() || sj == s.stations.size())
      throw ValidationError("decisions file line " + std::to_string(lineno) + ": unknown company or station id");
    x[ci][sj] = val;
    seen[ci][sj] = 1;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    for (std::size_t jj = 0; jj < seen[i].size(); ++jj)
      if (!seen[i][jj])
        throw ValidationError("decisions file: missing row for company " + std::to_string(s.companies[i].id) +
                              ", station " + std::to_string(s.stations[jj].id));
  return x;
}

}  // namespace fleetcharge
