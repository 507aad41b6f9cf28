#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fleetcharge/scenario.hpp"

namespace fleetcharge {

namespace detail {

using nlohmann::json;

inline json to_json(const Scenario& s) {
  json j;
  j["region_side"] = s.region_side;
  j["stations"] = json::array();
  for (const auto& st : s.stations)
    j["stations"].push_back({{"id", st.id}, {"x", st.x}, {"y", st.y}, {"capacity", st.capacity}});
  j["companies"] = json::array();
  for (const auto& c : s.companies) {
    json jc{{"id", c.id}, {"u", c.u}, {"vehicles", json::array()}};
    for (const auto& v : c.vehicles)
      jc["vehicles"].push_back({{"id", v.id},
                                {"x", v.x},
                                {"y", v.y},
                                {"s_start", v.s_start},
                                {"s_des", v.s_des},
                                {"d_max", v.d_max},
                                {"beta", v.beta}});
    j["companies"].push_back(std::move(jc));
  }
  json obj{{"A_G", s.objective.a_g}, {"b_G", s.objective.b_g}};
  if (s.objective.target) obj["target"] = *s.objective.target;
  j["objective"] = std::move(obj);
  j["Q"] = s.q;
  j["P"] = s.p_occupied;
  j["e_pro"] = s.e_pro;
  return j;
}

template <typename T>
T get_field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ParseError("scenario file: missing key '" + std::string(key) + "' in " + where);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError("scenario file: bad value for '" + std::string(key) + "' in " + where + ": " + e.what());
  }
}

inline Scenario from_json(const json& j) {
  Scenario s;
  s.region_side = get_field<double>(j, "region_side", "top level");
  for (const auto& jst : get_field<json>(j, "stations", "top level")) {
    Station st;
    st.id = get_field<int>(jst, "id", "stations");
    st.x = get_field<double>(jst, "x", "stations");
    st.y = get_field<double>(jst, "y", "stations");
    st.capacity = get_field<int>(jst, "capacity", "stations");
    s.stations.push_back(st);
  }
  for (const auto& jc : get_field<json>(j, "companies", "top level")) {
    Company c;
    c.id = get_field<int>(jc, "id", "companies");
    c.u = get_field<double>(jc, "u", "companies");
    for (const auto& jv : get_field<json>(jc, "vehicles", "companies")) {
      Vehicle v;
      v.id = get_field<int>(jv, "id", "vehicles");
      v.x = get_field<double>(jv, "x", "vehicles");
      v.y = get_field<double>(jv, "y", "vehicles");
      v.s_start = get_field<double>(jv, "s_start", "vehicles");
      v.s_des = get_field<double>(jv, "s_des", "vehicles");
      v.d_max = get_field<double>(jv, "d_max", "vehicles");
      v.beta = get_field<double>(jv, "beta", "vehicles");
      c.vehicles.push_back(v);
    }
    s.companies.push_back(std::move(c));
  }
  const json& obj = j.contains("objective") ? j.at("objective")
                                            : throw ParseError("scenario file: missing key 'objective' in top level");
  s.objective.a_g = get_field<Vec>(obj, "A_G", "objective");
  if (obj.contains("target")) s.objective.target = get_field<Vec>(obj, "target", "objective");
  if (obj.contains("b_G")) {
    s.objective.b_g = get_field<Vec>(obj, "b_G", "objective");
  } else if (s.objective.target) {
    s.objective.b_g.resize(s.objective.a_g.size());
    for (std::size_t k = 0; k < s.objective.b_g.size(); ++k)
      s.objective.b_g[k] = -s.objective.a_g[k] * (*s.objective.target)[k];
  } else {
    throw ParseError("scenario file: objective needs 'b_G' or 'target'");
  }
  s.q = get_field<Vec>(j, "Q", "top level");
  s.p_occupied = get_field<Vec>(j, "P", "top level");
  s.e_pro = get_field<Vec>(j, "e_pro", "top level");
  validate(s);
  return s;
}

}  // namespace detail

inline std::string scenario_to_string(const Scenario& s) { return detail::to_json(s).dump(2) + "\n"; }

inline Scenario scenario_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("scenario file: ") + e.what());
  }
  return detail::from_json(j);
}

inline void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << scenario_to_string(s);
  if (!out) throw IoError("write failed: " + path.string());
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_string(buf.str());
}

}  // namespace fleetcharge
