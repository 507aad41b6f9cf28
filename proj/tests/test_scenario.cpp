#include <catch2/catch.hpp>

#include "test_support.hpp"

using namespace fleetcharge;
using testsupport::temp_dir;

namespace {

Vehicle make_vehicle(double s_start, double d_max, double x = 0.0, double s_des = 90.0, double beta = 1.0) {
  return Vehicle{1, x, 0.0, s_start, s_des, d_max, beta};
}

Station station_at(double x, double y = 0.0) { return Station{1, x, y, 5}; }

}  // namespace

TEST_CASE("generation is deterministic and byte-identical per seed") {
  const auto cfg = example_generation_config();
  const Scenario a = generate_scenario(cfg, 7);
  const Scenario b = generate_scenario(cfg, 7);
  REQUIRE(a == b);
  REQUIRE(scenario_to_string(a) == scenario_to_string(b));
  const Scenario c = generate_scenario(cfg, 8);
  REQUIRE_FALSE(a == c);
}

TEST_CASE("reference configuration sizes") {
  auto cfg = example_generation_config();
  cfg.region_side = 100.0;  // counts are independent of the region size
  const Scenario s = generate_scenario(cfg, 3);
  REQUIRE(s.stations.size() == 4);
  std::size_t vehicles = 0;
  for (const auto& c : s.companies) vehicles += c.fleet_size();
  REQUIRE(s.companies.size() == 3);
  REQUIRE(vehicles == 140);
  REQUIRE(s.companies[0].fleet_size() == 60);
  REQUIRE(s.companies[1].fleet_size() == 35);
  REQUIRE(s.companies[2].fleet_size() == 45);
  // invariants of the draw
  for (const auto& c : s.companies)
    for (const auto& v : c.vehicles) {
      REQUIRE(v.s_start >= 20.0);
      REQUIRE(v.s_start <= 40.0);
      REQUIRE(v.s_des >= 80.0);
      REQUIRE(v.s_des <= 100.0);
      REQUIRE(v.s_start <= v.s_des);
      REQUIRE(v.d_max >= 150.0);
      REQUIRE(v.d_max <= 200.0);
    }
}

TEST_CASE("degenerate uniform bounds pin the value") {
  auto cfg = example_generation_config();
  cfg.d_max = {150.0, 150.0};
  const Scenario s = generate_scenario(cfg, 11);
  for (const auto& c : s.companies)
    for (const auto& v : c.vehicles) REQUIRE(v.d_max == 150.0);
}

TEST_CASE("inverted bounds are a configuration error") {
  auto cfg = example_generation_config();
  cfg.s_start = {40.0, 20.0};
  REQUIRE_THROWS_AS(generate_scenario(cfg, 1), ConfigError);
}

TEST_CASE("reachability is strict in the arrival battery") {
  // s_start - (100/d_max) * d > 0
  REQUIRE(reachable(make_vehicle(30.0, 200.0), station_at(59.9)));        // 0.05% left
  REQUIRE_FALSE(reachable(make_vehicle(30.0, 200.0), station_at(60.0))); // exactly 0
  REQUIRE(reachable(make_vehicle(10.0, 200.0), station_at(0.0)));        // zero distance
}

TEST_CASE("reachability is monotone in the starting charge") {
  Rng rng(42);
  for (int t = 0; t < 200; ++t) {
    const double d = rng.uniform(0.0, 120.0);
    const double s_start = rng.uniform(1.0, 99.0);
    const double d_max = rng.uniform(120.0, 250.0);
    const Vehicle lo = make_vehicle(s_start, d_max, d);
    Vehicle hi = lo;
    hi.s_start = std::min(100.0, s_start + rng.uniform(0.0, 100.0 - s_start));
    const Station st = station_at(0.0);
    if (reachable(lo, st)) REQUIRE(reachable(hi, st));
  }
}

TEST_CASE("charging demand formula") {
  // delta = beta * (s_des - (s_start - 100 d / d_max))
  REQUIRE(charging_demand(make_vehicle(30.0, 200.0, 40.0, 90.0, 1.0), station_at(0.0)) == Approx(80.0));
  REQUIRE(charging_demand(make_vehicle(30.0, 200.0, 40.0, 90.0, 2.0), station_at(0.0)) == Approx(160.0));
  // zero distance: s_des - s_start
  REQUIRE(charging_demand(make_vehicle(30.0, 200.0, 0.0, 90.0, 1.0), station_at(0.0)) == Approx(60.0));
}

TEST_CASE("charging demand requires reachability") {
  REQUIRE_THROWS_AS(charging_demand(make_vehicle(30.0, 200.0, 60.0), station_at(0.0)), std::invalid_argument);
}

TEST_CASE("charging demand grows linearly with distance at slope beta*100/d_max") {
  Rng rng(77);
  for (int t = 0; t < 100; ++t) {
    const double d_max = rng.uniform(150.0, 200.0);
    const double beta = rng.uniform(0.5, 3.0);
    const double d1 = rng.uniform(0.0, 20.0);
    const double d2 = d1 + rng.uniform(0.1, 20.0);
    const Vehicle v1 = make_vehicle(35.0, d_max, d1, 90.0, beta);
    const Vehicle v2 = make_vehicle(35.0, d_max, d2, 90.0, beta);
    const Station st = station_at(0.0);
    const double delta1 = charging_demand(v1, st);
    const double delta2 = charging_demand(v2, st);
    REQUIRE(delta2 > delta1);
    REQUIRE((delta2 - delta1) / (d2 - d1) == Approx(beta * 100.0 / d_max).epsilon(1e-9));
  }
}

TEST_CASE("save/load round trip is the identity") {
  const auto dir = temp_dir("scenario");
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 99ull}) {
    const Scenario s = generate_scenario(example_generation_config(), seed);
    const auto path = dir / ("s" + std::to_string(seed) + ".json");
    save_scenario(s, path);
    REQUIRE(load_scenario(path) == s);
  }
}

TEST_CASE("loading rejects invariant violations naming the field") {
  const Scenario s = generate_scenario(example_generation_config(), 5);
  std::string text = scenario_to_string(s);
  const auto pos = text.find("\"capacity\": 20");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 14, "\"capacity\": 0");
  try {
    (void)scenario_from_string(text);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    REQUIRE(std::string(e.what()).find("capacity") != std::string::npos);
  }
}

TEST_CASE("loading rejects schema violations") {
  REQUIRE_THROWS_AS(scenario_from_string("{ not json"), ParseError);
  // well-formed json missing the stations key
  try {
    (void)scenario_from_string(R"({"region_side": 100.0, "companies": []})");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(std::string(e.what()).find("stations") != std::string::npos);
  }
}

TEST_CASE("loading a missing file is an io error") {
  REQUIRE_THROWS_AS(load_scenario("/nonexistent/path/scenario.json"), IoError);
}
