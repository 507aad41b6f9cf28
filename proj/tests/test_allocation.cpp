#include <catch2/catch.hpp>

#include "test_support.hpp"

using namespace fleetcharge;
using testsupport::all_roundings;
using testsupport::brute_force_matchable;
using testsupport::make_sets;
using testsupport::random_member;
using testsupport::random_sets;

TEST_CASE("largest-remainder rounding") {
  SECTION("exact integers pass through") {
    REQUIRE(round_allocation({1.0 / 3, 1.0 / 3, 1.0 / 3}, 3).counts == std::vector<int>{1, 1, 1});
  }
  SECTION("remainder ties go to the lower station id") {
    REQUIRE(round_allocation({0.5, 0.5}, 3).counts == std::vector<int>{2, 1});
  }
  SECTION("reference equilibrium row") {
    // floors (12,9,22,16) sum 59; largest remainder 0.8 sits at station 3
    REQUIRE(round_allocation({0.2, 0.15, 0.38, 0.27}, 60).counts == std::vector<int>{12, 9, 23, 16});
  }
  SECTION("off-simplex input is rejected") {
    REQUIRE_THROWS_AS(round_allocation({0.7, 0.7}, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(round_allocation({1.5, -0.5}, 4), std::invalid_argument);
  }
  SECTION("every output is a floor/ceil combination summing to the fleet") {
    Rng rng(71);
    for (int t = 0; t < 200; ++t) {
      const std::size_t m = 1 + rng.next() % 5;
      const std::size_t fleet = 1 + rng.next() % 60;
      Vec x(m, 0.0);
      double left = 1.0;
      for (std::size_t j = 0; j + 1 < m; ++j) {
        x[j] = rng.uniform(0.0, left);
        left -= x[j];
      }
      x[m - 1] = left;
      const auto alloc = round_allocation(x, fleet);
      REQUIRE(alloc.total() == static_cast<int>(fleet));
      for (std::size_t j = 0; j < m; ++j) {
        const double exact = static_cast<double>(fleet) * x[j];
        REQUIRE(alloc.counts[j] >= static_cast<int>(std::floor(exact)));
        REQUIRE(alloc.counts[j] <= static_cast<int>(std::ceil(exact)));
      }
    }
  }
}

TEST_CASE("hall condition") {
  SECTION("two stations sharing one vehicle cannot host two") {
    const auto fs = make_sets(1, {{1}, {1}});
    REQUIRE_FALSE(hall_condition({1, {1, 1}}, fs));
  }
  SECTION("single station holds exactly its reachable fleet") {
    const auto fs = make_sets(3, {{1, 2, 3}});
    REQUIRE(hall_condition({1, {3}}, fs));
  }
  SECTION("the full-set row is checked too") {
    const auto fs = make_sets(3, {{1, 2}, {1, 2}});  // vehicle 3 stranded
    REQUIRE_FALSE(hall_condition({1, {2, 1}}, fs));  // 3 > |{1,2}|
  }
}

TEST_CASE("matching realizes allocations") {
  SECTION("forced unique matching") {
    const auto fs = make_sets(2, {{1, 2}, {2}});
    const auto a = match_vehicles({1, {1, 1}}, fs);
    REQUIRE(a.vehicle_to_station == std::vector<std::pair<int, int>>{{1, 1}, {2, 2}});
  }
  SECTION("everyone to the one open station") {
    const auto fs = make_sets(3, {{1, 2, 3}, {1, 2, 3}});
    const auto a = match_vehicles({1, {3, 0}}, fs);
    for (const auto& [v, st] : a.vehicle_to_station) REQUIRE(st == 1);
  }
  SECTION("failure names a violating subset") {
    // both stations compete for vehicle 1; vehicle 2 reaches nothing
    const auto fs = make_sets(2, {{1}, {1}});
    REQUIRE_FALSE(hall_condition({1, {1, 1}}, fs));
    try {
      (void)match_vehicles({1, {1, 1}}, fs);
      FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
      const std::string what = e.what();
      REQUIRE(what.find("Hall") != std::string::npos);
      REQUIRE(what.find("need 2") != std::string::npos);
    }
  }
}

TEST_CASE("matching agrees with the brute-force oracle on random instances") {
  Rng rng(81);
  int feasible_seen = 0, infeasible_seen = 0;
  for (int t = 0; t < 400; ++t) {
    const std::size_t m = 1 + rng.next() % 4;
    const std::size_t fleet = 1 + rng.next() % 8;
    const auto fs = random_sets(rng, m, fleet, false);

    // random composition of the fleet over stations
    std::vector<int> counts(m, 0);
    for (std::size_t v = 0; v < fleet; ++v) ++counts[rng.next() % m];
    const IntegerAllocation alloc{1, counts};

    const bool hall = hall_condition(alloc, fs);
    const bool brute = brute_force_matchable(fs, counts);
    REQUIRE(hall == brute);  // Hall's theorem, both directions

    if (hall) {
      ++feasible_seen;
      const auto a = match_vehicles(alloc, fs);
      std::vector<int> realized(m, 0);
      for (const auto& [vid, sid] : a.vehicle_to_station) {
        const std::size_t vi = static_cast<std::size_t>(vid - 1);
        const std::size_t sj = static_cast<std::size_t>(sid - 1);
        REQUIRE((fs.reach_masks[vi] & (1u << sj)) != 0);  // respects reachability
        ++realized[sj];
      }
      REQUIRE(realized == counts);
      REQUIRE(a.vehicle_to_station.size() == fleet);  // everyone assigned exactly once
    } else {
      ++infeasible_seen;
      REQUIRE_THROWS_AS(match_vehicles(alloc, fs), InfeasibleError);
    }
  }
  REQUIRE(feasible_seen > 50);
  REQUIRE(infeasible_seen > 50);
}

TEST_CASE("members of K-bar survive rounding and matching end to end") {
  Rng rng(91);
  int cases = 0;
  for (int t = 0; t < 300 && cases < 60; ++t) {
    const std::size_t m = 2 + rng.next() % 3;
    const std::size_t fleet = 3 + rng.next() % 6;
    const auto fs = random_sets(rng, m, fleet, true, 0.8);
    const auto k = build_constraint_set(fs);
    if (is_empty(k)) continue;
    ++cases;
    const Vec x = random_member(k, rng);
    for (const auto& counts : all_roundings(x, fleet)) {
      const IntegerAllocation alloc{1, counts};
      REQUIRE(hall_condition(alloc, fs));
      const auto a = match_vehicles(alloc, fs);
      REQUIRE(a.vehicle_to_station.size() == fleet);
    }
    // the default pipeline rounding is one of the admissible ones
    const auto def = round_allocation(x, fleet);
    REQUIRE(hall_condition(def, fs));
  }
  REQUIRE(cases >= 40);
}
