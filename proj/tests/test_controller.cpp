#include <doctest.h>

#include <vector>

#include "sclsim/controller.hpp"
#include "sclsim/errors.hpp"
#include "sclsim/rng.hpp"

using namespace sclsim;

namespace {

SensorAccMap identity_map(std::uint32_t n) {
  SensorAccMap m;
  for (std::uint32_t i = 0; i < n; ++i) {
    m.acc_of_sensor.push_back(i);
    m.regions_of_acc.push_back({i});
  }
  return m;
}

std::size_t count_activations(const std::vector<double>& scores, double th_low, double th_high) {
  HysteresisState s(th_low, th_high);
  std::size_t n = 0;
  for (double x : scores) {
    auto [next, t] = hysteresis_step(s, x);
    s = next;
    n += t == Transition::activated;
  }
  return n;
}

}  // namespace

TEST_CASE("hysteresis_step") {
  const HysteresisState off(2.0, 4.5);
  const HysteresisState on(2.0, 4.5, AccMode::on);

  auto [a, ta] = hysteresis_step(off, 5.0);
  CHECK(a.mode() == AccMode::on);
  CHECK(ta == Transition::activated);

  auto [b, tb] = hysteresis_step(on, 3.0);
  CHECK(b.mode() == AccMode::on);
  CHECK_FALSE(tb.has_value());

  auto [c, tc] = hysteresis_step(off, 3.0);
  CHECK(c.mode() == AccMode::off);
  CHECK_FALSE(tc.has_value());

  SUBCASE("boundaries") {
    CHECK(hysteresis_step(off, 4.5).first.mode() == AccMode::on);
    CHECK(hysteresis_step(on, 2.0).first.mode() == AccMode::on);
    auto [d, td] = hysteresis_step(on, 1.999);
    CHECK(d.mode() == AccMode::off);
    CHECK(td == Transition::deactivated);
  }
}

TEST_CASE("threshold validation") {
  CHECK_THROWS_AS(HysteresisState(4.5, 4.5), InvalidThresholds);
  CHECK_THROWS_AS(HysteresisState(5.0, 4.5), InvalidThresholds);
  CHECK_THROWS_AS(HysteresisState(-1.0, 4.5), InvalidThresholds);
  CHECK_THROWS_AS(HysteresisState(1.0, 1.0 / 0.0), InvalidThresholds);
  CHECK_NOTHROW(HysteresisState(0.0, 0.1));
}

TEST_CASE("controller_tick") {
  const auto map = identity_map(4);
  std::vector<HysteresisState> states(4, HysteresisState(2.0, 4.5));

  SUBCASE("quiescent") {
    std::vector<LeakageScore> scores{{0, 0, 0.0}, {1, 0, 0.0}, {2, 0, 0.0}, {3, 0, 0.0}};
    const auto r = controller_tick(scores, states, map, 4, 0);
    CHECK(r.events.empty());
    for (bool on : r.active_regions) CHECK_FALSE(on);
  }
  SUBCASE("one sensor alarms") {
    std::vector<LeakageScore> scores{{0, 7, 0.0}, {1, 7, 0.0}, {2, 7, 9.9}, {3, 7, 1.0}};
    const auto r = controller_tick(scores, states, map, 4, 7);
    REQUIRE(r.events.size() == 1);
    CHECK(r.events[0].sensor_id == 2);
    CHECK(r.events[0].acc_id == 2);
    CHECK(r.events[0].window_idx == 7);
    CHECK(r.events[0].transition == Transition::activated);
    CHECK(r.events[0].score == 9.9);
    CHECK(r.active_regions == std::vector<bool>{false, false, true, false});
  }
  SUBCASE("max rule over sensors sharing an acc") {
    SensorAccMap shared;
    shared.acc_of_sensor = {0, 0};
    shared.regions_of_acc = {{0, 1}};
    std::vector<HysteresisState> one(1, HysteresisState(2.0, 4.5));
    std::vector<LeakageScore> scores{{0, 0, 1.0}, {1, 0, 5.0}};
    const auto r = controller_tick(scores, one, shared, 2, 0);
    REQUIRE(r.events.size() == 1);
    CHECK(r.events[0].sensor_id == 1);
    CHECK(one[0].mode() == AccMode::on);
    CHECK(r.active_regions == std::vector<bool>{true, true});
  }
  SUBCASE("equal scores on a shared acc name the lowest sensor") {
    SensorAccMap shared;
    shared.acc_of_sensor = {0, 0, 0};
    shared.regions_of_acc = {{0}};
    std::vector<HysteresisState> one(1, HysteresisState(2.0, 4.5));
    std::vector<LeakageScore> scores{{2, 0, 6.0}, {1, 0, 6.0}, {0, 0, 3.0}};
    const auto r = controller_tick(scores, one, shared, 1, 0);
    REQUIRE(r.events.size() == 1);
    CHECK(r.events[0].sensor_id == 1);
  }
  SUBCASE("unmapped sensor") {
    std::vector<LeakageScore> scores{{9, 0, 1.0}};
    CHECK_THROWS_AS(controller_tick(scores, states, map, 4, 0), UnmappedSensor);
  }
  SUBCASE("unscored accs keep their mode") {
    states[1] = hysteresis_step(states[1], 9.0).first;
    std::vector<LeakageScore> scores{{0, 0, 0.0}};
    const auto r = controller_tick(scores, states, map, 4, 0);
    CHECK(r.events.empty());
    CHECK(states[1].mode() == AccMode::on);
    CHECK(r.active_regions == std::vector<bool>{false, true, false, false});
  }
}

TEST_CASE("no chattering inside the band") {
  Rng rng(5);
  for (AccMode start : {AccMode::off, AccMode::on}) {
    HysteresisState s(2.0, 4.5, start);
    for (int i = 0; i < 10000; ++i) {
      auto [next, t] = hysteresis_step(s, 2.0 + 2.5 * rng.uniform01() * 0.9999);
      CHECK_FALSE(t.has_value());
      CHECK(next.mode() == start);
      s = next;
    }
  }
}

TEST_CASE("event soundness and localization over random score streams") {
  Rng rng(17);
  const auto map = identity_map(4);
  std::vector<HysteresisState> states(4, HysteresisState(2.0, 4.5));
  std::vector<int> balance(4, 0);
  for (std::uint64_t w = 0; w < 20000; ++w) {
    std::vector<LeakageScore> scores;
    for (std::uint32_t s = 0; s < 4; ++s) scores.push_back({s, w, 7.0 * rng.uniform01()});
    const auto r = controller_tick(scores, states, map, 4, w);
    for (const auto& e : r.events) {
      balance[e.acc_id] += e.transition == Transition::activated ? 1 : -1;
      if (e.transition == Transition::activated) CHECK(scores[e.sensor_id].value >= 4.5);
      else CHECK(scores[e.sensor_id].value < 2.0);
    }
    for (std::uint32_t a = 0; a < 4; ++a) {
      CHECK((balance[a] == 0 || balance[a] == 1));
      CHECK(balance[a] == (states[a].mode() == AccMode::on ? 1 : 0));
    }
  }
}

TEST_CASE("raising th_high never adds activations") {
  Rng rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> scores(64);
    for (auto& x : scores) x = 8.0 * rng.uniform01();
    std::size_t prev = count_activations(scores, 1.0, 2.0);
    for (double hi = 2.5; hi <= 8.5; hi += 0.5) {
      const auto n = count_activations(scores, 1.0, hi);
      CHECK(n <= prev);
      prev = n;
    }
  }
}

TEST_CASE("SensorAccMap") {
  SUBCASE("nearest assignment on a 4x4 grid") {
    const auto fp = Floorplan::grid(4, 4);
    const SensorArray sensors(fp, place_sensors_even(4, 4, 4));
    const auto map = SensorAccMap::nearest(sensors, 16);
    REQUIRE(map.acc_count() == 4);
    CHECK_NOTHROW(map.validate(4, 16));
    std::size_t covered = 0;
    for (std::uint32_t a = 0; a < 4; ++a) {
      for (auto r : map.regions_of_acc[a]) CHECK(sensors.nearest_sensor(r) == a);
      covered += map.regions_of_acc[a].size();
    }
    CHECK(covered == 16);
  }
  SUBCASE("validation") {
    SensorAccMap bad;
    bad.acc_of_sensor = {0, 1};
    bad.regions_of_acc = {{0}};
    CHECK_THROWS_AS(bad.validate(2, 4), ConfigError);
    SensorAccMap empty_acc;
    empty_acc.acc_of_sensor = {0};
    empty_acc.regions_of_acc = {{}};
    CHECK_THROWS_AS(empty_acc.validate(1, 4), ConfigError);
  }
}
