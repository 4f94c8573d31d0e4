#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "hvacctl/thermal.hpp"

using namespace hvacctl;

namespace {

ZoneThermalParams example_params() {
  ZoneThermalParams p;
  p.heat_capacity_j_per_c = 1e7;
  p.thermal_resistance_c_per_w = 2e-3;
  p.hvac_max_cooling_w = 5e4;
  p.cop = 3.0;
  p.occupant_heat_w = 100.0;
  return p;
}

}  // namespace

TEST_CASE("parameter validation") {
  ZoneThermalParams p = example_params();
  CHECK_NOTHROW(p.validate());
  CHECK(p.time_constant_s() == doctest::Approx(2e4));
  p.heat_capacity_j_per_c = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = example_params();
  p.cop = -1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("occupant heat gain is linear") {
  ZoneThermalParams p = example_params();
  CHECK(occupant_heat_gain(0, p) == 0.0);
  CHECK(occupant_heat_gain(3, p) == doctest::Approx(300.0));
  // peak crowd from the rush-hour video scale
  CHECK(occupant_heat_gain(407, p) == doctest::Approx(40700.0));
  CHECK_THROWS_AS(occupant_heat_gain(-1, p), std::invalid_argument);
}

TEST_CASE("euler step matches hand evaluation") {
  ZoneThermalParams p = example_params();
  SimulationState s;
  s.indoor_temp_c = 30.0;
  // dT = (dt/C)*((T_o - T_i)/R + Q_AC + Q(O))
  //    = (60/1e7)*(5000 - 50000) = -0.27
  SimulationState next = step_euler(s, p, 40.0, 0, -5e4, 60.0);
  CHECK(next.indoor_temp_c == doctest::Approx(29.73).epsilon(1e-12));
  CHECK(next.clock == 60);
}

TEST_CASE("energy increment uses COP") {
  ZoneThermalParams p = example_params();
  SimulationState s;
  s.indoor_temp_c = 30.0;
  SimulationState next = step_euler(s, p, 40.0, 0, -5e4, 600.0);
  // |Q_AC| * dt / (3600 * cop) = 5e4 * 600 / 10800
  CHECK(next.cumulative_energy_wh == doctest::Approx(2777.8).epsilon(1e-4));
  // idle step consumes nothing
  SimulationState idle = step_euler(s, p, 40.0, 0, 0.0, 600.0);
  CHECK(idle.cumulative_energy_wh == 0.0);
}

TEST_CASE("cooling-only plant rejects positive commands") {
  ZoneThermalParams p = example_params();
  SimulationState s;
  CHECK_THROWS_AS(step_euler(s, p, 30.0, 0, 1000.0, 60.0), std::invalid_argument);
  CHECK_THROWS_AS(step_euler(s, p, 30.0, 0, -p.hvac_max_cooling_w - 1, 60.0), std::invalid_argument);
  CHECK_THROWS_AS(step_exact(s, p, 30.0, 0, 1000.0, 60.0), std::invalid_argument);
}

TEST_CASE("euler rejects unstable dt") {
  ZoneThermalParams p = example_params();  // tau = 2e4 s
  SimulationState s;
  CHECK_THROWS_AS(step_euler(s, p, 30.0, 0, 0.0, 4.1e4), std::invalid_argument);
  CHECK_NOTHROW(step_exact(s, p, 30.0, 0, 0.0, 4.1e4));  // exact step has no bound
}

TEST_CASE("exact step matches closed form") {
  ZoneThermalParams p = example_params();
  SimulationState s;
  s.indoor_temp_c = 30.0;
  SimulationState next = step_exact(s, p, 40.0, 0, -5e4, 60.0);
  // T_eq = 40 + 0.002*(-50000) = -60; T' = -60 + 90*exp(-60/20000)
  const double expect = -60.0 + 90.0 * std::exp(-60.0 / 20000.0);
  CHECK(next.indoor_temp_c == doctest::Approx(expect).epsilon(1e-12));
  CHECK(next.indoor_temp_c == doctest::Approx(29.7304).epsilon(1e-5));
  // difference from euler is O(dt^2 / tau^2)
  SimulationState eul = step_euler(s, p, 40.0, 0, -5e4, 60.0);
  CHECK(std::abs(eul.indoor_temp_c - next.indoor_temp_c) < 1e-3);
}

TEST_CASE("exact step is a fixed point at equilibrium") {
  ZoneThermalParams p = example_params();
  SimulationState s;
  s.indoor_temp_c = 40.0 + p.thermal_resistance_c_per_w * (-5e4 + 200.0);
  SimulationState next = step_exact(s, p, 40.0, 2, -5e4, 3600.0);
  CHECK(next.indoor_temp_c == doctest::Approx(s.indoor_temp_c).epsilon(1e-12));
}

TEST_CASE("simulate is pure and aligned") {
  ZoneThermalParams p = example_params();
  const Eigen::Index n = 144;
  TimeSeries weather = TimeSeries::constant(0, 600, n, 38.0);
  TimeSeries occ = TimeSeries::constant(0, 600, n, 0.0);
  TimeSeries plan = TimeSeries::constant(0, 600, n, -2e4);
  SimulationResult a = simulate(p, 30.0, weather, occ, plan, StepMethod::kEuler);
  SimulationResult b = simulate(p, 30.0, weather, occ, plan, StepMethod::kEuler);
  REQUIRE(a.indoor_temp.size() == n);
  CHECK(a.indoor_temp.values() == b.indoor_temp.values());
  CHECK(a.total_energy_wh == b.total_energy_wh);
  CHECK(a.total_energy_wh == doctest::Approx(n * 2e4 * 600 / (3600 * 3.0)));

  TimeSeries misaligned = TimeSeries::constant(600, 600, n, 0.0);
  CHECK_THROWS_AS(simulate(p, 30.0, weather, misaligned, plan, StepMethod::kEuler),
                  std::invalid_argument);
}

TEST_CASE("euler error halves with dt (first-order convergence)") {
  ZoneThermalParams p = example_params();
  auto max_gap = [&](std::int64_t dt) {
    const Eigen::Index n = 86400 / dt;
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i)
      w[i] = 35.0 + 7.0 * std::sin(2.0 * M_PI * double(i) * double(dt) / 86400.0);
    TimeSeries weather(0, dt, w);
    TimeSeries occ = TimeSeries::constant(0, dt, n, 5.0);
    TimeSeries plan = TimeSeries::constant(0, dt, n, -3e4);
    SimulationResult eul = simulate(p, 30.0, weather, occ, plan, StepMethod::kEuler);
    SimulationResult exa = simulate(p, 30.0, weather, occ, plan, StepMethod::kExact);
    double gap = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      gap = std::max(gap, std::abs(eul.indoor_temp[i] - exa.indoor_temp[i]));
    return gap;
  };
  const double coarse = max_gap(600);
  const double fine = max_gap(300);
  CHECK(coarse <= 0.5);
  CHECK(coarse / fine >= 1.8);
  CHECK(coarse / fine <= 2.2);
}

TEST_CASE("thermostat hysteresis automaton") {
  ZoneThermalParams p = example_params();  // deadband 0.5
  Thermostat t;
  CHECK(t.actuate(24.0, 24.0, p) == 0.0);          // inside band, stays off
  CHECK(t.actuate(24.6, 24.0, p) == -5e4);          // above band -> on
  CHECK(t.actuate(24.0, 24.0, p) == -5e4);          // inside band, stays on
  CHECK(t.actuate(23.4, 24.0, p) == 0.0);           // below band -> off
  // setpoint drop 28 -> 24 while T_i = 28 turns the compressor on
  Thermostat t2;
  CHECK(t2.actuate(28.0, 28.0, p) == 0.0);
  CHECK(t2.actuate(28.0, 24.0, p) == -5e4);
}

TEST_CASE("closed-loop thermostat run tracks the setpoint") {
  ZoneThermalParams p = example_params();
  const Eigen::Index n = 288;
  TimeSeries weather = TimeSeries::constant(0, 600, n, 38.0);
  TimeSeries occ = TimeSeries::constant(0, 600, n, 0.0);
  TimeSeries sp = TimeSeries::constant(0, 600, n, 24.0);
  ThermostatRunResult run = simulate_with_thermostat(p, 32.0, weather, occ, sp, StepMethod::kEuler);
  REQUIRE(run.indoor_temp.size() == n);
  // after settling, the zone oscillates around the setpoint: the hysteresis
  // band widened by at most one step's full-cooling swing
  const double swing =
      600.0 / p.heat_capacity_j_per_c *
      (p.hvac_max_cooling_w + (38.0 - 22.0) / p.thermal_resistance_c_per_w);
  for (Eigen::Index i = n / 2; i < n; ++i) {
    CHECK(run.indoor_temp[i] >= 24.0 - p.deadband_c - swing);
    CHECK(run.indoor_temp[i] <= 24.0 + p.deadband_c + 0.5);
  }
  // realized actuation is bang-bang
  for (Eigen::Index i = 0; i < n; ++i)
    CHECK((run.q_ac[i] == 0.0 || run.q_ac[i] == -p.hvac_max_cooling_w));
  CHECK(run.total_energy_wh > 0.0);
}
