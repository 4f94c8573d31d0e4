#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "hvacctl/time_series.hpp"

namespace hvacctl {

/// Single-zone RC model constants plus the cooling plant.
/// Q_AC is signed heat flow into the zone; the plant is cooling-only,
/// so commanded values are in [-hvac_max_cooling_w, 0].
struct ZoneThermalParams {
  double heat_capacity_j_per_c = 1e7;      // C_r
  double thermal_resistance_c_per_w = 2e-3;  // R_r
  double hvac_max_cooling_w = 5e4;         // Q_max, positive magnitude
  double cop = 3.0;
  double occupant_heat_w = 100.0;          // per person
  double deadband_c = 0.5;

  double time_constant_s() const {
    return heat_capacity_j_per_c * thermal_resistance_c_per_w;
  }

  void validate() const {
    if (!(heat_capacity_j_per_c > 0)) throw std::invalid_argument("C_r must be > 0");
    if (!(thermal_resistance_c_per_w > 0)) throw std::invalid_argument("R_r must be > 0");
    if (!(hvac_max_cooling_w >= 0)) throw std::invalid_argument("Q_max must be >= 0");
    if (!(cop > 0)) throw std::invalid_argument("cop must be > 0");
    if (!(occupant_heat_w >= 0)) throw std::invalid_argument("q_person must be >= 0");
    if (!(deadband_c >= 0)) throw std::invalid_argument("deadband must be >= 0");
    if (!std::isfinite(time_constant_s()))
      throw std::invalid_argument("time constant must be finite");
  }
};

struct SimulationState {
  double indoor_temp_c = 25.0;
  double cumulative_energy_wh = 0.0;
  std::int64_t clock = 0;  // seconds since the run began
  bool hvac_on = false;
};

double occupant_heat_gain(int occupants, const ZoneThermalParams& params);

/// Explicit forward Euler step of the RC zone balance; RHS evaluated on
/// the pre-step state. dt must respect the stability bound dt < 2*R_r*C_r.
SimulationState step_euler(const SimulationState& state, const ZoneThermalParams& params,
                           double outdoor_temp_c, int occupants, double q_ac_w, double dt_s);

/// Closed-form exponential step with piecewise-constant inputs.
/// Verification oracle for step_euler.
SimulationState step_exact(const SimulationState& state, const ZoneThermalParams& params,
                           double outdoor_temp_c, int occupants, double q_ac_w, double dt_s);

enum class StepMethod { kEuler, kExact };

struct SimulationResult {
  TimeSeries indoor_temp;
  double total_energy_wh = 0.0;
};

/// Runs the zone against aligned outdoor-temperature, occupancy, and
/// HVAC-plan traces. Pure: identical inputs give bit-identical outputs.
SimulationResult simulate(const ZoneThermalParams& params, double initial_temp_c,
                          const TimeSeries& weather, const TimeSeries& occupancy,
                          const TimeSeries& hvac_plan, StepMethod method);

/// Cooling-only bang-bang thermostat with hysteresis around the setpoint.
class Thermostat {
 public:
  explicit Thermostat(bool compressor_on = false) : on_(compressor_on) {}

  /// Returns the Q_AC command for the coming step given the current
  /// indoor temperature and setpoint.
  double actuate(double indoor_temp_c, double setpoint_c, const ZoneThermalParams& params) {
    if (indoor_temp_c > setpoint_c + params.deadband_c) on_ = true;
    else if (indoor_temp_c < setpoint_c - params.deadband_c) on_ = false;
    return on_ ? -params.hvac_max_cooling_w : 0.0;
  }

  bool on() const { return on_; }

 private:
  bool on_;
};

struct ThermostatRunResult {
  TimeSeries indoor_temp;
  TimeSeries q_ac;       // realized actuation
  double total_energy_wh = 0.0;
};

/// Closed-loop run: thermostat tracks the per-step setpoint schedule.
ThermostatRunResult simulate_with_thermostat(const ZoneThermalParams& params,
                                             double initial_temp_c,
                                             const TimeSeries& weather,
                                             const TimeSeries& occupancy,
                                             const TimeSeries& setpoints,
                                             StepMethod method);

}  // namespace hvacctl
