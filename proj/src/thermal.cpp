#include "hvacctl/thermal.hpp"

#include <cmath>

namespace hvacctl {

namespace {

void check_step_inputs(const SimulationState& state, const ZoneThermalParams& params,
                       double outdoor_temp_c, int occupants, double q_ac_w, double dt_s) {
  params.validate();
  if (occupants < 0) throw std::invalid_argument("occupants must be >= 0");
  if (!(dt_s > 0)) throw std::invalid_argument("dt must be > 0");
  if (!std::isfinite(state.indoor_temp_c) || !std::isfinite(outdoor_temp_c) ||
      !std::isfinite(q_ac_w))
    throw std::invalid_argument("non-finite step input");
  if (q_ac_w > 0) throw std::invalid_argument("heating is not supported (Q_AC must be <= 0)");
  if (-q_ac_w > params.hvac_max_cooling_w * (1 + 1e-12))
    throw std::invalid_argument("|Q_AC| exceeds Q_max");
}

double energy_increment_wh(double q_ac_w, double dt_s, const ZoneThermalParams& params) {
  return std::abs(q_ac_w) * dt_s / (3600.0 * params.cop);
}

}  // namespace

double occupant_heat_gain(int occupants, const ZoneThermalParams& params) {
  if (occupants < 0) throw std::invalid_argument("occupants must be >= 0");
  return params.occupant_heat_w * static_cast<double>(occupants);
}

SimulationState step_euler(const SimulationState& state, const ZoneThermalParams& params,
                           double outdoor_temp_c, int occupants, double q_ac_w, double dt_s) {
  check_step_inputs(state, params, outdoor_temp_c, occupants, q_ac_w, dt_s);
  if (dt_s >= 2.0 * params.time_constant_s())
    throw std::invalid_argument("dt violates the explicit-Euler stability bound 2*R_r*C_r");
  const double flux_w = (outdoor_temp_c - state.indoor_temp_c) / params.thermal_resistance_c_per_w +
                        q_ac_w + occupant_heat_gain(occupants, params);
  SimulationState next = state;
  next.indoor_temp_c = state.indoor_temp_c + dt_s / params.heat_capacity_j_per_c * flux_w;
  next.cumulative_energy_wh = state.cumulative_energy_wh + energy_increment_wh(q_ac_w, dt_s, params);
  next.clock = state.clock + static_cast<std::int64_t>(dt_s);
  next.hvac_on = q_ac_w < 0;
  return next;
}

SimulationState step_exact(const SimulationState& state, const ZoneThermalParams& params,
                           double outdoor_temp_c, int occupants, double q_ac_w, double dt_s) {
  check_step_inputs(state, params, outdoor_temp_c, occupants, q_ac_w, dt_s);
  const double t_eq = outdoor_temp_c + params.thermal_resistance_c_per_w *
                                           (q_ac_w + occupant_heat_gain(occupants, params));
  SimulationState next = state;
  next.indoor_temp_c = t_eq + (state.indoor_temp_c - t_eq) * std::exp(-dt_s / params.time_constant_s());
  next.cumulative_energy_wh = state.cumulative_energy_wh + energy_increment_wh(q_ac_w, dt_s, params);
  next.clock = state.clock + static_cast<std::int64_t>(dt_s);
  next.hvac_on = q_ac_w < 0;
  return next;
}

namespace {

SimulationState do_step(const SimulationState& state, const ZoneThermalParams& params,
                        double t_o, int occupants, double q_ac, double dt, StepMethod method) {
  return method == StepMethod::kEuler
             ? step_euler(state, params, t_o, occupants, q_ac, dt)
             : step_exact(state, params, t_o, occupants, q_ac, dt);
}

}  // namespace

SimulationResult simulate(const ZoneThermalParams& params, double initial_temp_c,
                          const TimeSeries& weather, const TimeSeries& occupancy,
                          const TimeSeries& hvac_plan, StepMethod method) {
  if (!weather.aligned_with(occupancy) || !weather.aligned_with(hvac_plan))
    throw std::invalid_argument("simulate: input traces are not aligned");
  const double dt = static_cast<double>(weather.step());
  SimulationState state;
  state.indoor_temp_c = initial_temp_c;
  Eigen::VectorXd trace(weather.size());
  for (Eigen::Index i = 0; i < weather.size(); ++i) {
    state = do_step(state, params, weather[i], static_cast<int>(std::lround(occupancy[i])),
                    hvac_plan[i], dt, method);
    trace[i] = state.indoor_temp_c;
  }
  return SimulationResult{TimeSeries(weather.start_time(), weather.step(), std::move(trace)),
                          state.cumulative_energy_wh};
}

ThermostatRunResult simulate_with_thermostat(const ZoneThermalParams& params,
                                             double initial_temp_c,
                                             const TimeSeries& weather,
                                             const TimeSeries& occupancy,
                                             const TimeSeries& setpoints,
                                             StepMethod method) {
  if (!weather.aligned_with(occupancy) || !weather.aligned_with(setpoints))
    throw std::invalid_argument("simulate_with_thermostat: input traces are not aligned");
  const double dt = static_cast<double>(weather.step());
  SimulationState state;
  state.indoor_temp_c = initial_temp_c;
  Thermostat thermostat;
  Eigen::VectorXd trace(weather.size());
  Eigen::VectorXd plan(weather.size());
  for (Eigen::Index i = 0; i < weather.size(); ++i) {
    const double q_ac = thermostat.actuate(state.indoor_temp_c, setpoints[i], params);
    state = do_step(state, params, weather[i], static_cast<int>(std::lround(occupancy[i])),
                    q_ac, dt, method);
    trace[i] = state.indoor_temp_c;
    plan[i] = q_ac;
  }
  return ThermostatRunResult{
      TimeSeries(weather.start_time(), weather.step(), std::move(trace)),
      TimeSeries(weather.start_time(), weather.step(), std::move(plan)),
      state.cumulative_energy_wh};
}

}  // namespace hvacctl
