#include "hvacctl/mpc.hpp"

#include <cmath>

namespace hvacctl {

namespace {

/// Simulates the pre-cool probe: HVAC off before the start index, full
/// cooling from it, empty building throughout. Returns the temperature at
/// the predicted onset.
double probe_terminal_temp(std::int64_t t_now, std::int64_t start, std::int64_t t_pd_oc,
                           double temp_now_c, const ZoneThermalParams& params,
                           const TimeSeries& weather_forecast) {
  const std::int64_t dt = weather_forecast.step();
  SimulationState state;
  state.indoor_temp_c = temp_now_c;
  for (std::int64_t t = t_now; t < t_pd_oc; t += dt) {
    const double q_ac = t >= start ? -params.hvac_max_cooling_w : 0.0;
    state = step_euler(state, params, weather_forecast.value_at(t), 0, q_ac,
                       static_cast<double>(dt));
  }
  return state.indoor_temp_c;
}

}  // namespace

PrecoolResult precool_start(std::int64_t t_now, std::int64_t t_pd_oc, double temp_now_c,
                            const ZoneThermalParams& params, const TimeSeries& weather_forecast,
                            const SetpointPolicy& policy) {
  params.validate();
  policy.validate();
  if (t_pd_oc <= t_now) throw std::invalid_argument("precool_start: empty horizon");
  const std::int64_t dt = weather_forecast.step();
  const std::int64_t n = (t_pd_oc - t_now) / dt;  // candidate starts t_now + k*dt, k in [0, n]

  PrecoolResult result;
  auto feasible = [&](std::int64_t k) {
    ++result.simulations;
    return probe_terminal_temp(t_now, t_now + k * dt, t_pd_oc, temp_now_c, params,
                               weather_forecast) <= policy.setpoint_occupied_c;
  };

  // Latest feasible start; starting earlier never warms the terminal
  // temperature, so feasibility is monotone in k.
  std::int64_t lo = 0, hi = n;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo + 1) / 2;
    if (feasible(mid)) lo = mid;
    else hi = mid - 1;
  }
  // lo == 0 covers both the feasible case and the best-effort fallback.
  result.start_time = t_now + lo * dt;
  return result;
}

TickResult controller_tick(const ControllerState& state, std::int64_t t_now, int occupancy_now,
                           double temp_now_c, const OnsetForecaster& forecaster,
                           const TimeSeries& weather_forecast, const SetpointPolicy& policy,
                           const ZoneThermalParams& params) {
  policy.validate();
  TickResult result;
  result.state = state;
  auto log = [&](const std::string& event, const std::string& detail) {
    result.log.push_back(DecisionLogEntry{t_now, event, detail});
  };

  if (occupancy_now > 0) {
    if (state.current_target_c != policy.setpoint_occupied_c)
      log("occupied", state.timer || state.precool_deadline ? "predicted onset arrived"
                                                            : "unpredicted occupancy, reactive");
    result.state.timer.reset();
    result.state.precool_deadline.reset();
    result.state.current_target_c = policy.setpoint_occupied_c;
  } else if (state.timer && t_now >= *state.timer) {
    result.state.current_target_c = policy.setpoint_occupied_c;
    result.state.timer.reset();
    log("precool_start", "timer expired");
  } else if (!state.timer &&
             (!state.precool_deadline || t_now > *state.precool_deadline)) {
    // Building just emptied (or a predicted onset never materialized):
    // raise the setpoint and schedule the next pre-cool.
    result.state.current_target_c = policy.setpoint_unoccupied_c;
    result.state.precool_deadline.reset();
    const std::optional<std::int64_t> onset = forecaster(t_now);
    if (onset && *onset > t_now) {
      const PrecoolResult plan =
          precool_start(t_now, *onset, temp_now_c, params, weather_forecast, policy);
      result.state.precool_deadline = *onset;
      if (plan.start_time <= t_now) {
        result.state.current_target_c = policy.setpoint_occupied_c;
        log("precool_start", "immediate start for onset at " + format_iso8601(*onset));
      } else {
        result.state.timer = plan.start_time;
        log("precool_scheduled", "start " + format_iso8601(plan.start_time) + " for onset " +
                                     format_iso8601(*onset));
      }
    } else if (state.current_target_c != policy.setpoint_unoccupied_c) {
      log("unoccupied", "no predicted occupancy in horizon");
    }
  }
  // Otherwise: waiting for the timer, or pre-cooling toward the deadline.

  result.setpoint_c = result.state.current_target_c;
  return result;
}

}  // namespace hvacctl
