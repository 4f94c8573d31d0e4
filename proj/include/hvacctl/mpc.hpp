#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hvacctl/thermal.hpp"

namespace hvacctl {

struct SetpointPolicy {
  double setpoint_occupied_c = 24.0;
  double setpoint_unoccupied_c = 28.0;

  void validate() const {
    if (!(setpoint_occupied_c < setpoint_unoccupied_c))
      throw std::invalid_argument("occupied setpoint must be below unoccupied setpoint");
  }
};

struct PrecoolResult {
  std::int64_t start_time = 0;
  int simulations = 0;  // bisection probes
};

/// Latest pre-cooling start in [t_now, t_pd_oc] such that full cooling
/// from the start time brings the zone to the occupied setpoint by
/// t_pd_oc, found by binary search over the step grid. Returns t_pd_oc
/// when no cooling is needed and t_now when even the earliest start cannot
/// make it (best effort). The weather forecast must cover the window.
PrecoolResult precool_start(std::int64_t t_now, std::int64_t t_pd_oc, double temp_now_c,
                            const ZoneThermalParams& params, const TimeSeries& weather_forecast,
                            const SetpointPolicy& policy);

/// Occupancy-onset prediction consumed by the controller.
using OnsetForecaster = std::function<std::optional<std::int64_t>(std::int64_t t_now)>;

struct DecisionLogEntry {
  std::int64_t timestamp = 0;
  std::string event;
  std::string detail;
};

struct ControllerState {
  std::optional<std::int64_t> timer;  // pending pre-cool start
  double current_target_c = 24.0;
  std::optional<std::int64_t> precool_deadline;  // predicted onset the timer serves
};

struct TickResult {
  ControllerState state;
  double setpoint_c = 0.0;
  std::vector<DecisionLogEntry> log;
};

/// One controller step: raise the setpoint when the building empties and
/// schedule pre-cooling for the predicted onset; lower it when the timer
/// fires or occupancy reappears unpredicted.
TickResult controller_tick(const ControllerState& state, std::int64_t t_now, int occupancy_now,
                           double temp_now_c, const OnsetForecaster& forecaster,
                           const TimeSeries& weather_forecast, const SetpointPolicy& policy,
                           const ZoneThermalParams& params);

}  // namespace hvacctl
