#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hvacctl/comfort.hpp"
#include "hvacctl/cosim.hpp"
#include "hvacctl/counter.hpp"
#include "hvacctl/forecast.hpp"
#include "hvacctl/mpc.hpp"
#include "hvacctl/strategy.hpp"
#include "hvacctl/thermal.hpp"
#include "hvacctl/time_series.hpp"

namespace hvacctl {

struct GeneratorKnobs {
  std::int64_t ramp_s = 45 * 60;    // arrival ramp before each event
  std::int64_t decay_s = 10 * 60;   // departure decay after each event
  double friday_scale = 4.0;        // Friday midday attendance multiplier
  double peak_fraction = 0.1;       // mean peak attendance as fraction of capacity
  double peak_noise = 0.1;          // multiplicative peak spread, U[1-x, 1+x]
  double sparse_noise_rate = 0.01;  // per-sample chance of a stray visitor
};

/// Builds an event schedule of daily occurrences (offsets are seconds of
/// day) spanning [start, start + days), with an optional slow drift of the
/// event times across the year.
EventSchedule build_schedule(std::int64_t start_time, int days,
                             const std::vector<std::int64_t>& daily_offsets_s,
                             double capacity, double drift_s_per_day = 0.0);

struct MosqueData {
  TimeSeries occupancy;
  std::vector<CrossingEvent> events;
};

/// Seeded synthetic occupancy: a triangular arrival ramp before each
/// scheduled event, fast decay after, the Friday midday event scaled up,
/// sparse noise between events. The emitted crossing-event stream replays
/// through the counter to the exact same trace.
MosqueData generate_mosque_scenario(std::uint64_t seed, int days, const EventSchedule& schedule,
                                    std::int64_t start_time, std::int64_t dt_s,
                                    const GeneratorKnobs& knobs = {});

/// Hot-climate outdoor-temperature sinusoid (28-42 C, coolest pre-dawn).
TimeSeries generate_weather(std::int64_t start_time, std::int64_t dt_s, Eigen::Index length);
/// Relative-humidity sinusoid (50-70 %).
TimeSeries generate_humidity(std::int64_t start_time, std::int64_t dt_s, Eigen::Index length);

enum class ControllerKind { kBaseline, kHvacMpc };
enum class ForecasterKind { kModel, kPerfect };
enum class Transport { kInProcess, kSocket };

struct Scenario {
  ZoneThermalParams params;
  SetpointPolicy policy;
  PenaltyWeights weights;
  ComfortConditions comfort_assumptions;  // temps and humidity filled per step
  GeneratorKnobs knobs;
  std::uint64_t seed = 7;
  int days = 7;            // controlled run length
  int train_days = 49;     // forecaster training history before the run
  double capacity = 500.0;
  std::vector<std::int64_t> daily_event_offsets_s;  // default: five prayers
  double drift_s_per_day = 120.0;
  std::int64_t dt_s = 600;
  std::int64_t start_time = 1736121600;  // a Monday, UTC
  ControllerKind controller = ControllerKind::kHvacMpc;
  ForecasterKind forecaster = ForecasterKind::kModel;
  double onset_threshold = 0.05;
  double initial_temp_c = 30.0;
  int action_levels = 5;

  Eigen::Index duration_steps() const { return days * 86400 / dt_s; }
};

Scenario reference_scenario();
Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& scenario);

struct ScenarioReport {
  double total_energy_wh = 0.0;
  std::vector<double> per_day_energy_wh;
  bool has_baseline = false;
  double baseline_energy_wh = 0.0;
  double savings_pct = 0.0;  // (E_base - E_ctrl) / E_base * 100
  Eigen::Index occupied_steps = 0;
  double occupied_comfort_fraction = 0.0;  // |PMV| <= 0.5 while occupied
  double mean_ppd_occupied = 0.0;
  double alpha = 0.0;
  TimeSeries indoor_temp = TimeSeries::constant(0, 1, 1, 0.0);
  TimeSeries setpoints = TimeSeries::constant(0, 1, 1, 0.0);
  std::vector<DecisionLogEntry> decisions;
};

std::string report_to_json(const ScenarioReport& report);

/// Runs the scenario's controller against the simulator, in process or
/// over the wire protocol; when the controller is HVAC-MPC a paired
/// always-on baseline runs on identical inputs for the savings figure.
ScenarioReport run_scenario(const Scenario& scenario, Transport transport = Transport::kInProcess);

}  // namespace hvacctl
