#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hvacctl/thermal.hpp"
#include "hvacctl/time_series.hpp"

namespace hvacctl {

/// Coefficient of variation of the RMS residual between a measured and a
/// simulated indoor-temperature trace, normalized by the measured mean.
double cvrmse(const TimeSeries& measured, const TimeSeries& simulated);

/// Mean bias error: signed residual sum normalized by the measured sum.
/// Subject to sign cancellation; reported, never optimized.
double mbe(const TimeSeries& measured, const TimeSeries& simulated);

struct CalibrationParameter {
  std::string name;  // one of C_r, R_r, Q_max, cop, q_person
  double lower = 0.0;
  double upper = 0.0;
  double value = 0.0;  // incumbent
};

struct CalibrationSpace {
  std::vector<CalibrationParameter> parameters;
  int candidates_per_sweep = 11;  // uniform grid size, incumbent always added
  double threshold = 0.02;        // CVRMSE acceptance fraction
  int max_rounds = 20;

  void validate() const;
};

/// Fixed scenario the calibration replays for every candidate.
struct CalibrationScenario {
  ZoneThermalParams base;
  double initial_temp_c = 25.0;
  TimeSeries weather = TimeSeries::constant(0, 1, 1, 0.0);
  TimeSeries occupancy = TimeSeries::constant(0, 1, 1, 0.0);
  TimeSeries hvac_plan = TimeSeries::constant(0, 1, 1, 0.0);
  StepMethod method = StepMethod::kEuler;
};

/// Applies named parameter overrides onto a copy of the base params.
ZoneThermalParams apply_parameters(const ZoneThermalParams& base,
                                   const std::vector<CalibrationParameter>& parameters);

/// One co-simulation: simulate the scenario under the given parameter
/// vector and score it against the measured trace.
double evaluate_candidate(const CalibrationScenario& scenario,
                          const std::vector<CalibrationParameter>& parameters,
                          const TimeSeries& measured);

struct SweepOutcome {
  double best_value = 0.0;
  double best_error = 0.0;
  int simulations = 0;
};

/// Grid sweep of parameter k with all others held at their incumbents.
/// Ties break toward the candidate closest to the incumbent, then toward
/// the smaller value. The incumbent is always on the grid.
SweepOutcome sweep_parameter(std::size_t k, const CalibrationSpace& space,
                             const CalibrationScenario& scenario,
                             const TimeSeries& measured);

struct CalibrationResult {
  std::vector<CalibrationParameter> parameters;  // calibrated values
  double final_cvrmse = 0.0;
  double final_mbe = 0.0;
  int rounds = 0;
  int cosim_count = 0;
  bool converged = false;
  std::vector<double> round_errors;  // committed-configuration CVRMSE per round
};

/// Cyclic coordinate-descent calibration: sweep every parameter, jointly
/// commit the per-parameter argmins, re-check the error, repeat until the
/// threshold is met or rounds are exhausted.
CalibrationResult calibrate(const CalibrationSpace& space,
                            const CalibrationScenario& scenario,
                            const TimeSeries& measured);

}  // namespace hvacctl
