#pragma once

#include <functional>
#include <optional>

#include "hvacctl/thermal.hpp"
#include "hvacctl/time_series.hpp"

namespace hvacctl {

/// Finite-horizon cooling-plan optimization instance over predicted
/// occupancy, outdoor temperature, and humidity traces.
struct ControlProblem {
  ZoneThermalParams params;
  TimeSeries occupancy = TimeSeries::constant(0, 1, 1, 0.0);  // predicted
  TimeSeries weather = TimeSeries::constant(0, 1, 1, 0.0);    // predicted outdoor temperature
  TimeSeries humidity = TimeSeries::constant(0, 1, 1, 50.0);  // predicted relative humidity, %
  std::function<std::pair<double, double>(double humidity)> comfort_band;  // (lower, upper) C
  double initial_temp_c = 25.0;
  int action_levels = 5;       // Q_AC grid {0, -Q_max/(L-1), ..., -Q_max}
  double temp_bin_c = 0.05;    // DP state quantization
  int max_horizon_steps = 288;

  void validate() const;
};

struct PenaltyWeights {
  double rho_overheat = 1000.0;  // per C-step above the band
  double rho_overcool = 1000.0;  // per C-step below the band
};

/// Energy consumption plus weighted comfort-band violations of the
/// simulated plan. Violation terms accrue at every step.
double penalty_alpha(const TimeSeries& plan, const ControlProblem& problem,
                     const PenaltyWeights& weights);

struct PlanResult {
  TimeSeries plan;
  double objective = 0.0;  // penalty_alpha of the plan
  bool feasible = true;    // comfort band satisfiable at every occupied step
  std::optional<Eigen::Index> first_violation;  // set when infeasible
};

/// Dynamic program over the discretized action grid. Occupied steps whose
/// temperature leaves the comfort band carry infinite cost; among feasible
/// plans the energy-plus-penalty objective is minimized. States are merged
/// by quantized temperature only when the reachable set grows large, so
/// small instances are solved exactly.
PlanResult solve_mpc(const ControlProblem& problem, const PenaltyWeights& weights);

/// Myopic baseline: at each step, the smallest-energy action keeping the
/// next-step temperature inside the band when occupied; full cooling when
/// no action suffices. Violations are priced by alpha, never rejected.
PlanResult solve_ahc(const ControlProblem& problem, const PenaltyWeights& weights);

enum class Strategy { kMpc, kAhc, kOlc };

Strategy strategy_from_name(const std::string& name);

/// Dispatch by strategy name. OLC is reserved but unimplemented.
PlanResult solve(Strategy strategy, const ControlProblem& problem,
                 const PenaltyWeights& weights);

/// Scores a realized actuation trace (e.g. a setpoint controller's run)
/// under the same penalty.
double score_controller(const TimeSeries& realized_q_ac, const ControlProblem& problem,
                        const PenaltyWeights& weights);

}  // namespace hvacctl
