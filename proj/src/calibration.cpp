#include "hvacctl/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hvacctl {

namespace {

void check_pair(const TimeSeries& measured, const TimeSeries& simulated) {
  if (!measured.aligned_with(simulated))
    throw std::invalid_argument("metric: traces are not aligned");
}

}  // namespace

double cvrmse(const TimeSeries& measured, const TimeSeries& simulated) {
  check_pair(measured, simulated);
  const double m = static_cast<double>(measured.size());
  const double mean = measured.values().mean();
  if (mean == 0.0) throw std::invalid_argument("cvrmse: measured trace has zero mean");
  const double rmse = std::sqrt((measured.values() - simulated.values()).squaredNorm() / m);
  return rmse / mean;
}

double mbe(const TimeSeries& measured, const TimeSeries& simulated) {
  check_pair(measured, simulated);
  const double denom = measured.values().sum();
  if (denom == 0.0) throw std::invalid_argument("mbe: measured trace sums to zero");
  return (measured.values() - simulated.values()).sum() / denom;
}

void CalibrationSpace::validate() const {
  if (parameters.empty()) throw std::invalid_argument("calibration: no parameters");
  for (const auto& p : parameters) {
    static const char* known[] = {"C_r", "R_r", "Q_max", "cop", "q_person"};
    if (std::find(std::begin(known), std::end(known), p.name) == std::end(known))
      throw std::invalid_argument("unknown calibration parameter: " + p.name);
    if (!(p.lower < p.upper))
      throw std::invalid_argument("calibration: bad bounds for " + p.name);
    if (p.value < p.lower || p.value > p.upper)
      throw std::invalid_argument("calibration: incumbent out of bounds for " + p.name);
  }
  if (candidates_per_sweep < 2)
    throw std::invalid_argument("calibration: need at least 2 candidates");
  if (!(threshold > 0.0 && threshold < 1.0) && threshold != 1.0)
    throw std::invalid_argument("calibration: threshold must be in (0, 1]");
  if (max_rounds < 1) throw std::invalid_argument("calibration: max_rounds must be >= 1");
}

ZoneThermalParams apply_parameters(const ZoneThermalParams& base,
                                   const std::vector<CalibrationParameter>& parameters) {
  ZoneThermalParams out = base;
  for (const auto& p : parameters) {
    if (p.name == "C_r") out.heat_capacity_j_per_c = p.value;
    else if (p.name == "R_r") out.thermal_resistance_c_per_w = p.value;
    else if (p.name == "Q_max") out.hvac_max_cooling_w = p.value;
    else if (p.name == "cop") out.cop = p.value;
    else if (p.name == "q_person") out.occupant_heat_w = p.value;
    else throw std::invalid_argument("unknown calibration parameter: " + p.name);
  }
  return out;
}

double evaluate_candidate(const CalibrationScenario& scenario,
                          const std::vector<CalibrationParameter>& parameters,
                          const TimeSeries& measured) {
  const ZoneThermalParams params = apply_parameters(scenario.base, parameters);
  const SimulationResult sim = simulate(params, scenario.initial_temp_c, scenario.weather,
                                        scenario.occupancy, scenario.hvac_plan, scenario.method);
  return cvrmse(measured, sim.indoor_temp);
}

SweepOutcome sweep_parameter(std::size_t k, const CalibrationSpace& space,
                             const CalibrationScenario& scenario,
                             const TimeSeries& measured) {
  space.validate();
  if (k >= space.parameters.size())
    throw std::out_of_range("sweep_parameter: index out of range");
  const CalibrationParameter& target = space.parameters[k];

  std::vector<double> candidates;
  const int n = space.candidates_per_sweep;
  for (int i = 0; i < n; ++i)
    candidates.push_back(target.lower + (target.upper - target.lower) * i / (n - 1));
  if (std::find(candidates.begin(), candidates.end(), target.value) == candidates.end())
    candidates.push_back(target.value);

  SweepOutcome out;
  out.best_error = std::numeric_limits<double>::infinity();
  std::vector<CalibrationParameter> trial = space.parameters;
  for (double candidate : candidates) {
    trial[k].value = candidate;
    const double err = evaluate_candidate(scenario, trial, measured);
    ++out.simulations;
    const bool better =
        err < out.best_error ||
        (err == out.best_error &&
         (std::abs(candidate - target.value) < std::abs(out.best_value - target.value) ||
          (std::abs(candidate - target.value) == std::abs(out.best_value - target.value) &&
           candidate < out.best_value)));
    if (better) {
      out.best_error = err;
      out.best_value = candidate;
    }
  }
  return out;
}

CalibrationResult calibrate(const CalibrationSpace& space,
                            const CalibrationScenario& scenario,
                            const TimeSeries& measured) {
  space.validate();
  CalibrationResult result;
  result.parameters = space.parameters;

  CalibrationSpace working = space;
  double incumbent_error = evaluate_candidate(scenario, working.parameters, measured);
  ++result.cosim_count;

  // Per the flowchart the threshold is only checked after a full sweep and
  // commit, so at least one round always runs.
  for (int round = 0; round < space.max_rounds; ++round) {
    ++result.rounds;

    std::vector<SweepOutcome> sweeps;
    for (std::size_t k = 0; k < working.parameters.size(); ++k) {
      sweeps.push_back(sweep_parameter(k, working, scenario, measured));
      result.cosim_count += sweeps.back().simulations;
    }

    std::vector<CalibrationParameter> committed = working.parameters;
    for (std::size_t k = 0; k < committed.size(); ++k)
      committed[k].value = sweeps[k].best_value;
    double committed_error = evaluate_candidate(scenario, committed, measured);
    ++result.cosim_count;

    if (committed_error > incumbent_error) {
      // Joint commit of per-coordinate argmins worsened the fit; fall back
      // to the single best coordinate move, whose error was already
      // evaluated during the sweep and cannot exceed the incumbent's.
      std::size_t best_k = 0;
      for (std::size_t k = 1; k < sweeps.size(); ++k)
        if (sweeps[k].best_error < sweeps[best_k].best_error) best_k = k;
      committed = working.parameters;
      committed[best_k].value = sweeps[best_k].best_value;
      committed_error = sweeps[best_k].best_error;
    }

    working.parameters = committed;
    incumbent_error = committed_error;
    result.round_errors.push_back(incumbent_error);
    if (incumbent_error < space.threshold) {
      result.converged = true;
      break;
    }
  }
  if (incumbent_error < space.threshold) result.converged = true;

  result.parameters = working.parameters;
  result.final_cvrmse = incumbent_error;
  ZoneThermalParams final_params = apply_parameters(scenario.base, working.parameters);
  const SimulationResult sim =
      simulate(final_params, scenario.initial_temp_c, scenario.weather, scenario.occupancy,
               scenario.hvac_plan, scenario.method);
  result.final_mbe = mbe(measured, sim.indoor_temp);
  return result;
}

}  // namespace hvacctl
