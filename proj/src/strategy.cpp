#include "hvacctl/strategy.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

namespace hvacctl {

void ControlProblem::validate() const {
  params.validate();
  if (!occupancy.aligned_with(weather) || !occupancy.aligned_with(humidity))
    throw std::invalid_argument("control problem: traces are not aligned");
  if (!comfort_band) throw std::invalid_argument("control problem: no comfort band");
  if (action_levels < 2) throw std::invalid_argument("control problem: need >= 2 action levels");
  if (!(temp_bin_c > 0)) throw std::invalid_argument("control problem: bad temperature bin");
}

namespace {

struct StepContext {
  double dt;
  double lower, upper;
  int occupants;
  double t_o;
};

StepContext context_at(const ControlProblem& problem, Eigen::Index i) {
  StepContext ctx;
  ctx.dt = static_cast<double>(problem.weather.step());
  const auto band = problem.comfort_band(problem.humidity[i]);
  ctx.lower = band.first;
  ctx.upper = band.second;
  ctx.occupants = static_cast<int>(std::lround(problem.occupancy[i]));
  ctx.t_o = problem.weather[i];
  return ctx;
}

double step_temp(const ControlProblem& problem, const StepContext& ctx, double ti, double q_ac) {
  SimulationState state;
  state.indoor_temp_c = ti;
  return step_euler(state, problem.params, ctx.t_o, ctx.occupants, q_ac, ctx.dt).indoor_temp_c;
}

double step_cost(const ControlProblem& problem, const PenaltyWeights& weights,
                 const StepContext& ctx, double next_ti, double q_ac) {
  const double energy = std::abs(q_ac) * ctx.dt / (3600.0 * problem.params.cop);
  const double overheat = next_ti > ctx.upper ? next_ti - ctx.upper : 0.0;
  const double overcool = next_ti < ctx.lower ? ctx.lower - next_ti : 0.0;
  return energy + weights.rho_overheat * overheat + weights.rho_overcool * overcool;
}

std::vector<double> action_grid(const ControlProblem& problem) {
  std::vector<double> actions;
  for (int j = 0; j < problem.action_levels; ++j)
    actions.push_back(-problem.params.hvac_max_cooling_w * j / (problem.action_levels - 1));
  return actions;
}

}  // namespace

double penalty_alpha(const TimeSeries& plan, const ControlProblem& problem,
                     const PenaltyWeights& weights) {
  problem.validate();
  if (!plan.aligned_with(problem.weather))
    throw std::invalid_argument("penalty_alpha: plan is not aligned with the horizon");
  double total = 0.0;
  double ti = problem.initial_temp_c;
  for (Eigen::Index i = 0; i < plan.size(); ++i) {
    const StepContext ctx = context_at(problem, i);
    ti = step_temp(problem, ctx, ti, plan[i]);
    total += step_cost(problem, weights, ctx, ti, plan[i]);
  }
  return total;
}

PlanResult solve_mpc(const ControlProblem& problem, const PenaltyWeights& weights) {
  problem.validate();
  const Eigen::Index horizon = problem.occupancy.size();
  if (horizon > problem.max_horizon_steps)
    throw std::invalid_argument("solve_mpc: horizon exceeds the configured DP limit");
  const std::vector<double> actions = action_grid(problem);
  // Above this count, states within one temperature bin are merged (the
  // reachable set grows as levels^t otherwise).
  constexpr std::size_t kMergeThreshold = 4096;

  struct Node {
    double ti;
    double cost;
    std::int32_t parent;
    std::int8_t action;
  };
  std::vector<std::vector<Node>> layers(static_cast<std::size_t>(horizon) + 1);
  layers[0].push_back(Node{problem.initial_temp_c, 0.0, -1, -1});

  for (Eigen::Index i = 0; i < horizon; ++i) {
    const StepContext ctx = context_at(problem, i);
    const bool occupied = ctx.occupants > 0;
    auto& next = layers[static_cast<std::size_t>(i) + 1];
    const auto& prev = layers[static_cast<std::size_t>(i)];
    for (std::size_t s = 0; s < prev.size(); ++s) {
      for (std::size_t a = 0; a < actions.size(); ++a) {
        const double next_ti = step_temp(problem, ctx, prev[s].ti, actions[a]);
        if (occupied && (next_ti < ctx.lower || next_ti > ctx.upper)) continue;
        const double cost = prev[s].cost + step_cost(problem, weights, ctx, next_ti, actions[a]);
        next.push_back(Node{next_ti, cost, static_cast<std::int32_t>(s),
                            static_cast<std::int8_t>(a)});
      }
    }
    if (next.empty()) {
      PlanResult result{TimeSeries::constant(problem.weather.start_time(),
                                             problem.weather.step(), horizon, 0.0),
                        std::numeric_limits<double>::infinity(), false, i};
      return result;
    }
    if (next.size() > kMergeThreshold) {
      std::unordered_map<std::int64_t, std::size_t> best;
      std::vector<Node> merged;
      for (const Node& node : next) {
        const std::int64_t bin = std::llround(node.ti / problem.temp_bin_c);
        auto it = best.find(bin);
        if (it == best.end()) {
          best.emplace(bin, merged.size());
          merged.push_back(node);
        } else {
          Node& kept = merged[it->second];
          if (node.cost < kept.cost || (node.cost == kept.cost && node.ti < kept.ti))
            kept = node;
        }
      }
      next = std::move(merged);
    }
  }

  // Backtrack the cheapest terminal state.
  const auto& last = layers[static_cast<std::size_t>(horizon)];
  std::size_t best = 0;
  for (std::size_t s = 1; s < last.size(); ++s)
    if (last[s].cost < last[best].cost) best = s;

  Eigen::VectorXd plan(horizon);
  std::int32_t idx = static_cast<std::int32_t>(best);
  for (Eigen::Index i = horizon; i > 0; --i) {
    const Node& node = layers[static_cast<std::size_t>(i)][static_cast<std::size_t>(idx)];
    plan[i - 1] = actions[static_cast<std::size_t>(node.action)];
    idx = node.parent;
  }
  TimeSeries plan_series(problem.weather.start_time(), problem.weather.step(), std::move(plan));
  const double objective = penalty_alpha(plan_series, problem, weights);
  return PlanResult{std::move(plan_series), objective, true, std::nullopt};
}

PlanResult solve_ahc(const ControlProblem& problem, const PenaltyWeights& weights) {
  problem.validate();
  const Eigen::Index horizon = problem.occupancy.size();
  const std::vector<double> actions = action_grid(problem);
  Eigen::VectorXd plan(horizon);
  double ti = problem.initial_temp_c;
  for (Eigen::Index i = 0; i < horizon; ++i) {
    const StepContext ctx = context_at(problem, i);
    double chosen = 0.0;
    if (ctx.occupants > 0) {
      chosen = actions.back();  // full cooling fallback
      for (double q : actions) {  // ascending energy
        const double next_ti = step_temp(problem, ctx, ti, q);
        if (next_ti >= ctx.lower && next_ti <= ctx.upper) {
          chosen = q;
          break;
        }
      }
    }
    ti = step_temp(problem, ctx, ti, chosen);
    plan[i] = chosen;
  }
  TimeSeries plan_series(problem.weather.start_time(), problem.weather.step(), std::move(plan));
  const double objective = penalty_alpha(plan_series, problem, weights);
  return PlanResult{std::move(plan_series), objective, true, std::nullopt};
}

Strategy strategy_from_name(const std::string& name) {
  if (name == "mpc") return Strategy::kMpc;
  if (name == "ahc") return Strategy::kAhc;
  if (name == "olc") return Strategy::kOlc;
  throw std::invalid_argument("unknown strategy: " + name);
}

PlanResult solve(Strategy strategy, const ControlProblem& problem,
                 const PenaltyWeights& weights) {
  switch (strategy) {
    case Strategy::kMpc: return solve_mpc(problem, weights);
    case Strategy::kAhc: return solve_ahc(problem, weights);
    case Strategy::kOlc:
      throw std::logic_error("OLC strategy is unimplemented");
  }
  throw std::invalid_argument("unknown strategy");
}

double score_controller(const TimeSeries& realized_q_ac, const ControlProblem& problem,
                        const PenaltyWeights& weights) {
  if (realized_q_ac.size() == 0) return 0.0;
  return penalty_alpha(realized_q_ac, problem, weights);
}

}  // namespace hvacctl
