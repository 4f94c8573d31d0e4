// hvacctl command-line front end: simulation, calibration, occupancy
// counting, forecasting, control runs, the co-sim endpoint, and synthetic
// data generation. Exit codes: 0 success, 1 input error, 2 internal error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hvacctl/calibration.hpp"
#include "hvacctl/comfort.hpp"
#include "hvacctl/cosim.hpp"
#include "hvacctl/counter.hpp"
#include "hvacctl/forecast.hpp"
#include "hvacctl/scenario.hpp"
#include "hvacctl/thermal.hpp"
#include "hvacctl/time_series.hpp"

using namespace hvacctl;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);
  out << text;
}

StepMethod method_from_name(const std::string& name) {
  if (name == "euler") return StepMethod::kEuler;
  if (name == "exact") return StepMethod::kExact;
  throw std::invalid_argument("unknown step method: " + name);
}

void emit_trace(const TimeSeries& trace, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << "timestamp,value\n";
    for (Eigen::Index i = 0; i < trace.size(); ++i)
      std::cout << format_iso8601(trace.time_at(i)) << "," << trace[i] << "\n";
  } else {
    save_trace_csv(trace, out_path);
  }
}

int cmd_simulate(const std::string& params_path, const std::string& weather_path,
                 const std::string& occupancy_path, const std::string& plan_path,
                 double initial_temp, const std::string& method, const std::string& out_path) {
  ZoneThermalParams params =
      params_path.empty() ? ZoneThermalParams{} : params_from_json_str(read_file(params_path));
  params.validate();
  TimeSeries weather = load_trace_csv(weather_path);
  TimeSeries occupancy = load_trace_csv(occupancy_path);
  TimeSeries plan = plan_path.empty()
                        ? TimeSeries::constant(weather.start_time(), weather.step(),
                                               weather.size(), 0.0)
                        : load_trace_csv(plan_path);
  SimulationResult result =
      simulate(params, initial_temp, weather, occupancy, plan, method_from_name(method));
  emit_trace(result.indoor_temp, out_path);
  if (!out_path.empty())
    std::cout << json{{"total_energy_wh", result.total_energy_wh}}.dump() << "\n";
  return 0;
}

int cmd_calibrate(const std::string& config_path, const std::string& measured_path,
                  const std::string& weather_path, const std::string& occupancy_path,
                  const std::string& plan_path, double initial_temp, const std::string& method) {
  const json config = json::parse(read_file(config_path));
  CalibrationSpace space;
  for (const auto& p : config.at("parameters"))
    space.parameters.push_back({p.at("name").get<std::string>(), p.at("lower").get<double>(),
                                p.at("upper").get<double>(), p.at("value").get<double>()});
  space.candidates_per_sweep = config.value("candidates_per_sweep", space.candidates_per_sweep);
  space.threshold = config.value("threshold", space.threshold);
  space.max_rounds = config.value("max_rounds", space.max_rounds);
  space.validate();

  CalibrationScenario scenario;
  if (config.contains("params"))
    scenario.base = params_from_json_str(config.at("params").dump());
  scenario.initial_temp_c = initial_temp;
  scenario.method = method_from_name(method);
  scenario.weather = load_trace_csv(weather_path);
  scenario.occupancy = load_trace_csv(occupancy_path);
  TimeSeries measured = load_trace_csv(measured_path);
  scenario.hvac_plan = plan_path.empty()
                           ? TimeSeries::constant(measured.start_time(), measured.step(),
                                                  measured.size(), 0.0)
                           : load_trace_csv(plan_path);

  CalibrationResult result = calibrate(space, scenario, measured);
  json out;
  for (const auto& p : result.parameters)
    out["parameters"].push_back({{"name", p.name}, {"value", p.value}});
  out["final_cvrmse"] = result.final_cvrmse;
  out["final_mbe"] = result.final_mbe;
  out["rounds"] = result.rounds;
  out["cosim_count"] = result.cosim_count;
  out["converged"] = result.converged;
  out["round_errors"] = result.round_errors;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_count(const std::string& events_path, const std::string& start, std::int64_t step_s,
              std::int64_t length, std::int64_t idle_timeout, const std::string& truth_path,
              const std::string& out_path) {
  std::vector<CrossingEvent> events = load_events_csv(events_path);
  std::int64_t start_time = start.empty()
                                ? (events.empty() ? 0 : events.front().timestamp)
                                : parse_iso8601(start);
  if (length <= 0) {
    if (events.empty()) throw std::invalid_argument("no events and no --length given");
    length = (events.back().timestamp - start_time) / step_s + 1;
  }
  TimeSeries trace = events_to_trace(events, start_time, step_s, length, idle_timeout);
  emit_trace(trace, out_path);

  json metrics;
  int total_in = 0, total_out = 0;
  for (const auto& e : events)
    (e.direction == CrossingEvent::Direction::kInward ? total_in : total_out) += e.count;
  metrics["events"] = events.size();
  metrics["total_in"] = total_in;
  metrics["total_out"] = total_out;
  metrics["final_count"] = trace[trace.size() - 1];
  if (!truth_path.empty()) {
    TimeSeries truth = load_trace_csv(truth_path);
    EvalResult eval = evaluate(trace, truth);
    metrics["rmse_vs_truth"] = eval.rmse;
    if (eval.r_squared_defined) metrics["r_squared_vs_truth"] = eval.r_squared;
  }
  if (!out_path.empty()) std::cout << metrics.dump(2) << "\n";
  else std::cerr << metrics.dump(2) << "\n";
  return 0;
}

int cmd_forecast(const std::string& history_path, const std::string& schedule_path,
                 const std::string& holidays_path, const std::string& recipe_name_str,
                 const std::string& as_of_str, double capacity, const std::string& model_out) {
  TimeSeries history = load_trace_csv(history_path);
  EventSchedule schedule;
  schedule.event_times = load_schedule_csv(schedule_path);
  if (!holidays_path.empty()) schedule.holiday_days = load_holidays_csv(holidays_path);
  schedule.capacity = capacity;
  schedule.validate();

  // default as-of holds out the final day of the history for evaluation
  const std::int64_t as_of = as_of_str.empty()
                                 ? history.end_time() + history.step() - 86400
                                 : parse_iso8601(as_of_str);
  Recipe recipe = recipe_from_name(recipe_name_str);
  RegressionModel model = fit(history, schedule, recipe, as_of);

  json out;
  out["model"] = json::parse(model_to_json(model));
  const std::int64_t eval_end =
      std::min<std::int64_t>(as_of + 86400, history.end_time() + history.step());
  const Eigen::Index n_eval = (eval_end - as_of) / history.step();
  if (n_eval > 1) {
    Eigen::VectorXd pred(n_eval), truth(n_eval);
    for (Eigen::Index i = 0; i < n_eval; ++i) {
      const std::int64_t t = as_of + i * history.step();
      pred[i] = predict(model, t, schedule);
      truth[i] = history.value_at(t) / capacity;
    }
    EvalResult eval = evaluate(TimeSeries(as_of, history.step(), pred),
                               TimeSeries(as_of, history.step(), truth));
    out["evaluation"] = {{"rmse", eval.rmse}, {"samples", n_eval}};
    if (eval.r_squared_defined) out["evaluation"]["r_squared"] = eval.r_squared;
  }
  if (!model_out.empty()) write_file(model_out, model_to_json(model));
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_control(const std::string& scenario_path, const std::string& controller,
                const std::string& forecaster, const std::string& transport,
                std::optional<std::uint64_t> seed, const std::string& out_path) {
  Scenario scenario =
      scenario_path.empty() ? reference_scenario() : scenario_from_json(read_file(scenario_path));
  if (!controller.empty()) {
    if (controller == "baseline") scenario.controller = ControllerKind::kBaseline;
    else if (controller == "hvac-mpc") scenario.controller = ControllerKind::kHvacMpc;
    else throw std::invalid_argument("unknown controller: " + controller);
  }
  if (!forecaster.empty()) {
    if (forecaster == "model") scenario.forecaster = ForecasterKind::kModel;
    else if (forecaster == "perfect") scenario.forecaster = ForecasterKind::kPerfect;
    else throw std::invalid_argument("unknown forecaster: " + forecaster);
  }
  if (seed) scenario.seed = *seed;
  Transport wire = Transport::kInProcess;
  if (transport == "socket") wire = Transport::kSocket;
  else if (!transport.empty() && transport != "in-process")
    throw std::invalid_argument("unknown transport: " + transport);

  ScenarioReport report = run_scenario(scenario, wire);
  const std::string text = report_to_json(report);
  if (out_path.empty()) std::cout << text << "\n";
  else write_file(out_path, text);
  return 0;
}

int cmd_serve(int port, int max_sessions, bool stdio) {
  if (stdio) serve_simulator_fd(0, 1);
  else serve_simulator_tcp(port, max_sessions);
  return 0;
}

int cmd_generate(std::uint64_t seed, int days, std::int64_t dt_s, double capacity,
                 const std::string& start, const std::string& out_path,
                 const std::string& events_out) {
  Scenario ref = reference_scenario();
  const std::int64_t start_time = start.empty() ? ref.start_time : parse_iso8601(start);
  EventSchedule schedule = build_schedule(start_time, days, ref.daily_event_offsets_s, capacity,
                                          ref.drift_s_per_day);
  MosqueData data =
      generate_mosque_scenario(seed, days, schedule, start_time, dt_s, ref.knobs);
  emit_trace(data.occupancy, out_path);
  if (!events_out.empty()) save_events_csv(data.events, events_out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-zone HVAC simulation, calibration, forecasting, and control"};
  app.require_subcommand(1);

  std::string params_path, weather_path, occupancy_path, plan_path, out_path;
  std::string method = "euler";
  double initial_temp = 25.0;
  auto* sim = app.add_subcommand("simulate", "run the zone model over aligned traces");
  sim->add_option("--params", params_path, "zone parameters JSON");
  sim->add_option("--weather", weather_path, "outdoor temperature CSV")->required();
  sim->add_option("--occupancy", occupancy_path, "occupancy CSV")->required();
  sim->add_option("--plan", plan_path, "HVAC plan CSV (default: off)");
  sim->add_option("--initial-temp", initial_temp, "initial indoor temperature C");
  sim->add_option("--method", method, "euler|exact");
  sim->add_option("--out", out_path, "indoor-temperature CSV path (default stdout)");

  std::string config_path, measured_path;
  auto* cal = app.add_subcommand("calibrate", "coordinate-descent parameter calibration");
  cal->add_option("--config", config_path, "calibration space JSON")->required();
  cal->add_option("--measured", measured_path, "measured indoor-temperature CSV")->required();
  cal->add_option("--weather", weather_path, "outdoor temperature CSV")->required();
  cal->add_option("--occupancy", occupancy_path, "occupancy CSV")->required();
  cal->add_option("--plan", plan_path, "HVAC plan CSV (default: off)");
  cal->add_option("--initial-temp", initial_temp, "initial indoor temperature C");
  cal->add_option("--method", method, "euler|exact");

  std::string events_path, start_str, truth_path;
  std::int64_t step_s = 600, length = 0, idle_timeout = 1800;
  auto* cnt = app.add_subcommand("count", "replay crossing events into an occupancy trace");
  cnt->add_option("--events", events_path, "crossing-events CSV")->required();
  cnt->add_option("--start", start_str, "trace start, ISO-8601 (default: first event)");
  cnt->add_option("--step", step_s, "trace step seconds");
  cnt->add_option("--length", length, "trace length in samples (default: span of events)");
  cnt->add_option("--idle-timeout", idle_timeout, "idle reset seconds");
  cnt->add_option("--truth", truth_path, "ground-truth occupancy CSV for metrics");
  cnt->add_option("--out", out_path, "occupancy CSV path (default stdout)");

  std::string history_path, schedule_path, holidays_path, as_of_str, model_out;
  std::string recipe = "PR_DomSp";
  double capacity = 500.0;
  auto* fc = app.add_subcommand("forecast", "fit an occupancy regression and evaluate it");
  fc->add_option("--history", history_path, "occupancy history CSV")->required();
  fc->add_option("--schedule", schedule_path, "event schedule CSV")->required();
  fc->add_option("--holidays", holidays_path, "holiday dates CSV");
  fc->add_option("--recipe", recipe, "LR_AllData|LR_SpEv|LR_DomSp|PR_DomSp");
  fc->add_option("--as-of", as_of_str, "fit cutoff, ISO-8601 (default: hold out the last day)");
  fc->add_option("--capacity", capacity, "occupancy normalization capacity");
  fc->add_option("--model-out", model_out, "write the fitted model JSON here");

  std::string scenario_path, controller, forecaster, transport;
  std::optional<std::uint64_t> seed;
  auto* ctl = app.add_subcommand("control", "run a scenario and report energy and comfort");
  ctl->add_option("--scenario", scenario_path, "scenario JSON (default: reference scenario)");
  ctl->add_option("--controller", controller, "baseline|hvac-mpc");
  ctl->add_option("--forecaster", forecaster, "model|perfect");
  ctl->add_option("--transport", transport, "in-process|socket");
  ctl->add_option("--seed", seed, "generator seed override");
  ctl->add_option("--out", out_path, "report JSON path (default stdout)");

  int port = 4242, max_sessions = -1;
  bool stdio = false;
  auto* srv = app.add_subcommand("serve", "co-simulation endpoint (newline-delimited JSON)");
  srv->add_option("--port", port, "TCP port");
  srv->add_option("--max-sessions", max_sessions, "sessions to serve before exiting (-1: forever)");
  srv->add_flag("--stdio", stdio, "serve a single session on stdin/stdout");

  std::uint64_t gen_seed = 7;
  int days = 7;
  std::string events_out;
  auto* gen = app.add_subcommand("generate", "synthetic occupancy trace and event stream");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--days", days, "days to generate");
  gen->add_option("--dt", step_s, "sample step seconds");
  gen->add_option("--capacity", capacity, "zone capacity, persons");
  gen->add_option("--start", start_str, "start time, ISO-8601");
  gen->add_option("--out", out_path, "occupancy CSV path (default stdout)");
  gen->add_option("--events-out", events_out, "crossing-events CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints usage/help
    return e.get_name() == "CallForHelp" ? 0 : 1;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(params_path, weather_path, occupancy_path, plan_path, initial_temp,
                          method, out_path);
    if (cal->parsed())
      return cmd_calibrate(config_path, measured_path, weather_path, occupancy_path, plan_path,
                           initial_temp, method);
    if (cnt->parsed())
      return cmd_count(events_path, start_str, step_s, length, idle_timeout, truth_path, out_path);
    if (fc->parsed())
      return cmd_forecast(history_path, schedule_path, holidays_path, recipe, as_of_str, capacity,
                          model_out);
    if (ctl->parsed())
      return cmd_control(scenario_path, controller, forecaster, transport, seed, out_path);
    if (srv->parsed()) return cmd_serve(port, max_sessions, stdio);
    if (gen->parsed())
      return cmd_generate(gen_seed, days, step_s, capacity, start_str, out_path, events_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
