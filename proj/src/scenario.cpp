#include "hvacctl/scenario.hpp"

#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

namespace hvacctl {

using nlohmann::json;

EventSchedule build_schedule(std::int64_t start_time, int days,
                             const std::vector<std::int64_t>& daily_offsets_s,
                             double capacity, double drift_s_per_day) {
  if (daily_offsets_s.empty()) throw std::invalid_argument("schedule needs daily offsets");
  std::vector<std::int64_t> offsets = daily_offsets_s;
  std::sort(offsets.begin(), offsets.end());
  EventSchedule schedule;
  schedule.capacity = capacity;
  for (int day = 0; day < days; ++day) {
    const std::int64_t drift = static_cast<std::int64_t>(std::lround(drift_s_per_day * day));
    for (std::int64_t offset : offsets)
      schedule.event_times.push_back(start_time + day * 86400 + offset + drift);
  }
  schedule.validate();
  return schedule;
}

namespace {

int day_of_week(std::int64_t t) { return static_cast<int>(((t / 86400) % 7 + 3) % 7); }

constexpr int kFriday = 4;  // Monday = 0
constexpr std::int64_t kMidday = 43200;

}  // namespace

MosqueData generate_mosque_scenario(std::uint64_t seed, int days, const EventSchedule& schedule,
                                    std::int64_t start_time, std::int64_t dt_s,
                                    const GeneratorKnobs& knobs) {
  if (days < 1) throw std::invalid_argument("generator: days must be >= 1");
  const std::int64_t end_time = start_time + static_cast<std::int64_t>(days) * 86400;
  const Eigen::Index length = static_cast<Eigen::Index>(days * 86400 / dt_s);

  // Per-event peaks, drawn in schedule order so the stream is reproducible.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> spread(1.0 - knobs.peak_noise, 1.0 + knobs.peak_noise);

  // Identify each day's midday event for the Friday sermon scaling.
  std::map<std::int64_t, std::int64_t> midday_of_day;  // day number -> event time
  for (std::int64_t e : schedule.event_times) {
    const std::int64_t day = e / 86400;
    auto it = midday_of_day.find(day);
    if (it == midday_of_day.end() ||
        std::abs(e % 86400 - kMidday) < std::abs(it->second % 86400 - kMidday))
      midday_of_day[day] = e;
  }

  std::vector<std::pair<std::int64_t, double>> peaks;  // event time -> peak persons
  for (std::int64_t e : schedule.event_times) {
    if (e < start_time - knobs.decay_s || e > end_time + knobs.ramp_s) continue;
    double peak = schedule.capacity * knobs.peak_fraction * spread(rng);
    if (day_of_week(e) == kFriday && midday_of_day.at(e / 86400) == e)
      peak *= knobs.friday_scale;
    peaks.emplace_back(e, std::min(peak, schedule.capacity));
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> strays(1, 3);
  Eigen::VectorXd values(length);
  for (Eigen::Index i = 0; i < length; ++i) {
    const std::int64_t t = start_time + i * dt_s;
    double occupants = 0.0;
    for (const auto& [e, peak] : peaks) {
      if (t <= e && e - t <= knobs.ramp_s)
        occupants += peak * (1.0 - static_cast<double>(e - t) / knobs.ramp_s);
      else if (t > e && t - e <= knobs.decay_s)
        occupants += peak * (1.0 - static_cast<double>(t - e) / knobs.decay_s);
    }
    if (unit(rng) < knobs.sparse_noise_rate) occupants += strays(rng);
    values[i] = std::clamp(std::round(occupants), 0.0, schedule.capacity);
  }

  // Crossing events at the sample boundaries where the count changes;
  // replaying them through the counter reproduces the trace exactly.
  std::vector<CrossingEvent> events;
  int previous = 0;
  for (Eigen::Index i = 0; i < length; ++i) {
    const int current = static_cast<int>(values[i]);
    if (current != previous) {
      CrossingEvent e;
      e.timestamp = start_time + i * dt_s;
      e.direction = current > previous ? CrossingEvent::Direction::kInward
                                       : CrossingEvent::Direction::kOutward;
      e.count = std::abs(current - previous);
      events.push_back(e);
    }
    previous = current;
  }

  return MosqueData{TimeSeries(start_time, dt_s, std::move(values)), std::move(events)};
}

TimeSeries generate_weather(std::int64_t start_time, std::int64_t dt_s, Eigen::Index length) {
  Eigen::VectorXd values(length);
  for (Eigen::Index i = 0; i < length; ++i) {
    const double tod = static_cast<double>((start_time + i * dt_s) % 86400);
    values[i] = 35.0 + 7.0 * std::sin(2.0 * M_PI * (tod - 9.0 * 3600.0) / 86400.0);
  }
  return TimeSeries(start_time, dt_s, std::move(values));
}

TimeSeries generate_humidity(std::int64_t start_time, std::int64_t dt_s, Eigen::Index length) {
  Eigen::VectorXd values(length);
  for (Eigen::Index i = 0; i < length; ++i) {
    const double tod = static_cast<double>((start_time + i * dt_s) % 86400);
    values[i] = 60.0 - 10.0 * std::sin(2.0 * M_PI * (tod - 9.0 * 3600.0) / 86400.0);
  }
  return TimeSeries(start_time, dt_s, std::move(values));
}

Scenario reference_scenario() {
  Scenario s;
  s.params.heat_capacity_j_per_c = 8e6;
  s.params.thermal_resistance_c_per_w = 2e-3;
  s.params.hvac_max_cooling_w = 3e4;
  s.params.cop = 3.0;
  s.params.occupant_heat_w = 100.0;
  s.params.deadband_c = 0.5;
  s.daily_event_offsets_s = {18000, 44100, 55800, 65400, 70800};  // five daily prayers
  s.comfort_assumptions.clothing_clo = 0.6;
  return s;
}

namespace {

ControllerKind controller_from_name(const std::string& name) {
  if (name == "baseline") return ControllerKind::kBaseline;
  if (name == "hvac-mpc") return ControllerKind::kHvacMpc;
  throw std::invalid_argument("unknown controller: " + name);
}

std::string controller_name(ControllerKind kind) {
  return kind == ControllerKind::kBaseline ? "baseline" : "hvac-mpc";
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
  const json j = json::parse(text);
  Scenario s = reference_scenario();
  if (j.contains("params")) {
    const auto& p = j.at("params");
    s.params.heat_capacity_j_per_c = p.value("c_r", s.params.heat_capacity_j_per_c);
    s.params.thermal_resistance_c_per_w = p.value("r_r", s.params.thermal_resistance_c_per_w);
    s.params.hvac_max_cooling_w = p.value("q_max", s.params.hvac_max_cooling_w);
    s.params.cop = p.value("cop", s.params.cop);
    s.params.occupant_heat_w = p.value("q_person", s.params.occupant_heat_w);
    s.params.deadband_c = p.value("deadband", s.params.deadband_c);
  }
  if (j.contains("policy")) {
    s.policy.setpoint_occupied_c = j.at("policy").value("setpoint_oc", s.policy.setpoint_occupied_c);
    s.policy.setpoint_unoccupied_c =
        j.at("policy").value("setpoint_uo", s.policy.setpoint_unoccupied_c);
  }
  if (j.contains("weights")) {
    s.weights.rho_overheat = j.at("weights").value("rho_1", s.weights.rho_overheat);
    s.weights.rho_overcool = j.at("weights").value("rho_2", s.weights.rho_overcool);
  }
  if (j.contains("comfort")) {
    const auto& c = j.at("comfort");
    s.comfort_assumptions.air_velocity_m_s =
        c.value("air_velocity", s.comfort_assumptions.air_velocity_m_s);
    s.comfort_assumptions.metabolic_rate_met =
        c.value("met", s.comfort_assumptions.metabolic_rate_met);
    s.comfort_assumptions.clothing_clo = c.value("clo", s.comfort_assumptions.clothing_clo);
  }
  if (j.contains("generator")) {
    const auto& g = j.at("generator");
    s.knobs.ramp_s = g.value("ramp_s", s.knobs.ramp_s);
    s.knobs.decay_s = g.value("decay_s", s.knobs.decay_s);
    s.knobs.friday_scale = g.value("friday_scale", s.knobs.friday_scale);
    s.knobs.peak_fraction = g.value("peak_fraction", s.knobs.peak_fraction);
    s.knobs.peak_noise = g.value("peak_noise", s.knobs.peak_noise);
    s.knobs.sparse_noise_rate = g.value("sparse_noise_rate", s.knobs.sparse_noise_rate);
  }
  s.seed = j.value("seed", s.seed);
  s.days = j.value("days", s.days);
  s.train_days = j.value("train_days", s.train_days);
  s.capacity = j.value("capacity", s.capacity);
  if (j.contains("daily_event_offsets_s"))
    s.daily_event_offsets_s = j.at("daily_event_offsets_s").get<std::vector<std::int64_t>>();
  s.drift_s_per_day = j.value("drift_s_per_day", s.drift_s_per_day);
  s.dt_s = j.value("dt", s.dt_s);
  s.start_time = j.value("start_time", s.start_time);
  if (j.contains("controller")) s.controller = controller_from_name(j.at("controller"));
  if (j.contains("forecaster"))
    s.forecaster = j.at("forecaster") == "perfect" ? ForecasterKind::kPerfect
                                                   : ForecasterKind::kModel;
  s.onset_threshold = j.value("onset_threshold", s.onset_threshold);
  s.initial_temp_c = j.value("initial_ti", s.initial_temp_c);
  s.action_levels = j.value("action_levels", s.action_levels);
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["params"] = {{"c_r", s.params.heat_capacity_j_per_c},
                 {"r_r", s.params.thermal_resistance_c_per_w},
                 {"q_max", s.params.hvac_max_cooling_w},
                 {"cop", s.params.cop},
                 {"q_person", s.params.occupant_heat_w},
                 {"deadband", s.params.deadband_c}};
  j["policy"] = {{"setpoint_oc", s.policy.setpoint_occupied_c},
                 {"setpoint_uo", s.policy.setpoint_unoccupied_c}};
  j["weights"] = {{"rho_1", s.weights.rho_overheat}, {"rho_2", s.weights.rho_overcool}};
  j["comfort"] = {{"air_velocity", s.comfort_assumptions.air_velocity_m_s},
                  {"met", s.comfort_assumptions.metabolic_rate_met},
                  {"clo", s.comfort_assumptions.clothing_clo}};
  j["generator"] = {{"ramp_s", s.knobs.ramp_s},
                    {"decay_s", s.knobs.decay_s},
                    {"friday_scale", s.knobs.friday_scale},
                    {"peak_fraction", s.knobs.peak_fraction},
                    {"peak_noise", s.knobs.peak_noise},
                    {"sparse_noise_rate", s.knobs.sparse_noise_rate}};
  j["seed"] = s.seed;
  j["days"] = s.days;
  j["train_days"] = s.train_days;
  j["capacity"] = s.capacity;
  j["daily_event_offsets_s"] = s.daily_event_offsets_s;
  j["drift_s_per_day"] = s.drift_s_per_day;
  j["dt"] = s.dt_s;
  j["start_time"] = s.start_time;
  j["controller"] = controller_name(s.controller);
  j["forecaster"] = s.forecaster == ForecasterKind::kPerfect ? "perfect" : "model";
  j["onset_threshold"] = s.onset_threshold;
  j["initial_ti"] = s.initial_temp_c;
  j["action_levels"] = s.action_levels;
  return j.dump(2);
}

namespace {

/// Transport-agnostic simulator handle.
class SimChannel {
 public:
  virtual ~SimChannel() = default;
  virtual SimulatorSession::StepResult step(std::int64_t index, double setpoint_c, double t_o,
                                            double h, int occupants) = 0;
};

class InProcessChannel final : public SimChannel {
 public:
  InProcessChannel(const ZoneThermalParams& params, std::int64_t dt, double initial_ti)
      : session_(params, dt, initial_ti) {}
  SimulatorSession::StepResult step(std::int64_t index, double setpoint_c, double t_o, double h,
                                    int occupants) override {
    return session_.step(index, setpoint_c, t_o, h, occupants);
  }

 private:
  SimulatorSession session_;
};

class WireChannel final : public SimChannel {
 public:
  WireChannel(const ZoneThermalParams& params, std::int64_t dt, double initial_ti) {
    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0)
      throw std::runtime_error("cannot create co-sim socket pair");
    server_ = std::thread([fd = fds[1]] {
      serve_simulator_fd(fd, fd);
      ::close(fd);
    });
    client_ = std::make_unique<CosimClient>(fds[0], fds[0]);
    client_fd_ = fds[0];
    client_->init(params, dt, initial_ti);
  }

  ~WireChannel() override {
    try {
      client_->end();
    } catch (...) {
    }
    ::close(client_fd_);
    if (server_.joinable()) server_.join();
  }

  SimulatorSession::StepResult step(std::int64_t index, double setpoint_c, double t_o, double h,
                                    int occupants) override {
    return client_->step(index, setpoint_c, t_o, h, occupants);
  }

 private:
  std::thread server_;
  std::unique_ptr<CosimClient> client_;
  int client_fd_ = -1;
};

std::unique_ptr<SimChannel> make_channel(Transport transport, const ZoneThermalParams& params,
                                         std::int64_t dt, double initial_ti) {
  if (transport == Transport::kSocket)
    return std::make_unique<WireChannel>(params, dt, initial_ti);
  return std::make_unique<InProcessChannel>(params, dt, initial_ti);
}

struct RunTraces {
  TimeSeries indoor_temp;
  TimeSeries setpoints;
  TimeSeries q_ac;
  Eigen::VectorXd step_energy_wh;
  double total_energy_wh = 0.0;
  std::vector<DecisionLogEntry> decisions;
};

RunTraces drive_controller(const Scenario& scenario, ControllerKind kind, Transport transport,
                           const TimeSeries& weather, const TimeSeries& humidity,
                           const TimeSeries& occupancy, const OnsetForecaster& forecaster) {
  const Eigen::Index n = occupancy.size();
  const std::int64_t dt = scenario.dt_s;
  // The controller treats the zone as occupied at the same attendance
  // threshold the onset forecaster targets; lone early arrivals and stray
  // crossings do not preempt the pre-cooling schedule.
  const double occupied_threshold =
      std::max(1.0, scenario.onset_threshold * scenario.capacity);
  auto channel = make_channel(transport, scenario.params, dt, scenario.initial_temp_c);

  ControllerState state;
  state.current_target_c = scenario.policy.setpoint_occupied_c;

  Eigen::VectorXd ti(n), setpoints(n), q_ac(n), step_energy(n);
  std::vector<DecisionLogEntry> decisions;
  double temp_now = scenario.initial_temp_c;
  double total = 0.0;
  const Eigen::Index forecast_len = 86400 / dt + 2;

  for (Eigen::Index i = 0; i < n; ++i) {
    const std::int64_t t_now = occupancy.time_at(i);
    double setpoint = scenario.policy.setpoint_occupied_c;
    if (kind == ControllerKind::kHvacMpc) {
      // Persistence weather forecast: hold the latest observation.
      const TimeSeries forecast =
          TimeSeries::constant(t_now, dt, forecast_len, weather[i]);
      const int occupied_now = occupancy[i] >= occupied_threshold
                                   ? static_cast<int>(std::lround(occupancy[i]))
                                   : 0;
      TickResult tick = controller_tick(state, t_now, occupied_now, temp_now, forecaster,
                                        forecast, scenario.policy, scenario.params);
      state = tick.state;
      setpoint = tick.setpoint_c;
      for (auto& entry : tick.log) decisions.push_back(std::move(entry));
    }
    const auto result = channel->step(i, setpoint, weather[i], humidity[i],
                                      static_cast<int>(std::lround(occupancy[i])));
    temp_now = result.indoor_temp_c;
    ti[i] = result.indoor_temp_c;
    setpoints[i] = setpoint;
    q_ac[i] = result.hvac_on ? -scenario.params.hvac_max_cooling_w : 0.0;
    step_energy[i] = result.step_energy_wh;
    total = result.cumulative_energy_wh;
  }

  return RunTraces{TimeSeries(occupancy.start_time(), dt, std::move(ti)),
                   TimeSeries(occupancy.start_time(), dt, std::move(setpoints)),
                   TimeSeries(occupancy.start_time(), dt, std::move(q_ac)),
                   std::move(step_energy), total, std::move(decisions)};
}

OnsetForecaster make_forecaster(const Scenario& scenario, const EventSchedule& schedule,
                                const TimeSeries& history, const TimeSeries& run_occupancy) {
  if (scenario.forecaster == ForecasterKind::kPerfect) {
    const double threshold = scenario.onset_threshold * scenario.capacity;
    return [run_occupancy, threshold](std::int64_t t_now) -> std::optional<std::int64_t> {
      for (std::int64_t t = t_now + run_occupancy.step();
           t <= t_now + 86400 && t <= run_occupancy.end_time(); t += run_occupancy.step()) {
        if (run_occupancy.value_at(t) >= threshold) return t;
      }
      return std::nullopt;
    };
  }
  const std::int64_t run_start = run_occupancy.start_time();
  auto model = std::make_shared<RegressionModel>(
      fit(history, schedule, Recipe::kDomainPoly, run_start));
  const double threshold = scenario.onset_threshold;
  const std::int64_t dt = scenario.dt_s;
  return [model, schedule, threshold, dt](std::int64_t t_now) {
    return next_occupied_time(*model, schedule, t_now, threshold, dt);
  };
}

}  // namespace

ScenarioReport run_scenario(const Scenario& scenario, Transport transport) {
  scenario.params.validate();
  scenario.policy.validate();
  const std::int64_t dt = scenario.dt_s;
  const int total_days = scenario.train_days + scenario.days;
  const EventSchedule schedule =
      build_schedule(scenario.start_time, total_days + 2, scenario.daily_event_offsets_s,
                     scenario.capacity, scenario.drift_s_per_day);
  const MosqueData data = generate_mosque_scenario(scenario.seed, total_days, schedule,
                                                   scenario.start_time, dt, scenario.knobs);

  const Eigen::Index run_steps = scenario.duration_steps();
  const Eigen::Index train_steps = scenario.train_days * 86400 / dt;
  const TimeSeries run_occupancy = data.occupancy.slice(train_steps, run_steps);
  const TimeSeries history = scenario.train_days > 0
                                 ? data.occupancy.slice(0, train_steps)
                                 : run_occupancy;
  const std::int64_t run_start = scenario.start_time + scenario.train_days * 86400;
  const TimeSeries weather = generate_weather(run_start, dt, run_steps);
  const TimeSeries humidity = generate_humidity(run_start, dt, run_steps);

  const OnsetForecaster forecaster =
      make_forecaster(scenario, schedule, history, run_occupancy);

  const RunTraces run = drive_controller(scenario, scenario.controller, transport, weather,
                                         humidity, run_occupancy, forecaster);

  ScenarioReport report;
  report.indoor_temp = run.indoor_temp;
  report.setpoints = run.setpoints;
  report.decisions = run.decisions;
  report.total_energy_wh = run.total_energy_wh;
  const Eigen::Index steps_per_day = 86400 / dt;
  for (Eigen::Index d = 0; d < scenario.days; ++d)
    report.per_day_energy_wh.push_back(
        run.step_energy_wh.segment(d * steps_per_day, steps_per_day).sum());

  if (scenario.controller == ControllerKind::kHvacMpc) {
    const RunTraces baseline = drive_controller(scenario, ControllerKind::kBaseline, transport,
                                                weather, humidity, run_occupancy, forecaster);
    report.has_baseline = true;
    report.baseline_energy_wh = baseline.total_energy_wh;
    if (baseline.total_energy_wh > 0)
      report.savings_pct =
          (baseline.total_energy_wh - run.total_energy_wh) / baseline.total_energy_wh * 100.0;
  }

  // Comfort statistics over occupied steps. A step counts as occupied at
  // the same attendance threshold the onset forecaster targets, so lone
  // early arrivals and stray crossings do not dominate the figure.
  const double occupied_threshold =
      std::max(1.0, scenario.onset_threshold * scenario.capacity);
  Eigen::Index occupied = 0, comfortable = 0;
  double ppd_sum = 0.0;
  for (Eigen::Index i = 0; i < run_steps; ++i) {
    if (run_occupancy[i] < occupied_threshold) continue;
    ++occupied;
    ComfortConditions c = scenario.comfort_assumptions;
    c.air_temp_c = run.indoor_temp[i];
    c.mean_radiant_temp_c = run.indoor_temp[i];
    c.relative_humidity_pct = humidity[i];
    const ComfortAssessment a = assess_comfort(c);
    if (a.within_band) ++comfortable;
    ppd_sum += a.ppd;
  }
  report.occupied_steps = occupied;
  if (occupied > 0) {
    report.occupied_comfort_fraction =
        static_cast<double>(comfortable) / static_cast<double>(occupied);
    report.mean_ppd_occupied = ppd_sum / static_cast<double>(occupied);
  }

  ControlProblem problem;
  problem.params = scenario.params;
  problem.occupancy = run_occupancy;
  problem.weather = weather;
  problem.humidity = humidity;
  problem.initial_temp_c = scenario.initial_temp_c;
  problem.action_levels = scenario.action_levels;
  const ComfortConditions assumptions = scenario.comfort_assumptions;
  problem.comfort_band = [assumptions](double h) {
    const ComfortBand band = comfort_band(h, assumptions);
    return std::make_pair(band.lower_c, band.upper_c);
  };
  report.alpha = score_controller(run.q_ac, problem, scenario.weights);
  return report;
}

std::string report_to_json(const ScenarioReport& report) {
  json j;
  j["total_energy_wh"] = report.total_energy_wh;
  j["per_day_energy_wh"] = report.per_day_energy_wh;
  if (report.has_baseline) {
    j["baseline_energy_wh"] = report.baseline_energy_wh;
    j["savings_pct"] = report.savings_pct;
  }
  j["occupied_steps"] = report.occupied_steps;
  j["occupied_comfort_fraction"] = report.occupied_comfort_fraction;
  j["mean_ppd_occupied"] = report.mean_ppd_occupied;
  j["alpha"] = report.alpha;
  j["indoor_temp"] = std::vector<double>(report.indoor_temp.values().data(),
                                         report.indoor_temp.values().data() +
                                             report.indoor_temp.size());
  j["setpoints"] = std::vector<double>(report.setpoints.values().data(),
                                       report.setpoints.values().data() +
                                           report.setpoints.size());
  json log = json::array();
  for (const auto& d : report.decisions)
    log.push_back({{"timestamp", format_iso8601(d.timestamp)},
                   {"event", d.event},
                   {"detail", d.detail}});
  j["decisions"] = log;
  return j.dump(2);
}

}  // namespace hvacctl
