#include "hvacctl/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace hvacctl {

void EventSchedule::validate() const {
  if (event_times.size() < 2)
    throw std::invalid_argument("schedule needs at least two events");
  for (std::size_t i = 1; i < event_times.size(); ++i)
    if (event_times[i] <= event_times[i - 1])
      throw std::invalid_argument("schedule timestamps must be strictly increasing");
  if (!(capacity > 0)) throw std::invalid_argument("capacity must be > 0");
}

bool EventSchedule::covers(std::int64_t t) const {
  return !event_times.empty() && t >= event_times.front() && t <= event_times.back();
}

std::int64_t EventSchedule::past_event(std::int64_t t) const {
  auto it = std::upper_bound(event_times.begin(), event_times.end(), t);
  if (it == event_times.begin()) throw std::out_of_range("no past event for time");
  return *(it - 1);
}

std::int64_t EventSchedule::next_event(std::int64_t t) const {
  auto it = std::lower_bound(event_times.begin(), event_times.end(), t);
  if (it == event_times.end()) throw std::out_of_range("no next event for time");
  return *it;
}

bool EventSchedule::is_holiday(std::int64_t t) const {
  return holiday_days.count(t / 86400) > 0;
}

bool EventSchedule::near_event(std::int64_t t) const {
  auto it = std::lower_bound(event_times.begin(), event_times.end(), t);
  if (it != event_times.end() && *it - t <= event_window_s) return true;
  if (it != event_times.begin() && t - *(it - 1) <= event_window_s) return true;
  return false;
}

std::string recipe_name(Recipe recipe) {
  switch (recipe) {
    case Recipe::kAllData: return "LR_AllData";
    case Recipe::kSpecialEvent: return "LR_SpEv";
    case Recipe::kDomainLinear: return "LR_DomSp";
    case Recipe::kDomainPoly: return "PR_DomSp";
  }
  throw std::invalid_argument("unknown recipe");
}

Recipe recipe_from_name(const std::string& name) {
  if (name == "LR_AllData") return Recipe::kAllData;
  if (name == "LR_SpEv") return Recipe::kSpecialEvent;
  if (name == "LR_DomSp") return Recipe::kDomainLinear;
  if (name == "PR_DomSp") return Recipe::kDomainPoly;
  throw std::invalid_argument("unknown recipe name: " + name);
}

FeatureRow featurize(std::int64_t t, const EventSchedule& schedule) {
  if (!schedule.covers(t)) throw std::out_of_range("time outside schedule span");
  FeatureRow row;
  row.minutes_since_past_event = static_cast<double>(t - schedule.past_event(t)) / 60.0;
  row.minutes_until_next_event = static_cast<double>(schedule.next_event(t) - t) / 60.0;
  row.holiday = schedule.is_holiday(t) ? 1 : 0;
  // Epoch day 0 (1970-01-01) was a Thursday; map so 0 = Monday.
  row.day_of_week = static_cast<int>(((t / 86400) % 7 + 3) % 7);
  row.special_case = schedule.near_event(t) ? 1 : 0;
  return row;
}

Eigen::Index expanded_feature_count(Recipe recipe) {
  switch (recipe) {
    case Recipe::kAllData: return 2;
    case Recipe::kSpecialEvent: return 3;
    case Recipe::kDomainLinear: return 9;
    case Recipe::kDomainPoly: return 12;
  }
  throw std::invalid_argument("unknown recipe");
}

Eigen::VectorXd expand_features(const FeatureRow& row, Recipe recipe) {
  Eigen::VectorXd x(expanded_feature_count(recipe));
  x[0] = row.minutes_since_past_event;
  x[1] = row.minutes_until_next_event;
  switch (recipe) {
    case Recipe::kAllData:
      break;
    case Recipe::kSpecialEvent:
      x[2] = row.special_case;
      break;
    case Recipe::kDomainLinear:
    case Recipe::kDomainPoly:
      x[2] = row.holiday;
      for (int d = 1; d <= 6; ++d) x[2 + d] = row.day_of_week == d ? 1.0 : 0.0;
      if (recipe == Recipe::kDomainPoly) {
        x[9] = row.minutes_since_past_event * row.minutes_since_past_event;
        x[10] = row.minutes_until_next_event * row.minutes_until_next_event;
        x[11] = row.minutes_since_past_event * row.minutes_until_next_event;
      }
      break;
  }
  return x;
}

namespace {

bool domain_specific(Recipe recipe) {
  return recipe == Recipe::kDomainLinear || recipe == Recipe::kDomainPoly;
}

}  // namespace

RegressionModel fit(const TimeSeries& history, const EventSchedule& schedule, Recipe recipe,
                    std::int64_t as_of) {
  schedule.validate();
  const Eigen::Index p = expanded_feature_count(recipe) + 1;  // with intercept
  const std::int64_t window_start =
      domain_specific(recipe) ? as_of - 30 * 86400 : std::numeric_limits<std::int64_t>::min();

  std::vector<Eigen::VectorXd> rows;
  std::vector<double> targets;
  for (Eigen::Index i = 0; i < history.size(); ++i) {
    const std::int64_t t = history.time_at(i);
    if (t > as_of || t < window_start || !schedule.covers(t)) continue;
    if (domain_specific(recipe) && !schedule.near_event(t)) continue;
    rows.push_back(expand_features(featurize(t, schedule), recipe));
    targets.push_back(history[i] / schedule.capacity);
  }
  if (static_cast<Eigen::Index>(rows.size()) < 2 * p)
    throw std::runtime_error("fit: insufficient training data");

  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), p);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    x(i, 0) = 1.0;
    x.row(i).tail(p - 1) = rows[static_cast<std::size_t>(i)];
    y[i] = targets[static_cast<std::size_t>(i)];
  }

  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += 1e-8;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("fit: normal equations are rank deficient");

  RegressionModel model;
  model.recipe = recipe;
  model.beta = ldlt.solve(x.transpose() * y);
  return model;
}

double predict(const RegressionModel& model, std::int64_t t, const EventSchedule& schedule) {
  if (!schedule.covers(t)) throw std::out_of_range("time outside schedule span");
  // Domain-specific models are trained only near events; outside that
  // window the zone is taken as unoccupied rather than extrapolated.
  if (domain_specific(model.recipe) && !schedule.near_event(t)) return 0.0;
  const Eigen::VectorXd x = expand_features(featurize(t, schedule), model.recipe);
  if (model.beta.size() != x.size() + 1)
    throw std::invalid_argument("predict: coefficient count does not match recipe");
  const double raw = model.beta[0] + model.beta.tail(x.size()).dot(x);
  return std::clamp(raw, 0.0, 1.0);
}

double last_week_baseline(const TimeSeries& history, std::int64_t t) {
  const std::int64_t t_prev = t - 7 * 86400;
  if (history.size() == 0 || t_prev < history.start_time())
    throw std::out_of_range("last_week_baseline: history does not cover t - 7 days");
  return history[history.nearest_index(t_prev)];
}

EvalResult evaluate(const TimeSeries& predictions, const TimeSeries& truth) {
  if (predictions.size() != truth.size())
    throw std::invalid_argument("evaluate: length mismatch");
  const Eigen::VectorXd residual = truth.values() - predictions.values();
  const double n = static_cast<double>(truth.size());
  EvalResult out;
  out.rmse = std::sqrt(residual.squaredNorm() / n);
  const double mean = truth.values().mean();
  const double ss_tot = (truth.values().array() - mean).matrix().squaredNorm();
  if (ss_tot == 0.0) {
    out.r_squared_defined = false;
  } else {
    out.r_squared = 1.0 - residual.squaredNorm() / ss_tot;
  }
  return out;
}

std::optional<std::int64_t> next_occupied_time(const RegressionModel& model,
                                               const EventSchedule& schedule,
                                               std::int64_t t_now, double threshold,
                                               std::int64_t dt_s, std::int64_t horizon_s) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("next_occupied_time: threshold must be in (0, 1)");
  for (std::int64_t t = t_now + dt_s; t <= t_now + horizon_s; t += dt_s) {
    if (!schedule.covers(t)) break;
    if (predict(model, t, schedule) >= threshold) return t;
  }
  return std::nullopt;
}

std::string model_to_json(const RegressionModel& model) {
  nlohmann::json j;
  j["recipe"] = recipe_name(model.recipe);
  j["beta"] = std::vector<double>(model.beta.data(), model.beta.data() + model.beta.size());
  j["training_window_days"] = model.training_window_days;
  return j.dump(2);
}

RegressionModel model_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  RegressionModel model;
  model.recipe = recipe_from_name(j.at("recipe").get<std::string>());
  const auto beta = j.at("beta").get<std::vector<double>>();
  model.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(),
                                                 static_cast<Eigen::Index>(beta.size()));
  model.training_window_days = j.value("training_window_days", 30);
  return model;
}

std::vector<std::int64_t> load_schedule_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schedule: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty schedule: " + path);
  std::vector<std::int64_t> times;
  while (std::getline(in, line)) {
    if (!line.empty()) times.push_back(parse_iso8601(line));
  }
  return times;
}

std::set<std::int64_t> load_holidays_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open holidays: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty holidays file: " + path);
  std::set<std::int64_t> days;
  while (std::getline(in, line)) {
    if (!line.empty()) days.insert(parse_iso8601(line + "T00:00:00Z") / 86400);
  }
  return days;
}

}  // namespace hvacctl
