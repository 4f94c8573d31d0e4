#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hvacctl/time_series.hpp"

namespace hvacctl {

/// Recurring-event schedule (for the testbed: the five daily prayers).
struct EventSchedule {
  std::vector<std::int64_t> event_times;  // strictly increasing epoch seconds
  std::set<std::int64_t> holiday_days;    // UTC day numbers (epoch / 86400)
  double capacity = 1.0;                  // max persons, used for normalization
  std::int64_t event_window_s = 45 * 60;  // proximity window around events

  void validate() const;
  bool covers(std::int64_t t) const;  // a past and a next event both exist
  std::int64_t past_event(std::int64_t t) const;
  std::int64_t next_event(std::int64_t t) const;
  bool is_holiday(std::int64_t t) const;
  bool near_event(std::int64_t t) const;
};

enum class Recipe { kAllData, kSpecialEvent, kDomainLinear, kDomainPoly };

std::string recipe_name(Recipe recipe);
Recipe recipe_from_name(const std::string& name);

struct FeatureRow {
  double minutes_since_past_event = 0.0;
  double minutes_until_next_event = 0.0;
  int holiday = 0;
  int day_of_week = 0;  // 0 = Monday
  int special_case = 0;  // within the event proximity window
};

FeatureRow featurize(std::int64_t t, const EventSchedule& schedule);

/// Recipe-specific design row, without the intercept. Day of week expands
/// to 6 dummies (Monday reference); the poly recipe appends squares and
/// the cross term of the two time deltas.
Eigen::VectorXd expand_features(const FeatureRow& row, Recipe recipe);

Eigen::Index expanded_feature_count(Recipe recipe);

struct RegressionModel {
  Recipe recipe = Recipe::kDomainPoly;
  Eigen::VectorXd beta;  // intercept first
  std::int64_t training_window_days = 30;
};

/// Ordinary least squares on normalized occupancy (count / capacity) via
/// normal equations with 1e-8 ridge jitter. Domain-specific recipes train
/// on the trailing 30 days only and on samples near scheduled events.
RegressionModel fit(const TimeSeries& history, const EventSchedule& schedule, Recipe recipe,
                    std::int64_t as_of);

/// Normalized occupancy prediction, clamped to [0, 1]. Domain-specific
/// recipes predict 0 outside the event proximity window they were trained
/// on.
double predict(const RegressionModel& model, std::int64_t t, const EventSchedule& schedule);

/// Last week's value at the same time (nearest sample).
double last_week_baseline(const TimeSeries& history, std::int64_t t);

struct EvalResult {
  double r_squared = 0.0;
  double rmse = 0.0;
  bool r_squared_defined = true;  // false when the truth has zero variance
};

EvalResult evaluate(const TimeSeries& predictions, const TimeSeries& truth);

/// Earliest clock time after t_now where the model predicts occupancy at
/// or above the threshold fraction, scanning at dt over a 24 h horizon.
std::optional<std::int64_t> next_occupied_time(const RegressionModel& model,
                                               const EventSchedule& schedule,
                                               std::int64_t t_now, double threshold,
                                               std::int64_t dt_s,
                                               std::int64_t horizon_s = 86400);

std::string model_to_json(const RegressionModel& model);
RegressionModel model_from_json(const std::string& text);

/// Schedule CSV: one ISO-8601 `timestamp` per row. Holiday CSV: one
/// `date` (YYYY-MM-DD) per row.
std::vector<std::int64_t> load_schedule_csv(const std::string& path);
std::set<std::int64_t> load_holidays_csv(const std::string& path);

}  // namespace hvacctl
