#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hvacctl/forecast.hpp"
#include "hvacctl/scenario.hpp"

using namespace hvacctl;

namespace {

constexpr std::int64_t kMonday = 1736121600;  // 2025-01-06T00:00:00Z

EventSchedule two_hourly_schedule(int days) {
  EventSchedule sched;
  for (int d = 0; d < days; ++d)
    for (int h = 0; h < 24; h += 2)
      sched.event_times.push_back(kMonday + d * 86400 + h * 3600);
  sched.capacity = 1.0;
  return sched;
}

}  // namespace

TEST_CASE("schedule queries") {
  EventSchedule sched = two_hourly_schedule(2);
  CHECK_NOTHROW(sched.validate());
  const std::int64_t t = kMonday + 3600;  // half way between 00:00 and 02:00
  CHECK(sched.covers(t));
  CHECK(sched.past_event(t) == kMonday);
  CHECK(sched.next_event(t) == kMonday + 7200);
  CHECK_FALSE(sched.covers(kMonday - 1));
  CHECK_THROWS_AS(sched.past_event(kMonday - 1), std::out_of_range);
  // proximity window is 45 min by default
  CHECK(sched.near_event(kMonday + 40 * 60));
  CHECK_FALSE(sched.near_event(kMonday + 50 * 60));
  CHECK(sched.near_event(kMonday + 7200 - 45 * 60));

  sched.holiday_days.insert((kMonday + 86400) / 86400);
  CHECK(sched.is_holiday(kMonday + 86400 + 5000));
  CHECK_FALSE(sched.is_holiday(kMonday));
}

TEST_CASE("featurize") {
  EventSchedule sched = two_hourly_schedule(7);
  FeatureRow row = featurize(kMonday + 30 * 60, sched);
  CHECK(row.minutes_since_past_event == doctest::Approx(30.0));
  CHECK(row.minutes_until_next_event == doctest::Approx(90.0));
  CHECK(row.day_of_week == 0);  // Monday
  CHECK(row.special_case == 1);
  CHECK(row.holiday == 0);
  // Friday midday sample
  FeatureRow fri = featurize(kMonday + 4 * 86400 + 12 * 3600 + 600, sched);
  CHECK(fri.day_of_week == 4);
  Eigen::VectorXd x = expand_features(fri, Recipe::kDomainLinear);
  REQUIRE(x.size() == 9);
  for (int d = 1; d <= 6; ++d) CHECK(x[2 + d] == (d == 4 ? 1.0 : 0.0));
}

TEST_CASE("recipe names round trip") {
  for (Recipe r : {Recipe::kAllData, Recipe::kSpecialEvent, Recipe::kDomainLinear,
                   Recipe::kDomainPoly})
    CHECK(recipe_from_name(recipe_name(r)) == r);
  CHECK(recipe_name(Recipe::kDomainPoly) == "PR_DomSp");
  CHECK_THROWS_AS(recipe_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("expansion sizes and poly terms") {
  CHECK(expanded_feature_count(Recipe::kAllData) == 2);
  CHECK(expanded_feature_count(Recipe::kSpecialEvent) == 3);
  CHECK(expanded_feature_count(Recipe::kDomainLinear) == 9);
  CHECK(expanded_feature_count(Recipe::kDomainPoly) == 12);
  FeatureRow row;
  row.minutes_since_past_event = 3.0;
  row.minutes_until_next_event = 5.0;
  Eigen::VectorXd x = expand_features(row, Recipe::kDomainPoly);
  CHECK(x[9] == 9.0);
  CHECK(x[10] == 25.0);
  CHECK(x[11] == 15.0);
}

TEST_CASE("noise-free linear history is recovered exactly") {
  EventSchedule sched = two_hourly_schedule(8);
  const std::int64_t dt = 600;
  const Eigen::Index n = 7 * 86400 / dt;
  Eigen::VectorXd y(n);
  const double b0 = 0.5, b1 = 0.002, b2 = -0.003;
  for (Eigen::Index i = 0; i < n; ++i) {
    FeatureRow row = featurize(kMonday + i * dt, sched);
    y[i] = b0 + b1 * row.minutes_since_past_event + b2 * row.minutes_until_next_event;
  }
  TimeSeries history(kMonday, dt, y);
  RegressionModel model = fit(history, sched, Recipe::kAllData, kMonday + 7 * 86400);
  REQUIRE(model.beta.size() == 3);
  CHECK(std::abs(model.beta[0] - b0) < 1e-6);
  CHECK(std::abs(model.beta[1] - b1) < 1e-6);
  CHECK(std::abs(model.beta[2] - b2) < 1e-6);
  // residual orthogonality: X'(y - X beta) ~ 0
  const double pred = predict(model, kMonday + 1800, sched);
  FeatureRow row = featurize(kMonday + 1800, sched);
  CHECK(pred == doctest::Approx(b0 + b1 * row.minutes_since_past_event +
                                b2 * row.minutes_until_next_event)
                    .epsilon(1e-6));
}

TEST_CASE("predictions clamp to [0, 1]") {
  EventSchedule sched = two_hourly_schedule(2);
  RegressionModel model;
  model.recipe = Recipe::kAllData;
  model.beta = Eigen::Vector3d(-0.2, 0.0, 0.0);
  CHECK(predict(model, kMonday + 1800, sched) == 0.0);
  model.beta = Eigen::Vector3d(1.7, 0.0, 0.0);
  CHECK(predict(model, kMonday + 1800, sched) == 1.0);
  model.beta = Eigen::Vector2d(0.5, 0.5);  // wrong arity for the recipe
  CHECK_THROWS_AS(predict(model, kMonday + 1800, sched), std::invalid_argument);
}

TEST_CASE("domain-specific models predict zero outside the event window") {
  EventSchedule sched = two_hourly_schedule(2);
  RegressionModel model;
  model.recipe = Recipe::kDomainLinear;
  model.beta = Eigen::VectorXd::Constant(10, 0.1);
  const std::int64_t far = kMonday + 3600;  // 60 min from both neighbors
  CHECK_FALSE(sched.near_event(far));
  CHECK(predict(model, far, sched) == 0.0);
  CHECK(predict(model, kMonday + 600, sched) > 0.0);
}

TEST_CASE("domain-specific training uses the trailing 30 days only") {
  Scenario ref = reference_scenario();
  EventSchedule sched = build_schedule(ref.start_time, 60, ref.daily_event_offsets_s,
                                       ref.capacity, ref.drift_s_per_day);
  MosqueData data = generate_mosque_scenario(11, 60, sched, ref.start_time, ref.dt_s);
  const std::int64_t as_of = ref.start_time + 56 * 86400;
  RegressionModel full = fit(data.occupancy, sched, Recipe::kDomainPoly, as_of);
  // same window passed explicitly as a slice
  const Eigen::Index per_day = 86400 / ref.dt_s;
  TimeSeries trailing = data.occupancy.slice(25 * per_day, 35 * per_day);
  RegressionModel sliced = fit(trailing, sched, Recipe::kDomainPoly, as_of);
  REQUIRE(full.beta.size() == sliced.beta.size());
  for (Eigen::Index i = 0; i < full.beta.size(); ++i)
    CHECK(full.beta[i] == doctest::Approx(sliced.beta[i]).epsilon(1e-9));
}

TEST_CASE("last week baseline") {
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(7 * 24, 0.0, 167.0);
  TimeSeries history(kMonday, 3600, v);
  CHECK(last_week_baseline(history, kMonday + 7 * 86400) == 0.0);
  CHECK(last_week_baseline(history, kMonday + 7 * 86400 + 5 * 3600) == 5.0);
  CHECK_THROWS_AS(last_week_baseline(history, kMonday + 86400), std::out_of_range);
}

TEST_CASE("evaluate") {
  Eigen::VectorXd truth(4), pred(4);
  truth << 0.0, 1.0, 2.0, 3.0;
  pred << 0.0, 1.0, 2.0, 3.0;
  EvalResult perfect = evaluate(TimeSeries(0, 1, pred), TimeSeries(0, 1, truth));
  CHECK(perfect.r_squared == doctest::Approx(1.0));
  CHECK(perfect.rmse == 0.0);
  pred << 1.0, 2.0, 3.0, 4.0;
  EvalResult off = evaluate(TimeSeries(0, 1, pred), TimeSeries(0, 1, truth));
  CHECK(off.rmse == doctest::Approx(1.0));
  CHECK(off.r_squared < 1.0);
  EvalResult flat = evaluate(TimeSeries(0, 1, pred), TimeSeries::constant(0, 1, 4, 2.0));
  CHECK_FALSE(flat.r_squared_defined);
}

TEST_CASE("shifting history by one day degrades fit quality") {
  Scenario ref = reference_scenario();
  EventSchedule sched = build_schedule(ref.start_time, 58, ref.daily_event_offsets_s,
                                       ref.capacity, ref.drift_s_per_day);
  MosqueData data = generate_mosque_scenario(5, 57, sched, ref.start_time, ref.dt_s);
  const std::int64_t as_of = ref.start_time + 56 * 86400;
  const Eigen::Index per_day = 86400 / ref.dt_s;

  auto heldout_r2 = [&](const TimeSeries& history) {
    RegressionModel model = fit(history, sched, Recipe::kDomainPoly, as_of);
    Eigen::VectorXd pred(per_day), truth(per_day);
    for (Eigen::Index i = 0; i < per_day; ++i) {
      const std::int64_t t = as_of + i * ref.dt_s;
      pred[i] = predict(model, t, sched) * ref.capacity;
      truth[i] = data.occupancy.value_at(t);
    }
    return evaluate(TimeSeries(as_of, ref.dt_s, pred), TimeSeries(as_of, ref.dt_s, truth))
        .r_squared;
  };

  TimeSeries aligned = data.occupancy.slice(0, 56 * per_day);
  TimeSeries shifted(aligned.start_time() + 86400, ref.dt_s, aligned.values());
  CHECK(heldout_r2(aligned) > heldout_r2(shifted));
}

TEST_CASE("next occupied time lands shortly before each event peak") {
  Scenario ref = reference_scenario();
  EventSchedule sched = build_schedule(ref.start_time, 58, ref.daily_event_offsets_s,
                                       ref.capacity, ref.drift_s_per_day);
  MosqueData data = generate_mosque_scenario(7, 57, sched, ref.start_time, ref.dt_s);
  const std::int64_t as_of = ref.start_time + 56 * 86400;
  RegressionModel model = fit(data.occupancy, sched, Recipe::kDomainPoly, as_of);

  // from midnight of the held-out day the first prayer onset is found
  std::optional<std::int64_t> onset =
      next_occupied_time(model, sched, as_of, 0.05, ref.dt_s);
  REQUIRE(onset.has_value());
  const std::int64_t event = sched.next_event(*onset);
  CHECK(*onset < event);
  CHECK(event - *onset <= 45 * 60);
  CHECK_THROWS_AS(next_occupied_time(model, sched, as_of, 0.0, ref.dt_s),
                  std::invalid_argument);
}

TEST_CASE("model json round trip") {
  RegressionModel model;
  model.recipe = Recipe::kSpecialEvent;
  model.beta = Eigen::Vector4d(0.25, -0.001, 0.002, 0.125);
  RegressionModel back = model_from_json(model_to_json(model));
  CHECK(back.recipe == model.recipe);
  REQUIRE(back.beta.size() == model.beta.size());
  for (Eigen::Index i = 0; i < model.beta.size(); ++i) CHECK(back.beta[i] == model.beta[i]);
}
