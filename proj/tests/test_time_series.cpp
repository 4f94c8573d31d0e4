#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "hvacctl/time_series.hpp"

using namespace hvacctl;

TEST_CASE("construction validates inputs") {
  CHECK_THROWS_AS(TimeSeries(0, 0, Eigen::VectorXd::Ones(3)), std::invalid_argument);
  CHECK_THROWS_AS(TimeSeries(0, -60, Eigen::VectorXd::Ones(3)), std::invalid_argument);
  CHECK_THROWS_AS(TimeSeries(0, 60, Eigen::VectorXd()), std::invalid_argument);
  Eigen::VectorXd bad = Eigen::VectorXd::Ones(3);
  bad[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(TimeSeries(0, 60, bad), std::invalid_argument);
}

TEST_CASE("index/time mapping") {
  TimeSeries ts = TimeSeries::constant(1000, 60, 5, 2.5);
  CHECK(ts.start_time() == 1000);
  CHECK(ts.step() == 60);
  CHECK(ts.size() == 5);
  CHECK(ts.time_at(0) == 1000);
  CHECK(ts.time_at(4) == 1240);
  CHECK(ts.end_time() == 1240);
  CHECK(ts[3] == 2.5);
}

TEST_CASE("nearest_index rounds, ties to the earlier sample") {
  TimeSeries ts = TimeSeries::constant(0, 100, 10, 0.0);
  CHECK(ts.nearest_index(0) == 0);
  CHECK(ts.nearest_index(-50) == 0);
  CHECK(ts.nearest_index(49) == 0);
  CHECK(ts.nearest_index(50) == 0);   // tie -> earlier
  CHECK(ts.nearest_index(51) == 1);
  CHECK(ts.nearest_index(149) == 1);
  CHECK(ts.nearest_index(150) == 1);  // tie -> earlier
  CHECK(ts.nearest_index(151) == 2);
  CHECK(ts.nearest_index(100000) == 9);  // clamped to last
}

TEST_CASE("value_at is zero-order hold") {
  Eigen::VectorXd v(3);
  v << 1.0, 2.0, 3.0;
  TimeSeries ts(0, 100, v);
  CHECK(ts.value_at(0) == 1.0);
  CHECK(ts.value_at(99) == 1.0);
  CHECK(ts.value_at(100) == 2.0);
  CHECK(ts.value_at(299) == 3.0);
  CHECK_THROWS_AS(ts.value_at(-1), std::out_of_range);
  CHECK_THROWS_AS(ts.value_at(300), std::out_of_range);
  CHECK(ts.covers(0));
  CHECK(ts.covers(299));
  CHECK_FALSE(ts.covers(300));
}

TEST_CASE("slice keeps alignment") {
  Eigen::VectorXd v(5);
  v << 1, 2, 3, 4, 5;
  TimeSeries ts(1000, 10, v);
  TimeSeries s = ts.slice(2, 2);
  CHECK(s.start_time() == 1020);
  CHECK(s.size() == 2);
  CHECK(s[0] == 3.0);
  CHECK(s[1] == 4.0);
  CHECK_THROWS_AS(ts.slice(4, 2), std::out_of_range);
  CHECK_THROWS_AS(ts.slice(-1, 1), std::out_of_range);
}

TEST_CASE("aligned_with") {
  TimeSeries a = TimeSeries::constant(0, 60, 4, 1.0);
  TimeSeries b = TimeSeries::constant(0, 60, 4, 2.0);
  TimeSeries c = TimeSeries::constant(60, 60, 4, 2.0);
  CHECK(a.aligned_with(b));
  CHECK_FALSE(a.aligned_with(c));
}

TEST_CASE("iso8601 round trip") {
  CHECK(format_iso8601(0) == "1970-01-01T00:00:00Z");
  CHECK(parse_iso8601("1970-01-01T00:00:00Z") == 0);
  // 2025-01-06 is a Monday
  const std::int64_t t = 1736121600;
  CHECK(format_iso8601(t) == "2025-01-06T00:00:00Z");
  CHECK(parse_iso8601(format_iso8601(t + 3661)) == t + 3661);
  CHECK_THROWS(parse_iso8601("not a timestamp"));
}

TEST_CASE("csv round trip") {
  Eigen::VectorXd v(4);
  v << 25.0, 25.5, 26.25, 24.125;
  TimeSeries ts(1736121600, 600, v);
  const std::string path = "test_ts_roundtrip.csv";
  save_trace_csv(ts, path);
  TimeSeries back = load_trace_csv(path);
  CHECK(back.start_time() == ts.start_time());
  CHECK(back.step() == ts.step());
  REQUIRE(back.size() == ts.size());
  for (Eigen::Index i = 0; i < ts.size(); ++i) CHECK(back[i] == doctest::Approx(ts[i]).epsilon(1e-12));
  std::remove(path.c_str());
}

TEST_CASE("csv rejects irregular spacing") {
  const std::string path = "test_ts_bad.csv";
  {
    std::ofstream out(path);
    out << "timestamp,value\n";
    out << "2025-01-06T00:00:00Z,1.0\n";
    out << "2025-01-06T00:10:00Z,2.0\n";
    out << "2025-01-06T00:25:00Z,3.0\n";
  }
  CHECK_THROWS(load_trace_csv(path));
  std::remove(path.c_str());
}
