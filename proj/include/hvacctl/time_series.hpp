#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace hvacctl {

/// Uniformly sampled scalar trace. Index i maps to timestamp
/// start_time + i * step (epoch seconds, UTC).
class TimeSeries {
 public:
  TimeSeries(std::int64_t start_time, std::int64_t step_s, Eigen::VectorXd values)
      : start_time_(start_time), step_(step_s), values_(std::move(values)) {
    if (step_ <= 0) throw std::invalid_argument("TimeSeries: step must be positive");
    if (values_.size() < 1) throw std::invalid_argument("TimeSeries: need at least one value");
    if (!values_.allFinite()) throw std::invalid_argument("TimeSeries: non-finite value");
  }

  static TimeSeries constant(std::int64_t start_time, std::int64_t step_s,
                             Eigen::Index n, double value) {
    return TimeSeries(start_time, step_s, Eigen::VectorXd::Constant(n, value));
  }

  std::int64_t start_time() const { return start_time_; }
  std::int64_t step() const { return step_; }
  Eigen::Index size() const { return values_.size(); }
  std::int64_t end_time() const { return time_at(size() - 1); }

  double operator[](Eigen::Index i) const { return values_[i]; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  std::int64_t time_at(Eigen::Index i) const { return start_time_ + i * step_; }

  /// Index of the sample nearest to t (ties resolve to the earlier sample).
  Eigen::Index nearest_index(std::int64_t t) const {
    if (t <= start_time_) return 0;
    const std::int64_t offset = t - start_time_;
    Eigen::Index i = static_cast<Eigen::Index>((offset + step_ / 2) / step_);
    if (2 * (offset % step_) == step_) i = static_cast<Eigen::Index>(offset / step_);
    return i < size() ? i : size() - 1;
  }

  /// Value at time t by zero-order hold (last sample at or before t).
  double value_at(std::int64_t t) const {
    if (t < start_time_) throw std::out_of_range("TimeSeries: time before trace start");
    Eigen::Index i = static_cast<Eigen::Index>((t - start_time_) / step_);
    if (i >= size()) throw std::out_of_range("TimeSeries: time after trace end");
    return values_[i];
  }

  bool covers(std::int64_t t) const {
    return t >= start_time_ && t <= start_time_ + size() * step_ - 1;
  }

  bool aligned_with(const TimeSeries& other) const {
    return start_time_ == other.start_time_ && step_ == other.step_ &&
           size() == other.size();
  }

  TimeSeries slice(Eigen::Index first, Eigen::Index count) const {
    if (first < 0 || count < 1 || first + count > size())
      throw std::out_of_range("TimeSeries: bad slice");
    return TimeSeries(time_at(first), step_, values_.segment(first, count));
  }

 private:
  std::int64_t start_time_;
  std::int64_t step_;
  Eigen::VectorXd values_;
};

/// CSV with header `timestamp,value`, ISO-8601 UTC timestamps, uniform spacing.
TimeSeries load_trace_csv(const std::string& path);
void save_trace_csv(const TimeSeries& series, const std::string& path);

std::string format_iso8601(std::int64_t epoch_s);
std::int64_t parse_iso8601(const std::string& text);

}  // namespace hvacctl
