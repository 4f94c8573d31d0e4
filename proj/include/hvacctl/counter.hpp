#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hvacctl/time_series.hpp"

namespace hvacctl {

struct CrossingEvent {
  std::int64_t timestamp = 0;
  enum class Direction { kInward, kOutward } direction = Direction::kInward;
  int count = 1;  // classifier's person estimate for the blob
};

struct CounterState {
  int occupants = 0;
  bool frozen = false;
  std::int64_t last_event_time = 0;
};

/// Applies one boundary-crossing event. A gap longer than idle_timeout
/// resets the counter to zero first. Outward events that would drive the
/// count negative clamp at zero and freeze the counter; outward events are
/// then ignored until the next inward crossing.
CounterState apply_event(const CounterState& state, const CrossingEvent& event,
                         std::int64_t idle_timeout_s);

/// Fraction of crossings the counter did not miss.
double accuracy_rate(int total_in, int missing_in, int total_out, int missing_out);

struct ClassificationMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_defined = true;
  bool recall_defined = true;
  bool f1_defined = true;
};

ClassificationMetrics classification_metrics(int true_positives, int false_positives,
                                             int false_negatives);

/// CSV: `timestamp,direction,count` with ISO-8601 timestamps, direction
/// inward|outward, rows in non-decreasing time order.
std::vector<CrossingEvent> load_events_csv(const std::string& path);
void save_events_csv(const std::vector<CrossingEvent>& events, const std::string& path);

/// Zero-order-hold export of the counter at the simulation step: sample i
/// carries the occupant count after all events at or before start + i*step.
TimeSeries events_to_trace(const std::vector<CrossingEvent>& events, std::int64_t start_time,
                           std::int64_t step_s, Eigen::Index length,
                           std::int64_t idle_timeout_s);

}  // namespace hvacctl
