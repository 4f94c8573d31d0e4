#include "hvacctl/counter.hpp"

#include <fstream>
#include <stdexcept>

namespace hvacctl {

CounterState apply_event(const CounterState& state, const CrossingEvent& event,
                         std::int64_t idle_timeout_s) {
  if (event.count < 1) throw std::invalid_argument("crossing event count must be >= 1");
  if (event.timestamp < state.last_event_time)
    throw std::invalid_argument("crossing events must arrive in timestamp order");

  CounterState next = state;
  if (event.timestamp - state.last_event_time > idle_timeout_s) {
    next.occupants = 0;
    next.frozen = false;
  }
  if (event.direction == CrossingEvent::Direction::kInward) {
    next.occupants += event.count;
    next.frozen = false;
  } else if (!next.frozen) {
    next.occupants -= event.count;
    if (next.occupants < 0) {
      next.occupants = 0;
      next.frozen = true;
    }
  }
  next.last_event_time = event.timestamp;
  return next;
}

double accuracy_rate(int total_in, int missing_in, int total_out, int missing_out) {
  if (missing_in > total_in || missing_out > total_out || missing_in < 0 || missing_out < 0)
    throw std::invalid_argument("accuracy_rate: missing exceeds total");
  const int total = total_in + total_out;
  if (total <= 0) throw std::invalid_argument("accuracy_rate: no crossings");
  return 1.0 - static_cast<double>(missing_in + missing_out) / static_cast<double>(total);
}

ClassificationMetrics classification_metrics(int true_positives, int false_positives,
                                             int false_negatives) {
  ClassificationMetrics m;
  if (true_positives + false_positives > 0)
    m.precision = static_cast<double>(true_positives) / (true_positives + false_positives);
  else
    m.precision_defined = false;
  if (true_positives + false_negatives > 0)
    m.recall = static_cast<double>(true_positives) / (true_positives + false_negatives);
  else
    m.recall_defined = false;
  if (m.precision_defined && m.recall_defined && m.precision + m.recall > 0)
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  else
    m.f1_defined = false;
  return m;
}

std::vector<CrossingEvent> load_events_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open events: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty events file: " + path);
  std::vector<CrossingEvent> events;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::runtime_error("malformed event row: " + line);
    CrossingEvent e;
    e.timestamp = parse_iso8601(line.substr(0, c1));
    const std::string dir = line.substr(c1 + 1, c2 - c1 - 1);
    if (dir == "inward") e.direction = CrossingEvent::Direction::kInward;
    else if (dir == "outward") e.direction = CrossingEvent::Direction::kOutward;
    else throw std::runtime_error("bad event direction: " + dir);
    e.count = std::stoi(line.substr(c2 + 1));
    events.push_back(e);
  }
  return events;
}

void save_events_csv(const std::vector<CrossingEvent>& events, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write events: " + path);
  out << "timestamp,direction,count\n";
  for (const auto& e : events)
    out << format_iso8601(e.timestamp) << ','
        << (e.direction == CrossingEvent::Direction::kInward ? "inward" : "outward") << ','
        << e.count << '\n';
}

TimeSeries events_to_trace(const std::vector<CrossingEvent>& events, std::int64_t start_time,
                           std::int64_t step_s, Eigen::Index length,
                           std::int64_t idle_timeout_s) {
  CounterState state;
  state.last_event_time = start_time;
  Eigen::VectorXd values(length);
  std::size_t next_event = 0;
  for (Eigen::Index i = 0; i < length; ++i) {
    const std::int64_t t = start_time + i * step_s;
    while (next_event < events.size() && events[next_event].timestamp <= t) {
      state = apply_event(state, events[next_event], idle_timeout_s);
      ++next_event;
    }
    values[i] = state.occupants;
  }
  return TimeSeries(start_time, step_s, std::move(values));
}

}  // namespace hvacctl
