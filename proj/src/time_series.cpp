#include "hvacctl/time_series.hpp"

#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <vector>

namespace hvacctl {

std::string format_iso8601(std::int64_t epoch_s) {
  std::time_t t = static_cast<std::time_t>(epoch_s);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

std::int64_t parse_iso8601(const std::string& text) {
  std::tm tm{};
  int y, mo, d, h, mi, s;
  if (std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d", &y, &mo, &d, &h, &mi, &s) != 6)
    throw std::invalid_argument("bad ISO-8601 timestamp: " + text);
  tm.tm_year = y - 1900;
  tm.tm_mon = mo - 1;
  tm.tm_mday = d;
  tm.tm_hour = h;
  tm.tm_min = mi;
  tm.tm_sec = s;
  return static_cast<std::int64_t>(timegm(&tm));
}

TimeSeries load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trace: " + path);
  std::vector<std::int64_t> times;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("malformed trace row: " + line);
    times.push_back(parse_iso8601(line.substr(0, comma)));
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  if (values.empty()) throw std::runtime_error("trace has no rows: " + path);
  std::int64_t step = values.size() > 1 ? times[1] - times[0] : 1;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] - times[i - 1] != step)
      throw std::runtime_error("non-uniform trace spacing in " + path);
  }
  Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(values.data(),
                                                  static_cast<Eigen::Index>(values.size()));
  return TimeSeries(times[0], step, std::move(v));
}

void save_trace_csv(const TimeSeries& series, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace: " + path);
  out << "timestamp,value\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < series.size(); ++i)
    out << format_iso8601(series.time_at(i)) << ',' << series[i] << '\n';
}

}  // namespace hvacctl
