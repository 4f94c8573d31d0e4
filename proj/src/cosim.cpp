#include "hvacctl/cosim.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <memory>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace hvacctl {

using nlohmann::json;

SimulatorSession::SimulatorSession(const ZoneThermalParams& params, std::int64_t dt_s,
                                   double initial_temp_c, StepMethod method)
    : params_(params), dt_(dt_s), method_(method) {
  params_.validate();
  if (dt_ <= 0) throw std::invalid_argument("simulator session: dt must be positive");
  state_.indoor_temp_c = initial_temp_c;
}

SimulatorSession::StepResult SimulatorSession::step(std::int64_t index, double setpoint_c,
                                                    double outdoor_temp_c, double humidity_pct,
                                                    int occupants) {
  (void)humidity_pct;  // enters comfort scoring only, not the RC model
  if (index != next_index_)
    throw std::invalid_argument("simulator session: out-of-order step index");
  ++next_index_;
  const double q_ac = thermostat_.actuate(state_.indoor_temp_c, setpoint_c, params_);
  const double before = state_.cumulative_energy_wh;
  state_ = method_ == StepMethod::kEuler
               ? step_euler(state_, params_, outdoor_temp_c, occupants, q_ac,
                            static_cast<double>(dt_))
               : step_exact(state_, params_, outdoor_temp_c, occupants, q_ac,
                            static_cast<double>(dt_));
  return StepResult{state_.indoor_temp_c, state_.cumulative_energy_wh - before,
                    state_.cumulative_energy_wh, thermostat_.on()};
}

namespace {

json params_to_json(const ZoneThermalParams& p) {
  return json{{"c_r", p.heat_capacity_j_per_c},
              {"r_r", p.thermal_resistance_c_per_w},
              {"q_max", p.hvac_max_cooling_w},
              {"cop", p.cop},
              {"q_person", p.occupant_heat_w},
              {"deadband", p.deadband_c}};
}

ZoneThermalParams params_from_json(const json& j) {
  ZoneThermalParams p;
  p.heat_capacity_j_per_c = j.at("c_r").get<double>();
  p.thermal_resistance_c_per_w = j.at("r_r").get<double>();
  p.hvac_max_cooling_w = j.at("q_max").get<double>();
  p.cop = j.at("cop").get<double>();
  p.occupant_heat_w = j.at("q_person").get<double>();
  p.deadband_c = j.value("deadband", 0.5);
  return p;
}

class LineIo {
 public:
  LineIo(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {}

  // Returns false on EOF.
  bool read_line(std::string& line) {
    for (;;) {
      const auto newline = buffer_.find('\n');
      if (newline != std::string::npos) {
        line = buffer_.substr(0, newline);
        buffer_.erase(0, newline + 1);
        return true;
      }
      char chunk[4096];
      const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error("cosim: read failed");
      }
      if (n == 0) return false;
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void write_line(const std::string& line) {
    std::string out = line + "\n";
    std::size_t written = 0;
    while (written < out.size()) {
      const ssize_t n = ::write(write_fd_, out.data() + written, out.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error("cosim: write failed");
      }
      written += static_cast<std::size_t>(n);
    }
  }

 private:
  int read_fd_;
  int write_fd_;
  std::string buffer_;
};

json state_reply(std::int64_t index, const SimulatorSession::StepResult& r) {
  return json{{"type", "state"},           {"index", index},
              {"t_i", r.indoor_temp_c},    {"step_energy_wh", r.step_energy_wh},
              {"energy_wh", r.cumulative_energy_wh}, {"hvac_on", r.hvac_on}};
}

json error_reply(const std::string& code, const std::string& text) {
  return json{{"type", "error"}, {"code", code}, {"text", text}};
}

}  // namespace

std::string params_to_json_str(const ZoneThermalParams& params) {
  return params_to_json(params).dump();
}

ZoneThermalParams params_from_json_str(const std::string& text) {
  return params_from_json(json::parse(text));
}

void serve_simulator_fd(int read_fd, int write_fd) {
  LineIo io(read_fd, write_fd);
  std::unique_ptr<SimulatorSession> session;
  std::string line;
  while (io.read_line(line)) {
    if (line.empty()) continue;
    json msg;
    try {
      msg = json::parse(line);
    } catch (const json::exception& e) {
      io.write_line(error_reply("malformed", e.what()).dump());
      return;
    }
    try {
      const std::string type = msg.value("type", "");
      if (type == "init") {
        if (session) {
          io.write_line(error_reply("duplicate_init", "session already initialized").dump());
          return;
        }
        const ZoneThermalParams params = params_from_json(msg.at("params"));
        const StepMethod method =
            msg.value("method", "euler") == "exact" ? StepMethod::kExact : StepMethod::kEuler;
        session = std::make_unique<SimulatorSession>(params, msg.at("dt").get<std::int64_t>(),
                                                     msg.at("initial_ti").get<double>(), method);
        SimulatorSession::StepResult initial;
        initial.indoor_temp_c = session->indoor_temp_c();
        io.write_line(state_reply(-1, initial).dump());
      } else if (type == "step") {
        if (!session) {
          io.write_line(error_reply("uninitialized", "step before init").dump());
          return;
        }
        const auto result = session->step(
            msg.at("index").get<std::int64_t>(), msg.at("setpoint_c").get<double>(),
            msg.at("t_o").get<double>(), msg.at("h").get<double>(), msg.at("o").get<int>());
        io.write_line(state_reply(msg.at("index").get<std::int64_t>(), result).dump());
      } else if (type == "end") {
        io.write_line(json{{"type", "end"}}.dump());
        return;
      } else {
        io.write_line(error_reply("unknown_type", "unknown message type: " + type).dump());
        return;
      }
    } catch (const std::exception& e) {
      io.write_line(error_reply("invalid_request", e.what()).dump());
      return;
    }
  }
}

void serve_simulator_tcp(int port, int max_sessions) {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listener < 0) throw std::runtime_error("cosim: cannot create socket");
  const int reuse = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &reuse, sizeof(reuse));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(listener);
    throw std::runtime_error("cosim: cannot bind port " + std::to_string(port));
  }
  if (::listen(listener, 1) != 0) {
    ::close(listener);
    throw std::runtime_error("cosim: cannot listen");
  }
  for (int served = 0; max_sessions < 0 || served < max_sessions; ++served) {
    const int conn = ::accept(listener, nullptr, nullptr);
    if (conn < 0) {
      if (errno == EINTR) continue;
      ::close(listener);
      throw std::runtime_error("cosim: accept failed");
    }
    try {
      serve_simulator_fd(conn, conn);
    } catch (...) {
      ::close(conn);
      ::close(listener);
      throw;
    }
    ::close(conn);
  }
  ::close(listener);
}

CosimClient::CosimClient(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {}

CosimClient::CosimClient(CosimClient&& other) noexcept
    : read_fd_(other.read_fd_),
      write_fd_(other.write_fd_),
      owns_fds_(other.owns_fds_),
      buffer_(std::move(other.buffer_)) {
  other.owns_fds_ = false;
}

CosimClient::~CosimClient() {
  if (owns_fds_) {
    ::close(read_fd_);
    if (write_fd_ != read_fd_) ::close(write_fd_);
  }
}

CosimClient CosimClient::connect_tcp(const std::string& host, int port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw std::runtime_error("cosim client: cannot create socket");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw std::runtime_error("cosim client: bad host " + host);
  }
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    throw std::runtime_error("cosim client: cannot connect to " + host + ":" +
                             std::to_string(port));
  }
  CosimClient client(fd, fd);
  client.owns_fds_ = true;
  return client;
}

std::string CosimClient::request(const std::string& line) {
  LineIo io(read_fd_, write_fd_);
  io.write_line(line);
  // One reply per request; buffered bytes would only exist if the server
  // pipelined, which the protocol forbids.
  std::string reply;
  std::string pending = buffer_;
  buffer_.clear();
  for (;;) {
    const auto newline = pending.find('\n');
    if (newline != std::string::npos) {
      reply = pending.substr(0, newline);
      buffer_ = pending.substr(newline + 1);
      return reply;
    }
    char chunk[4096];
    const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error("cosim client: read failed");
    }
    if (n == 0) throw std::runtime_error("cosim client: connection closed");
    pending.append(chunk, static_cast<std::size_t>(n));
  }
}

namespace {

json expect_state(const std::string& line) {
  const json msg = json::parse(line);
  if (msg.value("type", "") == "error")
    throw std::runtime_error("cosim error: " + msg.value("code", "") + ": " +
                             msg.value("text", ""));
  if (msg.value("type", "") != "state")
    throw std::runtime_error("cosim client: unexpected reply " + line);
  return msg;
}

}  // namespace

void CosimClient::init(const ZoneThermalParams& params, std::int64_t dt_s,
                       double initial_temp_c, StepMethod method) {
  json msg{{"type", "init"},
           {"params", json::parse(params_to_json_str(params))},
           {"dt", dt_s},
           {"initial_ti", initial_temp_c},
           {"method", method == StepMethod::kExact ? "exact" : "euler"}};
  expect_state(request(msg.dump()));
}

SimulatorSession::StepResult CosimClient::step(std::int64_t index, double setpoint_c,
                                               double outdoor_temp_c, double humidity_pct,
                                               int occupants) {
  json msg{{"type", "step"}, {"index", index},     {"setpoint_c", setpoint_c},
           {"t_o", outdoor_temp_c}, {"h", humidity_pct}, {"o", occupants}};
  const json reply = expect_state(request(msg.dump()));
  SimulatorSession::StepResult r;
  r.indoor_temp_c = reply.at("t_i").get<double>();
  r.step_energy_wh = reply.at("step_energy_wh").get<double>();
  r.cumulative_energy_wh = reply.at("energy_wh").get<double>();
  r.hvac_on = reply.at("hvac_on").get<bool>();
  return r;
}

void CosimClient::end() { request(json{{"type", "end"}}.dump()); }

}  // namespace hvacctl
