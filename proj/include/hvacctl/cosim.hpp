#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hvacctl/thermal.hpp"

namespace hvacctl {

/// Simulator side of the co-simulation coupling: owns the zone state and
/// thermostat, advances one step per request. Shared by the in-process
/// and wire transports so both are bit-identical.
class SimulatorSession {
 public:
  SimulatorSession(const ZoneThermalParams& params, std::int64_t dt_s, double initial_temp_c,
                   StepMethod method = StepMethod::kEuler);

  struct StepResult {
    double indoor_temp_c = 0.0;
    double step_energy_wh = 0.0;
    double cumulative_energy_wh = 0.0;
    bool hvac_on = false;
  };

  /// Index must be exactly one past the previous step.
  StepResult step(std::int64_t index, double setpoint_c, double outdoor_temp_c,
                  double humidity_pct, int occupants);

  double indoor_temp_c() const { return state_.indoor_temp_c; }
  double cumulative_energy_wh() const { return state_.cumulative_energy_wh; }

 private:
  ZoneThermalParams params_;
  std::int64_t dt_;
  StepMethod method_;
  SimulationState state_;
  Thermostat thermostat_;
  std::int64_t next_index_ = 0;
};

/// Newline-delimited JSON, one message per line, lock-step request/reply:
///   init  -> {"type":"init","params":{...},"dt":600,"initial_ti":30.0,"method":"euler"}
///   step  -> {"type":"step","index":0,"setpoint_c":28.0,"t_o":35.0,"h":55.0,"o":3}
///   state <- {"type":"state","index":0,"t_i":...,"step_energy_wh":...,"energy_wh":...,"hvac_on":true}
///   end   -> {"type":"end"}
///   error <- {"type":"error","code":"...","text":"..."}
/// init is acknowledged with a state message at index -1. Any protocol
/// violation is answered with an error and the session closes.

std::string params_to_json_str(const ZoneThermalParams& params);
ZoneThermalParams params_from_json_str(const std::string& text);

/// Serves one session over a connected file descriptor (socket or pipe);
/// returns when the peer sends end or on protocol error.
void serve_simulator_fd(int read_fd, int write_fd);

/// Listens on a local TCP port and serves sessions one at a time.
/// max_sessions < 0 serves forever.
void serve_simulator_tcp(int port, int max_sessions = -1);

/// Controller-side wire client.
class CosimClient {
 public:
  CosimClient(int read_fd, int write_fd);
  ~CosimClient();
  CosimClient(const CosimClient&) = delete;
  CosimClient& operator=(const CosimClient&) = delete;
  CosimClient(CosimClient&& other) noexcept;
  CosimClient& operator=(CosimClient&&) = delete;

  static CosimClient connect_tcp(const std::string& host, int port);

  void init(const ZoneThermalParams& params, std::int64_t dt_s, double initial_temp_c,
            StepMethod method = StepMethod::kEuler);
  SimulatorSession::StepResult step(std::int64_t index, double setpoint_c,
                                    double outdoor_temp_c, double humidity_pct, int occupants);
  void end();

 private:
  std::string request(const std::string& line);
  int read_fd_;
  int write_fd_;
  bool owns_fds_ = false;
  std::string buffer_;
  friend CosimClient make_owned_client(int, int);
};

}  // namespace hvacctl
