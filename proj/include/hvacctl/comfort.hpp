#pragma once

#include <stdexcept>

namespace hvacctl {

struct ComfortConditions {
  double air_temp_c = 24.0;
  double mean_radiant_temp_c = 24.0;
  double relative_humidity_pct = 50.0;
  double air_velocity_m_s = 0.1;
  double metabolic_rate_met = 1.2;
  double clothing_clo = 0.5;

  void validate() const {
    if (!(air_velocity_m_s >= 0)) throw std::invalid_argument("air velocity must be >= 0");
    if (relative_humidity_pct < 0 || relative_humidity_pct > 100)
      throw std::invalid_argument("relative humidity must be in [0, 100]");
    if (!(metabolic_rate_met > 0)) throw std::invalid_argument("metabolic rate must be > 0");
    if (!(clothing_clo >= 0)) throw std::invalid_argument("clothing must be >= 0");
    if (air_temp_c < 10.0 || air_temp_c > 40.0)
      throw std::invalid_argument("air temperature outside 10-40 C applicability range");
  }
};

/// Fanger heat-balance Predicted Mean Vote. The clothing-surface
/// temperature is solved by fixed-point iteration (tolerance 1e-4 C,
/// max 150 iterations).
double pmv(const ComfortConditions& conditions);

/// Predicted Percentage Dissatisfied from a PMV value.
double ppd(double pmv_value);

struct ComfortAssessment {
  double pmv = 0.0;
  double ppd = 5.0;
  bool within_band = true;  // |pmv| <= 0.5
};

ComfortAssessment assess_comfort(const ComfortConditions& conditions);

struct ComfortBand {
  double lower_c = 0.0;
  double upper_c = 0.0;
};

/// Air-temperature interval where |pmv| <= 0.5 for the given humidity,
/// found by bisection on each side (mean radiant temperature follows air
/// temperature). Endpoints resolved to 0.01 C.
ComfortBand comfort_band(double relative_humidity_pct, const ComfortConditions& assumptions);

}  // namespace hvacctl
