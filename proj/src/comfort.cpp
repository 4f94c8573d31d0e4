#include "hvacctl/comfort.hpp"

#include <cmath>

namespace hvacctl {

double pmv(const ComfortConditions& c) {
  c.validate();

  const double pa = c.relative_humidity_pct * 10.0 *
                    std::exp(16.6536 - 4030.183 / (c.air_temp_c + 235.0));  // vapour pressure, Pa
  const double icl = 0.155 * c.clothing_clo;  // clothing insulation, m2K/W
  const double m = c.metabolic_rate_met * 58.15;  // metabolic rate, W/m2
  const double mw = m;  // no external work

  const double fcl = icl <= 0.078 ? 1.0 + 1.29 * icl : 1.05 + 0.645 * icl;
  const double hcf = 12.1 * std::sqrt(c.air_velocity_m_s);
  const double taa = c.air_temp_c + 273.0;
  const double tra = c.mean_radiant_temp_c + 273.0;

  // Fixed-point solve for the clothing surface temperature.
  double tcla = taa + (35.5 - c.air_temp_c) / (3.5 * icl + 0.1);
  const double p1 = icl * fcl;
  const double p2 = p1 * 3.96;
  const double p3 = p1 * 100.0;
  const double p4 = p1 * taa;
  const double p5 = 308.7 - 0.028 * mw + p2 * std::pow(tra / 100.0, 4);
  double xn = tcla / 100.0;
  double xf = tcla / 50.0;
  double hc = hcf;
  const double tol = 1e-6;  // on tcl/100, i.e. 1e-4 C
  int iterations = 0;
  while (std::abs(xn - xf) > tol) {
    if (++iterations > 150)
      throw std::runtime_error("pmv: clothing-surface iteration did not converge");
    xf = (xf + xn) / 2.0;
    const double hcn = 2.38 * std::pow(std::abs(100.0 * xf - taa), 0.25);
    hc = hcf > hcn ? hcf : hcn;
    xn = (p5 + p4 * hc - p2 * std::pow(xf, 4)) / (100.0 + p3 * hc);
  }
  const double tcl = 100.0 * xn - 273.0;

  const double hl1 = 3.05e-3 * (5733.0 - 6.99 * mw - pa);   // skin diffusion
  const double hl2 = mw > 58.15 ? 0.42 * (mw - 58.15) : 0.0;  // sweat evaporation
  const double hl3 = 1.7e-5 * m * (5867.0 - pa);            // latent respiration
  const double hl4 = 0.0014 * m * (34.0 - c.air_temp_c);    // dry respiration
  const double hl5 = 3.96 * fcl * (std::pow(xn, 4) - std::pow(tra / 100.0, 4));  // radiation
  const double hl6 = fcl * hc * (tcl - c.air_temp_c);       // convection

  const double ts = 0.303 * std::exp(-0.036 * m) + 0.028;
  return ts * (mw - hl1 - hl2 - hl3 - hl4 - hl5 - hl6);
}

double ppd(double pmv_value) {
  if (!std::isfinite(pmv_value)) throw std::invalid_argument("ppd: non-finite pmv");
  return 100.0 - 95.0 * std::exp(-(0.03353 * std::pow(pmv_value, 4) +
                                   0.2179 * pmv_value * pmv_value));
}

ComfortAssessment assess_comfort(const ComfortConditions& conditions) {
  ComfortAssessment a;
  a.pmv = pmv(conditions);
  a.ppd = ppd(a.pmv);
  a.within_band = std::abs(a.pmv) <= 0.5;
  return a;
}

namespace {

double pmv_at(double temp_c, double humidity, const ComfortConditions& assumptions) {
  ComfortConditions c = assumptions;
  c.air_temp_c = temp_c;
  c.mean_radiant_temp_c = temp_c;
  c.relative_humidity_pct = humidity;
  return pmv(c);
}

// Bisection for pmv(T) = target on [lo, hi]; pmv is monotone increasing in T.
double solve_temp(double target, double lo, double hi, double humidity,
                  const ComfortConditions& assumptions) {
  while (hi - lo > 0.01) {
    const double mid = (lo + hi) / 2.0;
    if (pmv_at(mid, humidity, assumptions) < target) lo = mid;
    else hi = mid;
  }
  return (lo + hi) / 2.0;
}

}  // namespace

ComfortBand comfort_band(double relative_humidity_pct, const ComfortConditions& assumptions) {
  if (relative_humidity_pct < 0 || relative_humidity_pct > 100)
    throw std::invalid_argument("comfort_band: humidity out of range");
  const double lo = 10.0, hi = 40.0;
  if (pmv_at(lo, relative_humidity_pct, assumptions) > 0.5 ||
      pmv_at(hi, relative_humidity_pct, assumptions) < -0.5)
    throw std::runtime_error("comfort_band: no comfortable temperature in range");
  ComfortBand band;
  band.lower_c = solve_temp(-0.5, lo, hi, relative_humidity_pct, assumptions);
  band.upper_c = solve_temp(0.5, lo, hi, relative_humidity_pct, assumptions);
  return band;
}

}  // namespace hvacctl
