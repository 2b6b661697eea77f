#include "disac/scenario.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace disac {

void Scenario::validate() const {
  std::ostringstream err;
  auto fail = [&](const std::string& what) { err << what << "; "; };

  auto finite_pos = [](const Position2D& p) {
    return std::isfinite(p.x) && std::isfinite(p.y);
  };
  for (const auto* nodes : {&radar_tx, &radar_rx, &rrh, &ul_ue, &dl_ue}) {
    for (const auto& p : *nodes) {
      if (!finite_pos(p)) fail("non-finite node coordinate");
    }
  }
  for (const auto& t : targets) {
    if (!std::isfinite(t.x) || !std::isfinite(t.y) || !std::isfinite(t.vx) ||
        !std::isfinite(t.vy)) {
      fail("non-finite target state");
    }
  }
  if (pulses_per_cpi < 1) fail("pulses_per_cpi must be >= 1");
  if (range_cells_per_pri < 1) fail("range_cells_per_pri must be >= 1");
  if (symbols_per_frame != range_cells_per_pri) {
    fail("symbols_per_frame must equal range_cells_per_pri");
  }
  if (rrh_antennas < 1) fail("rrh_antennas must be >= 1");
  if (ul_power_max < 0) fail("ul_power_max must be >= 0");
  if (dl_power_max < 0) fail("dl_power_max must be >= 0");
  if (radar_tx_power.size() != radar_tx.size()) {
    fail("radar_tx_power must have one entry per radar Tx");
  }
  for (double p : radar_tx_power) {
    if (!(p >= 0)) fail("radar Tx power must be >= 0");
  }
  if (par_limit.size() != radar_tx.size()) {
    fail("par_limit must have one entry per radar Tx");
  }
  for (double g : par_limit) {
    if (!(g >= 1.0) || !(g <= pulses_per_cpi)) {
      fail("PAR limit must lie in [1, pulses_per_cpi]");
    }
  }
  for (double v : {noise_var_radar, noise_var_ul, noise_var_dl}) {
    if (!(v > 0)) fail("noise variances must be > 0");
  }
  if (rcs_variance < 0) fail("rcs_variance must be >= 0");
  if (si_attenuation < 0) fail("si_attenuation must be >= 0");
  if (!(clutter_var > 0)) fail("clutter_var must be > 0");
  if (pri_s <= 0) fail("pri_s must be > 0");
  if (carrier_freq_hz <= 0) fail("carrier_freq_hz must be > 0");

  const std::string msg = err.str();
  if (!msg.empty()) {
    throw std::invalid_argument("invalid scenario: " + msg);
  }
}

Scenario default_parameters() {
  Scenario s;
  s.radar_tx.resize(4);
  s.radar_rx.resize(4);
  s.rrh.resize(4);
  s.ul_ue.resize(2);
  s.dl_ue.resize(2);
  s.radar_tx_power.assign(4, 1.0);
  s.par_limit.assign(4, 2.0);
  return s;
}

}  // namespace disac
