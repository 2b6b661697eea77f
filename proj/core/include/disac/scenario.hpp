#pragma once

#include <string>
#include <vector>

#include "disac/geometry.hpp"

namespace disac {

// Full description of one D-ISAC deployment: node placement, RF constants,
// timing, power budgets, and target truth.
struct Scenario {
  std::vector<Position2D> radar_tx;  // radar transmitters
  std::vector<Position2D> radar_rx;  // radar receivers
  std::vector<Position2D> rrh;       // full-duplex remote radio heads
  std::vector<Position2D> ul_ue;     // uplink user equipments
  std::vector<Position2D> dl_ue;     // downlink user equipments
  std::vector<TargetState> targets;

  double carrier_freq_hz = 12e9;
  double pri_s = 0.2;            // pulse repetition interval
  int pulses_per_cpi = 16;       // pulses integrated per CPI
  int range_cells_per_pri = 32;  // range bins per PRI
  int symbols_per_frame = 32;    // must equal range_cells_per_pri
  int rrh_antennas = 2;          // transceiving antennas per RRH

  double ul_power_max = 1.0;
  double dl_power_max = 2.0;
  std::vector<double> radar_tx_power;  // per-Tx pulse-train energy
  std::vector<double> par_limit;       // per-Tx peak-to-average ratio cap

  double noise_var_radar = 0.01;
  double noise_var_ul = 0.01;
  double noise_var_dl = 0.01;
  double rcs_variance = 1.0;         // Swerling reflectivity variance E|g|^2
  double si_attenuation = 0.01;      // residual self-interference power
  double si_residual_gain = 1.0;     // scale of the residual SI covariance
  double clutter_var = 0.01;         // clutter reflection variance per Rx
  double speed_of_light = kSpeedOfLightKmPerS;

  int num_radar_tx() const { return static_cast<int>(radar_tx.size()); }
  int num_radar_rx() const { return static_cast<int>(radar_rx.size()); }
  int num_rrh() const { return static_cast<int>(rrh.size()); }
  int num_ul() const { return static_cast<int>(ul_ue.size()); }
  int num_dl() const { return static_cast<int>(dl_ue.size()); }
  int num_targets() const { return static_cast<int>(targets.size()); }

  double wavelength_m() const { return speed_of_light * 1e3 / carrier_freq_hz; }
  double pulse_width_s() const { return pri_s / range_cells_per_pri; }
  double cpi_duration_s() const { return pulses_per_cpi * pri_s; }
  double doppler_resolution_hz() const { return 1.0 / cpi_duration_s(); }

  // Throws std::invalid_argument listing every violated invariant.
  void validate() const;
};

// The baseline parameter set used throughout the experiments: 4 radar Tx/Rx,
// 4 RRHs, 2 UL / 2 DL UEs, K = 16, L = 32, unit powers. Node positions are
// left empty; presets or callers fill them in.
Scenario default_parameters();

}  // namespace disac
