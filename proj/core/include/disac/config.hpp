#pragma once

#include <optional>
#include <string>
#include <vector>

#include "disac/scenario.hpp"

namespace disac {

enum class ExperimentKind {
  kCodesignConvergence,
  kSystemSweep,
  kAssociationPc,
  kTracking,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct AssociationConfig {
  std::vector<int> target_counts = {2, 3, 4, 5};
  double disc_radius_km = 300.0;
  double speed_min = 0.0;
  double speed_max = 50.0;
  // Measurement error scales; defaults are one delay resolution cell and a
  // Doppler spread-scale value that keeps the association informative.
  double sigma_delay_s = 6.25e-3;
  double sigma_doppler_hz = 3e5;
};

struct TrackingConfig {
  int cpis = 50;
  double sigma_delay_s = 2e-6;
  double sigma_doppler_hz = 50.0;
  double detection_prob = 0.9;
  double false_alarm_prob = 0.001;
  double process_noise = 1e-4;
  double gate_probability = 0.99;
  double init_pos_sigma_km = 1.0;
  double init_vel_sigma = 0.1;
  int max_consecutive_misses = 3;
};

struct CodesignConfig {
  int bcd_iters = 100;
  int dual_iters = 100;
  std::string step_rule = "bb";  // "bb" | "polyak"
  double csi_error = 0.0;
};

struct SweepConfig {
  std::string axis = "si_attenuation";  // or "snr"
  std::vector<double> values;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kTracking;
  std::string preset;  // empty when the scenario is inline
  Scenario scenario;
  int trials = 1;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  AssociationConfig association;
  TrackingConfig tracking;
  CodesignConfig codesign;
  SweepConfig sweep;

  void validate() const;
};

// Parses and validates a config file. Unknown keys are rejected; a named
// preset is expanded to explicit coordinates.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

std::string config_to_json_text(const ExperimentConfig& cfg);
void save_config(const ExperimentConfig& cfg, const std::string& path);

}  // namespace disac
