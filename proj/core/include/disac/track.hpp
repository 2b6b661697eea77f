#pragma once

#include <Eigen/Dense>
#include <vector>

#include "disac/associate.hpp"
#include "disac/scenario.hpp"

namespace disac {

// Nearly-constant-velocity motion over one CPI.
struct MotionModel {
  Eigen::Matrix4d transition;     // F
  Eigen::Matrix4d process_noise;  // Q

  // dt is the CPI duration K*T_r; accel_var_* are the process noise
  // intensities on each axis.
  static MotionModel nearly_constant_velocity(double dt, double accel_var_x,
                                              double accel_var_y);
};

struct Track {
  TargetState mean;
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Identity();
  double existence = 1.0;
  int id = 0;
  int consecutive_misses = 0;
  bool lost = false;

  struct Snapshot {
    int cpi;
    TargetState mean;
    Eigen::Matrix4d covariance;
    double existence;
  };
  std::vector<Snapshot> history;
};

// One bistatic channel's fixed geometry, as seen by the filter.
struct ChannelGeometry {
  Position2D tx;
  Position2D rx;
  double wavelength_m = 0.025;
  double speed_of_light = kSpeedOfLightKmPerS;
};

Track ekf_predict(const Track& track, const MotionModel& model);

// EKF measurement update with a (delay, Doppler) measurement from one
// channel. Joseph-form covariance update keeps the result symmetric PSD.
Track ekf_update(const Track& predicted, const Eigen::Vector2d& z,
                 const ChannelGeometry& geom,
                 const Eigen::Matrix2d& meas_noise);

struct MixtureComponent {
  Eigen::Vector4d mean;
  Eigen::Matrix4d covariance;
  double weight = 0.0;
};

// Moment-matched Gaussian mixture fusion. Weights are renormalized to one;
// a single component is returned exactly.
Track fuse_jpda(const Track& base, const std::vector<MixtureComponent>& comps);

// Posterior track presence: arithmetic mean over supertarget existences.
double track_existence(const std::vector<double>& supertarget_existence);

struct TrackerConfig {
  MotionModel model =
      MotionModel::nearly_constant_velocity(3.2, 1e-4, 1e-4);
  Eigen::Matrix2d meas_noise = Eigen::Matrix2d::Identity();
  double detection_prob = 0.9;
  double gate_probability = 0.99;
  double clutter_density = 1e-3;  // per unit delay x Doppler volume
  int max_consecutive_misses = 3;
  double fje_pd = 0.9;  // detection probability assumed by the JPDA
  // Channels whose predicted geometry has a leg shorter than this are
  // skipped for the CPI; the far-field observation model does not hold
  // through a node flyby. Zero disables the guard.
  double min_leg_km = 3.0;
};

// Measurements of one channel for one CPI.
struct ChannelMeasurements {
  int tx = 0;
  int rx = 0;
  std::vector<Eigen::Vector2d> z;
};
using CpiMeasurements = std::vector<ChannelMeasurements>;

// JPDA-EKF multi-target tracker. Channels are processed sequentially within
// each CPI: gate -> fusion-junction enumeration -> per-supertarget EKF
// update -> mixture fusion, then existence update and loss pruning.
std::vector<Track> run_tracker(const Scenario& sc,
                               const std::vector<CpiMeasurements>& stream,
                               const TrackerConfig& cfg,
                               std::vector<Track> tracks);

}  // namespace disac
