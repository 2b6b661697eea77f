#pragma once

#include <Eigen/Dense>
#include <optional>

namespace disac {

// Distances are in kilometers, velocities in km/s, delays in seconds,
// Doppler in Hz. Default speed of light matches the km convention.
inline constexpr double kSpeedOfLightKmPerS = 3.0e5;

// Below this leg length (km) the Doppler projection is treated as singular.
inline constexpr double kDegenerateRangeKm = 1e-6;

struct Position2D {
  double x = 0.0;
  double y = 0.0;
};

// Planar position + velocity of one target; the kinematic state vector.
struct TargetState {
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;

  Eigen::Vector4d vec() const { return {x, y, vx, vy}; }
  static TargetState from_vec(const Eigen::Vector4d& v) {
    return {v[0], v[1], v[2], v[3]};
  }
  Position2D position() const { return {x, y}; }
};

struct ObservationPair {
  double delay = 0.0;    // s
  double doppler = 0.0;  // Hz
};

double euclidean(const Position2D& a, const Position2D& b);

// Sum of the Tx->target and target->Rx legs (km). Symmetric in tx/rx.
double bistatic_range(const Position2D& tx, const Position2D& rx,
                      const TargetState& s);

// Delay/Doppler observation of a target through one bistatic channel.
// wavelength is in meters. Throws std::domain_error when a leg is shorter
// than kDegenerateRangeKm (Doppler projection singular).
ObservationPair observe(const Position2D& tx, const Position2D& rx,
                        const TargetState& s, double wavelength_m,
                        double speed_of_light = kSpeedOfLightKmPerS);

// 2x4 Jacobian of observe() w.r.t. [x, y, vx, vy]; row 0 = delay, row 1 =
// Doppler. Closed form; the delay row has zero velocity partials.
Eigen::Matrix<double, 2, 4> observation_jacobian(
    const Position2D& tx, const Position2D& rx, const TargetState& s,
    double wavelength_m, double speed_of_light = kSpeedOfLightKmPerS);

// Constant-velocity propagation over dt seconds, optional additive noise.
TargetState propagate(const TargetState& s, double dt,
                      const std::optional<Eigen::Vector4d>& noise = {});

}  // namespace disac
