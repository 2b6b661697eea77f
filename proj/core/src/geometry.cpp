#include "disac/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace disac {

double euclidean(const Position2D& a, const Position2D& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double bistatic_range(const Position2D& tx, const Position2D& rx,
                      const TargetState& s) {
  const Position2D p = s.position();
  return euclidean(tx, p) + euclidean(p, rx);
}

namespace {

void check_legs(double r1, double r2) {
  if (r1 < kDegenerateRangeKm || r2 < kDegenerateRangeKm) {
    throw std::domain_error(
        "observe: target co-located with a radar node; Doppler projection "
        "is singular");
  }
}

}  // namespace

ObservationPair observe(const Position2D& tx, const Position2D& rx,
                        const TargetState& s, double wavelength_m,
                        double speed_of_light) {
  const double dx1 = s.x - tx.x, dy1 = s.y - tx.y;
  const double dx2 = s.x - rx.x, dy2 = s.y - rx.y;
  const double r1 = std::hypot(dx1, dy1);
  const double r2 = std::hypot(dx2, dy2);
  check_legs(r1, r2);

  const double wavelength_km = wavelength_m * 1e-3;
  ObservationPair obs;
  obs.delay = (r1 + r2) / speed_of_light;
  // Sum of radial velocity projections on both legs, in wavelengths/s.
  obs.doppler = ((s.vx * dx1 + s.vy * dy1) / r1 +
                 (s.vx * dx2 + s.vy * dy2) / r2) /
                wavelength_km;
  return obs;
}

Eigen::Matrix<double, 2, 4> observation_jacobian(const Position2D& tx,
                                                 const Position2D& rx,
                                                 const TargetState& s,
                                                 double wavelength_m,
                                                 double speed_of_light) {
  const double dx1 = s.x - tx.x, dy1 = s.y - tx.y;
  const double dx2 = s.x - rx.x, dy2 = s.y - rx.y;
  const double r1 = std::hypot(dx1, dy1);
  const double r2 = std::hypot(dx2, dy2);
  check_legs(r1, r2);

  const double wavelength_km = wavelength_m * 1e-3;
  Eigen::Matrix<double, 2, 4> jac = Eigen::Matrix<double, 2, 4>::Zero();

  // Delay row: gradient of (r1 + r2)/c; no velocity dependence.
  jac(0, 0) = (dx1 / r1 + dx2 / r2) / speed_of_light;
  jac(0, 1) = (dy1 / r1 + dy2 / r2) / speed_of_light;

  // Doppler row. For one leg, f_leg = (v . d)/(lambda r); the position
  // partials follow from d(1/r)/dx and the velocity partials are d/(lambda r).
  const double vd1 = s.vx * dx1 + s.vy * dy1;
  const double vd2 = s.vx * dx2 + s.vy * dy2;
  const double r1c = r1 * r1 * r1;
  const double r2c = r2 * r2 * r2;
  jac(1, 0) = (s.vx / r1 - vd1 * dx1 / r1c + s.vx / r2 - vd2 * dx2 / r2c) /
              wavelength_km;
  jac(1, 1) = (s.vy / r1 - vd1 * dy1 / r1c + s.vy / r2 - vd2 * dy2 / r2c) /
              wavelength_km;
  jac(1, 2) = (dx1 / r1 + dx2 / r2) / wavelength_km;
  jac(1, 3) = (dy1 / r1 + dy2 / r2) / wavelength_km;
  return jac;
}

TargetState propagate(const TargetState& s, double dt,
                      const std::optional<Eigen::Vector4d>& noise) {
  TargetState out{s.x + s.vx * dt, s.y + s.vy * dt, s.vx, s.vy};
  if (noise) {
    out.x += (*noise)[0];
    out.y += (*noise)[1];
    out.vx += (*noise)[2];
    out.vy += (*noise)[3];
  }
  return out;
}

}  // namespace disac
