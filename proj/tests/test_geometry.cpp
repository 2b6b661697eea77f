#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "disac/geometry.hpp"
#include "disac/rng.hpp"
#include "disac/track.hpp"

using namespace disac;

TEST_CASE("bistatic range: monostatic doubling and collinear geometry") {
  TargetState tgt{150, 0, 0, 0};
  CHECK(bistatic_range({0, 0}, {0, 0}, tgt) == doctest::Approx(300.0));
  CHECK(bistatic_range({0, 0}, {300, 0}, tgt) == doctest::Approx(300.0));
}

TEST_CASE("bistatic range: direct arithmetic oracle on circular nodes") {
  const Position2D tx{-10, 10}, rx{-10, -10};
  const TargetState tgt{25, 6, 0, 0};
  const double leg1 = std::sqrt(35.0 * 35.0 + 4.0 * 4.0);
  const double leg2 = std::sqrt(35.0 * 35.0 + 16.0 * 16.0);
  CHECK(bistatic_range(tx, rx, tgt) == doctest::Approx(leg1 + leg2).epsilon(1e-12));
}

TEST_CASE("bistatic range is symmetric in tx/rx") {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const Position2D tx{rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const Position2D rx{rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const TargetState s{rng.uniform(-100, 100), rng.uniform(-100, 100), 0, 0};
    CHECK(bistatic_range(tx, rx, s) == doctest::Approx(bistatic_range(rx, tx, s)));
  }
}

TEST_CASE("observe: stationary target has zero Doppler") {
  const auto obs = observe({3, 1}, {-2, 7}, {40, -12, 0, 0}, 0.025);
  CHECK(obs.doppler == 0.0);
}

TEST_CASE("observe: monostatic radial case gives 2v/lambda") {
  const double lambda_m = 25.0;  // 25 m = 0.025 km
  const double v = 0.4;          // km/s, receding along +x
  const auto obs = observe({0, 0}, {0, 0}, {100, 0, v, 0}, lambda_m);
  CHECK(obs.doppler == doctest::Approx(2.0 * v / 0.025).epsilon(1e-12));
}

TEST_CASE("observe: delay forced by c = 3e5 km/s") {
  const auto obs = observe({0, 0}, {0, 0}, {150, 0, 0, 0}, 0.025);
  CHECK(obs.delay == doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("observe: degenerate geometry throws") {
  CHECK_THROWS_AS(observe({0, 0}, {5, 5}, {0, 0, 1, 0}, 0.025),
                  std::domain_error);
}

TEST_CASE("doppler is linear in velocity for fixed positions") {
  const Position2D tx{1, 2}, rx{-4, 6};
  const double lam = 0.025;
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const double x = rng.uniform(10, 60), y = rng.uniform(-60, -10);
    const double v1 = rng.uniform(-1, 1), v2 = rng.uniform(-1, 1);
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    const double fa = observe(tx, rx, {x, y, v1, v2}, lam).doppler;
    const double fb = observe(tx, rx, {x, y, a * v1, a * v2}, lam).doppler;
    CHECK(fb == doctest::Approx(a * fa).epsilon(1e-11));
    const double fsum =
        observe(tx, rx, {x, y, v1 + b, v2 - b}, lam).doppler;
    const double fb_only = observe(tx, rx, {x, y, b, -b}, lam).doppler;
    CHECK(fsum == doctest::Approx(fa + fb_only).epsilon(1e-9));
  }
}

TEST_CASE("jacobian: delay row has zero velocity partials, d delay/dx = 2/c "
          "for collinear monostatic") {
  const auto jac = observation_jacobian({0, 0}, {0, 0}, {150, 0, 0.3, -0.1},
                                        0.025);
  CHECK(jac(0, 2) == 0.0);
  CHECK(jac(0, 3) == 0.0);
  CHECK(jac(0, 0) == doctest::Approx(2.0 / kSpeedOfLightKmPerS).epsilon(1e-12));
}

TEST_CASE("jacobian matches central finite differences") {
  Rng rng(17);
  const double step = 1e-6;
  for (int trial = 0; trial < 30; ++trial) {
    const Position2D tx{rng.uniform(-20, 20), rng.uniform(-20, 20)};
    const Position2D rx{rng.uniform(-20, 20), rng.uniform(-20, 20)};
    const TargetState s{rng.uniform(30, 80), rng.uniform(30, 80),
                        rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    const auto jac = observation_jacobian(tx, rx, s, 0.025);
    for (int comp = 0; comp < 4; ++comp) {
      Eigen::Vector4d delta = Eigen::Vector4d::Zero();
      delta[comp] = step;
      const TargetState hi = TargetState::from_vec(s.vec() + delta);
      const TargetState lo = TargetState::from_vec(s.vec() - delta);
      const auto oh = observe(tx, rx, hi, 0.025);
      const auto ol = observe(tx, rx, lo, 0.025);
      const double fd_delay = (oh.delay - ol.delay) / (2 * step);
      const double fd_doppler = (oh.doppler - ol.doppler) / (2 * step);
      const double scale_delay = std::max(std::abs(jac(0, comp)), 1e-12);
      CHECK(std::abs(fd_delay - jac(0, comp)) / scale_delay < 1e-4);
      const double scale_doppler = std::max(std::abs(jac(1, comp)), 1e-6);
      CHECK(std::abs(fd_doppler - jac(1, comp)) / scale_doppler < 1e-4);
    }
  }
}

TEST_CASE("propagate: linear motion and fixed point") {
  const TargetState s{0, 0, 1, 2};
  const TargetState out = propagate(s, 3.2);
  CHECK(out.x == doctest::Approx(3.2));
  CHECK(out.y == doctest::Approx(6.4));
  CHECK(out.vx == 1.0);
  CHECK(out.vy == 2.0);

  const TargetState still{5, -3, 0, 0};
  const TargetState kept = propagate(still, 10.0);
  CHECK(kept.x == 5.0);
  CHECK(kept.y == -3.0);
}

TEST_CASE("propagate composes: two steps equal one combined step") {
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const TargetState s{rng.uniform(-10, 10), rng.uniform(-10, 10),
                        rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const double a = rng.uniform(0.1, 3), b = rng.uniform(0.1, 3);
    const TargetState two = propagate(propagate(s, a), b);
    const TargetState one = propagate(s, a + b);
    CHECK(two.x == doctest::Approx(one.x).epsilon(1e-12));
    CHECK(two.y == doctest::Approx(one.y).epsilon(1e-12));
  }
}

TEST_CASE("process-noise draws reproduce Q within 5% per entry") {
  const double dt = 3.2;
  const MotionModel model =
      MotionModel::nearly_constant_velocity(dt, 1e-4, 1e-4);
  const Eigen::Matrix4d chol =
      Eigen::LLT<Eigen::Matrix4d>(model.process_noise +
                                  1e-18 * Eigen::Matrix4d::Identity())
          .matrixL();
  Rng rng(23);
  const int n = 100000;
  Eigen::Matrix4d acc = Eigen::Matrix4d::Zero();
  for (int i = 0; i < n; ++i) {
    Eigen::Vector4d g;
    for (int c = 0; c < 4; ++c) g[c] = rng.gaussian();
    const Eigen::Vector4d v = chol * g;
    acc += v * v.transpose();
  }
  acc /= n;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const double expect = model.process_noise(r, c);
      if (std::abs(expect) < 1e-18) continue;
      CHECK(std::abs(acc(r, c) - expect) / std::abs(expect) < 0.05);
    }
  }
}
