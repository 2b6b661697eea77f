#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "disac/presets.hpp"
#include "disac/stats.hpp"
#include "disac/track.hpp"

using namespace disac;

namespace {

Eigen::Matrix4d sym(const Eigen::Matrix4d& m) {
  return 0.5 * (m + m.transpose());
}

bool is_psd(const Eigen::Matrix4d& m, double tol = 1e-9) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(sym(m));
  return eig.eigenvalues().minCoeff() >= -tol;
}

}  // namespace

TEST_CASE("motion model has the stated block structure") {
  const double dt = 3.2;
  const MotionModel m = MotionModel::nearly_constant_velocity(dt, 1e-4, 4e-4);
  CHECK(m.transition(0, 2) == dt);
  CHECK(m.transition(1, 3) == dt);
  CHECK(m.transition(0, 1) == 0.0);
  CHECK(m.process_noise(0, 0) ==
        doctest::Approx(std::pow(dt, 4) / 4.0 * 1e-4));
  CHECK(m.process_noise(1, 3) ==
        doctest::Approx(std::pow(dt, 3) / 2.0 * 4e-4));
  CHECK(m.process_noise(2, 2) == doctest::Approx(dt * dt * 1e-4));
  CHECK(is_psd(m.process_noise));
}

TEST_CASE("ekf_predict: identity limit and exact covariance recursion") {
  Track track;
  track.mean = {1, 2, 0.3, -0.4};
  track.covariance = Eigen::Vector4d(0.5, 0.5, 0.1, 0.1).asDiagonal();

  MotionModel still;
  still.transition = Eigen::Matrix4d::Identity();
  still.process_noise = Eigen::Matrix4d::Zero();
  const Track same = ekf_predict(track, still);
  CHECK(same.mean.x == track.mean.x);
  CHECK((same.covariance - track.covariance).norm() < 1e-15);

  const MotionModel m = MotionModel::nearly_constant_velocity(2.0, 1e-3, 1e-3);
  const Track pred = ekf_predict(track, m);
  // Mean agrees with propagate().
  const TargetState prop = propagate(track.mean, 2.0);
  CHECK(pred.mean.x == doctest::Approx(prop.x));
  CHECK(pred.mean.y == doctest::Approx(prop.y));
  // P_pred - F P F^T = Q exactly.
  const Eigen::Matrix4d diff =
      pred.covariance -
      m.transition * track.covariance * m.transition.transpose();
  CHECK((diff - m.process_noise).norm() < 1e-12);

  // Stationary covariance growth under repeated prediction.
  Track t2 = track;
  double prev_trace = t2.covariance.trace();
  for (int i = 0; i < 100; ++i) {
    t2 = ekf_predict(t2, m);
    CHECK(t2.covariance.trace() > prev_trace);
    prev_trace = t2.covariance.trace();
  }
}

TEST_CASE("ekf_update: zero innovation keeps the mean, shrinks covariance") {
  const ChannelGeometry geom{{-10, 10}, {-10, -10}, 0.025,
                             kSpeedOfLightKmPerS};
  Track track;
  track.mean = {25, 6, -0.4, -0.2};
  track.covariance = Eigen::Vector4d(1, 1, 0.01, 0.01).asDiagonal();
  const Eigen::Matrix2d omega =
      Eigen::Vector2d(1e-12, 2500.0).asDiagonal();

  const ObservationPair obs =
      observe(geom.tx, geom.rx, track.mean, geom.wavelength_m);
  const Track updated =
      ekf_update(track, {obs.delay, obs.doppler}, geom, omega);
  CHECK(updated.mean.x == doctest::Approx(track.mean.x).epsilon(1e-9));
  CHECK(updated.mean.y == doctest::Approx(track.mean.y).epsilon(1e-9));
  CHECK(updated.covariance.trace() < track.covariance.trace());
  CHECK(is_psd(updated.covariance));
}

TEST_CASE("ekf_update matches a classical KF on a linear measurement stub") {
  // A channel whose Jacobian is essentially constant over the update:
  // far-away monostatic geometry, tiny covariance.
  const ChannelGeometry geom{{1000, 0}, {1000, 0}, 0.025,
                             kSpeedOfLightKmPerS};
  Track track;
  track.mean = {10, 0, 0.1, 0.0};
  track.covariance = Eigen::Vector4d(1e-4, 1e-4, 1e-6, 1e-6).asDiagonal();
  const Eigen::Matrix2d omega = Eigen::Vector2d(1e-10, 100.0).asDiagonal();

  const ObservationPair obs =
      observe(geom.tx, geom.rx, track.mean, geom.wavelength_m);
  const Eigen::Matrix<double, 2, 4> jac =
      observation_jacobian(geom.tx, geom.rx, track.mean, geom.wavelength_m);
  const Eigen::Vector2d z(obs.delay + 2e-6, obs.doppler - 3.0);

  const Track ekf = ekf_update(track, z, geom, omega);

  // Classical KF with the fixed linearization.
  const Eigen::Matrix2d s =
      jac * track.covariance * jac.transpose() + omega;
  const Eigen::Matrix<double, 4, 2> k =
      track.covariance * jac.transpose() * s.inverse();
  const Eigen::Vector2d resid =
      z - Eigen::Vector2d(obs.delay, obs.doppler);
  const Eigen::Vector4d mean_kf = track.mean.vec() + k * resid;
  const Eigen::Matrix4d left = Eigen::Matrix4d::Identity() - k * jac;
  const Eigen::Matrix4d cov_kf =
      left * track.covariance * left.transpose() + k * omega * k.transpose();

  CHECK((ekf.mean.vec() - mean_kf).norm() < 1e-9 * mean_kf.norm() + 1e-12);
  CHECK((ekf.covariance - cov_kf).norm() < 1e-9);
}

TEST_CASE("ekf_update: uninformative measurement changes nothing") {
  const ChannelGeometry geom{{-10, 10}, {8, -8}, 0.025, kSpeedOfLightKmPerS};
  Track track;
  track.mean = {15, 16, 0.4, -0.2};
  track.covariance = Eigen::Vector4d(1, 1, 0.01, 0.01).asDiagonal();
  const ObservationPair obs =
      observe(geom.tx, geom.rx, track.mean, geom.wavelength_m);
  const Eigen::Matrix2d huge =
      1e6 * Eigen::Vector2d(1e-6, 1e4).asDiagonal().toDenseMatrix();
  const Track updated = ekf_update(
      track, {obs.delay + 1e-5, obs.doppler + 100.0}, geom, huge);
  CHECK((updated.mean.vec() - track.mean.vec()).norm() /
            track.mean.vec().norm() <
        1e-3);
  CHECK((updated.covariance - track.covariance).norm() /
            track.covariance.norm() <
        1e-3);
}

TEST_CASE("fuse_jpda: identity, equal components, moment-matching oracle") {
  Track base;
  base.mean = {0, 0, 0, 0};

  MixtureComponent a{Eigen::Vector4d(1, 2, 0.1, 0.2),
                     Eigen::Vector4d(0.5, 0.4, 0.01, 0.02).asDiagonal(), 1.0};
  const Track single = fuse_jpda(base, {a});
  CHECK((single.mean.vec() - a.mean).norm() < 1e-14);
  CHECK((single.covariance - a.covariance).norm() < 1e-14);

  MixtureComponent b = a;
  b.weight = 2.0;  // same moments, different raw weight
  const Track twin = fuse_jpda(base, {a, b});
  CHECK((twin.mean.vec() - a.mean).norm() < 1e-13);
  CHECK((twin.covariance - a.covariance).norm() < 1e-13);

  // Two-component case against a sampling oracle.
  MixtureComponent c1{Eigen::Vector4d(0, 0, 0, 0),
                      Eigen::Vector4d(1.0, 0.5, 0.1, 0.1).asDiagonal(), 0.3};
  MixtureComponent c2{Eigen::Vector4d(2, -1, 0.2, 0.0),
                      Eigen::Vector4d(0.5, 1.5, 0.05, 0.2).asDiagonal(), 0.7};
  const Track fused = fuse_jpda(base, {c1, c2});

  Rng rng(5);
  const int n = 1000000;
  Eigen::Vector4d mean_acc = Eigen::Vector4d::Zero();
  Eigen::Matrix4d sq_acc = Eigen::Matrix4d::Zero();
  for (int i = 0; i < n; ++i) {
    const MixtureComponent& comp = rng.uniform() < 0.3 ? c1 : c2;
    Eigen::Vector4d x = comp.mean;
    for (int d = 0; d < 4; ++d) {
      x[d] += std::sqrt(comp.covariance(d, d)) * rng.gaussian();
    }
    mean_acc += x;
    sq_acc += x * x.transpose();
  }
  mean_acc /= n;
  const Eigen::Matrix4d cov_mc =
      sq_acc / n - mean_acc * mean_acc.transpose();
  CHECK((fused.mean.vec() - mean_acc).norm() < 0.01);
  CHECK((fused.covariance - cov_mc).norm() / cov_mc.norm() < 0.01);

  // Spread term keeps the fused covariance above the weighted average.
  const Eigen::Matrix4d avg = 0.3 * c1.covariance + 0.7 * c2.covariance;
  CHECK(is_psd(fused.covariance - avg));

  // Permutation invariance.
  const Track swapped = fuse_jpda(base, {c2, c1});
  CHECK((swapped.mean.vec() - fused.mean.vec()).norm() < 1e-12);

  CHECK_THROWS(fuse_jpda(base, {}));
}

TEST_CASE("track existence: mean, bounds, reordering invariance") {
  CHECK(track_existence({1, 1, 1}) == doctest::Approx(1.0));
  CHECK(track_existence({0.2, 0.4, 0.6, 0.8}) == doctest::Approx(0.5));
  CHECK(track_existence({0.8, 0.6, 0.4, 0.2}) == doctest::Approx(0.5));
  CHECK_THROWS(track_existence({}));
}

TEST_CASE("run_tracker: noiseless single target converges to truth") {
  Scenario sc = preset_scenario("circular");
  sc.targets = {{25, 6, -0.4, -0.2}};
  const int cpis = 50;
  const double dt = sc.cpi_duration_s();

  // Exact measurements, perfect detection, no clutter. Epoch c holds the
  // state after c+1 transitions from the initial prior.
  std::vector<TargetState> truth = {propagate(sc.targets[0], dt)};
  for (int c = 1; c < cpis; ++c) truth.push_back(propagate(truth.back(), dt));

  std::vector<CpiMeasurements> stream(cpis);
  for (int c = 0; c < cpis; ++c) {
    for (int mr = 0; mr < sc.num_radar_tx(); ++mr) {
      for (int nr = 0; nr < sc.num_radar_rx(); ++nr) {
        const ObservationPair obs = observe(sc.radar_tx[mr], sc.radar_rx[nr],
                                            truth[c], sc.wavelength_m());
        stream[c].push_back({mr, nr, {{obs.delay, obs.doppler}}});
      }
    }
  }

  TrackerConfig cfg;
  cfg.model = MotionModel::nearly_constant_velocity(dt, 1e-12, 1e-12);
  cfg.meas_noise = Eigen::Vector2d(1e-12, 1e-2).asDiagonal();
  cfg.detection_prob = 1.0;
  cfg.fje_pd = 1.0 - 1e-9;
  cfg.gate_probability = 1.0 - 1e-12;
  cfg.clutter_density = 1e-12;

  std::vector<Track> init(1);
  init[0].mean = sc.targets[0];
  init[0].covariance = Eigen::Vector4d(1, 1, 0.01, 0.01).asDiagonal();
  init[0].existence = 0.9;

  const auto tracks = run_tracker(sc, stream, cfg, init);
  REQUIRE(tracks.size() == 1);
  CHECK_FALSE(tracks[0].lost);
  REQUIRE(tracks[0].history.size() == cpis);
  double worst = 0.0;
  for (int c = 5; c < cpis; ++c) {
    worst = std::max(worst,
                     euclidean(tracks[0].history[c].mean.position(),
                               truth[c].position()));
  }
  CHECK(worst < 1e-6);
  CHECK(tracks[0].existence > 0.99);
  for (const auto& snap : tracks[0].history) {
    CHECK(is_psd(snap.covariance));
  }
}

TEST_CASE("run_tracker drops a track after consecutive empty gates") {
  Scenario sc = preset_scenario("circular");
  sc.targets = {{25, 6, -0.4, -0.2}};
  const int cpis = 6;
  std::vector<CpiMeasurements> stream(cpis);
  for (int c = 0; c < cpis; ++c) {
    for (int mr = 0; mr < sc.num_radar_tx(); ++mr) {
      for (int nr = 0; nr < sc.num_radar_rx(); ++nr) {
        stream[c].push_back({mr, nr, {}});  // nothing ever detected
      }
    }
  }
  TrackerConfig cfg;
  cfg.model = MotionModel::nearly_constant_velocity(3.2, 1e-6, 1e-6);
  cfg.meas_noise = Eigen::Vector2d(1e-10, 100.0).asDiagonal();
  cfg.max_consecutive_misses = 3;

  std::vector<Track> init(1);
  init[0].mean = sc.targets[0];
  init[0].covariance = Eigen::Vector4d(1, 1, 0.01, 0.01).asDiagonal();
  const auto tracks = run_tracker(sc, stream, cfg, init);
  CHECK(tracks[0].lost);
  CHECK(tracks[0].history.size() == 3);
}

TEST_CASE("single-target NEES stays within the 95% chi-square band") {
  // Consistency: measurements generated exactly per the filter's model. A
  // receding trajectory keeps ranges large so the linearization stays mild.
  Scenario sc = preset_scenario("circular");
  sc.targets = {{40, 30, 0.3, 0.15}};
  const int cpis = 30, runs = 200;
  const double dt = sc.cpi_duration_s();
  const double q = 1e-4;
  const MotionModel model = MotionModel::nearly_constant_velocity(dt, q, q);
  const Eigen::Matrix4d chol_q =
      Eigen::LLT<Eigen::Matrix4d>(model.process_noise +
                                  1e-18 * Eigen::Matrix4d::Identity())
          .matrixL();
  const double sig_d = 5e-6, sig_f = 200.0;

  TrackerConfig cfg;
  cfg.model = model;
  cfg.meas_noise = Eigen::Vector2d(sig_d * sig_d, sig_f * sig_f).asDiagonal();
  cfg.detection_prob = 1.0;
  cfg.fje_pd = 1.0 - 1e-9;
  cfg.gate_probability = 1.0 - 1e-9;
  cfg.clutter_density = 1e-12;

  RngPool pool(7);
  std::vector<std::vector<double>> nees(cpis);
  for (int run = 0; run < runs; ++run) {
    Rng rng = pool.stream("nees", run);
    std::vector<TargetState> truth;
    TargetState state = sc.targets[0];
    for (int c = 0; c < cpis; ++c) {
      Eigen::Vector4d g;
      for (int i = 0; i < 4; ++i) g[i] = rng.gaussian();
      state = propagate(state, dt, std::optional<Eigen::Vector4d>(chol_q * g));
      truth.push_back(state);
    }
    std::vector<CpiMeasurements> stream(cpis);
    for (int c = 0; c < cpis; ++c) {
      for (int mr = 0; mr < sc.num_radar_tx(); ++mr) {
        for (int nr = 0; nr < sc.num_radar_rx(); ++nr) {
          const ObservationPair obs = observe(
              sc.radar_tx[mr], sc.radar_rx[nr], truth[c], sc.wavelength_m());
          stream[c].push_back(
              {mr, nr,
               {{obs.delay + sig_d * rng.gaussian(),
                 obs.doppler + sig_f * rng.gaussian()}}});
        }
      }
    }
    std::vector<Track> init(1);
    init[0].mean = {sc.targets[0].x + 0.3 * rng.gaussian(),
                    sc.targets[0].y + 0.3 * rng.gaussian(),
                    sc.targets[0].vx + 0.03 * rng.gaussian(),
                    sc.targets[0].vy + 0.03 * rng.gaussian()};
    init[0].covariance =
        Eigen::Vector4d(0.09, 0.09, 9e-4, 9e-4).asDiagonal();
    const auto tracks = run_tracker(sc, stream, cfg, init);
    REQUIRE(tracks[0].history.size() == cpis);
    for (int c = 0; c < cpis; ++c) {
      const Eigen::Vector4d err =
          tracks[0].history[c].mean.vec() - truth[c].vec();
      const Eigen::Matrix4d p = tracks[0].history[c].covariance;
      nees[c].push_back(err.dot(p.inverse() * err));
    }
  }
  const double lo = chi_square_quantile(0.025, 4.0 * runs) / runs;
  const double hi = chi_square_quantile(0.975, 4.0 * runs) / runs;
  int within = 0;
  for (int c = 0; c < cpis; ++c) {
    double mean = 0.0;
    for (double v : nees[c]) mean += v;
    mean /= runs;
    if (mean >= lo && mean <= hi) ++within;
  }
  CHECK(within >= static_cast<int>(0.9 * cpis));
}
