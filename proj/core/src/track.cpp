#include "disac/track.hpp"

#include <cmath>
#include <stdexcept>

#include "disac/geometry.hpp"

namespace disac {

MotionModel MotionModel::nearly_constant_velocity(double dt, double accel_var_x,
                                                  double accel_var_y) {
  MotionModel m;
  m.transition = Eigen::Matrix4d::Identity();
  m.transition(0, 2) = dt;
  m.transition(1, 3) = dt;

  const Eigen::Matrix2d nu =
      Eigen::Vector2d(accel_var_x, accel_var_y).asDiagonal();
  m.process_noise.setZero();
  m.process_noise.block<2, 2>(0, 0) = std::pow(dt, 4) / 4.0 * nu;
  m.process_noise.block<2, 2>(0, 2) = std::pow(dt, 3) / 2.0 * nu;
  m.process_noise.block<2, 2>(2, 0) = std::pow(dt, 3) / 2.0 * nu;
  m.process_noise.block<2, 2>(2, 2) = std::pow(dt, 2) * nu;
  return m;
}

Track ekf_predict(const Track& track, const MotionModel& model) {
  Track out = track;
  const Eigen::Vector4d x = model.transition * track.mean.vec();
  out.mean = TargetState::from_vec(x);
  out.covariance = model.transition * track.covariance *
                       model.transition.transpose() +
                   model.process_noise;
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

Track ekf_update(const Track& predicted, const Eigen::Vector2d& z,
                 const ChannelGeometry& geom,
                 const Eigen::Matrix2d& meas_noise) {
  const ObservationPair pred_obs =
      observe(geom.tx, geom.rx, predicted.mean, geom.wavelength_m,
              geom.speed_of_light);
  const Eigen::Matrix<double, 2, 4> jac =
      observation_jacobian(geom.tx, geom.rx, predicted.mean, geom.wavelength_m,
                           geom.speed_of_light);

  const Eigen::Matrix2d s =
      jac * predicted.covariance * jac.transpose() + meas_noise;
  const double det = s.determinant();
  if (!(det > 0) || !std::isfinite(det)) {
    throw std::domain_error("ekf_update: singular residual covariance");
  }
  const Eigen::Matrix<double, 4, 2> gain =
      predicted.covariance * jac.transpose() * s.inverse();

  const Eigen::Vector2d residual =
      z - Eigen::Vector2d(pred_obs.delay, pred_obs.doppler);

  Track out = predicted;
  out.mean = TargetState::from_vec(predicted.mean.vec() + gain * residual);
  const Eigen::Matrix4d left =
      Eigen::Matrix4d::Identity() - gain * jac;
  out.covariance = left * predicted.covariance * left.transpose() +
                   gain * meas_noise * gain.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

Track fuse_jpda(const Track& base,
                const std::vector<MixtureComponent>& comps) {
  if (comps.empty()) {
    throw std::invalid_argument("fuse_jpda: empty component set");
  }
  double total = 0.0;
  for (const auto& c : comps) total += c.weight;
  if (!(total > 0)) {
    throw std::invalid_argument("fuse_jpda: weights sum to zero");
  }

  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  for (const auto& c : comps) mean += c.weight / total * c.mean;

  Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
  for (const auto& c : comps) {
    cov += c.weight / total * (c.covariance + c.mean * c.mean.transpose());
  }
  cov -= mean * mean.transpose();

  Track out = base;
  out.mean = TargetState::from_vec(mean);
  out.covariance = 0.5 * (cov + cov.transpose()).eval();
  return out;
}

double track_existence(const std::vector<double>& supertarget_existence) {
  if (supertarget_existence.empty()) {
    throw std::invalid_argument("track_existence: empty input");
  }
  double sum = 0.0;
  for (double e : supertarget_existence) sum += e;
  return sum / supertarget_existence.size();
}

std::vector<Track> run_tracker(const Scenario& sc,
                               const std::vector<CpiMeasurements>& stream,
                               const TrackerConfig& cfg,
                               std::vector<Track> tracks) {
  const double gate_th = gate_threshold(cfg.gate_probability);
  const double wavelength = sc.wavelength_m();

  for (int cpi = 0; cpi < static_cast<int>(stream.size()); ++cpi) {
    // Prediction.
    for (auto& track : tracks) {
      if (track.lost) continue;
      track = ekf_predict(track, cfg.model);
    }

    std::vector<double> existence_acc(tracks.size(), 0.0);
    std::vector<int> existence_count(tracks.size(), 0);
    std::vector<bool> any_gated(tracks.size(), false);

    for (const auto& channel : stream[cpi]) {
      const ChannelGeometry geom{sc.radar_tx[channel.tx],
                                 sc.radar_rx[channel.rx], wavelength,
                                 sc.speed_of_light};

      // Gating against the current (sequentially updated) state.
      std::vector<SupertargetHypothesis> hyps;
      std::vector<int> live;  // track index per hypothesis
      std::vector<Eigen::Vector2d> predicted_obs;
      std::vector<Eigen::Matrix2d> innovation;
      for (int t = 0; t < static_cast<int>(tracks.size()); ++t) {
        if (tracks[t].lost) continue;
        if (cfg.min_leg_km > 0.0) {
          const Position2D at = tracks[t].mean.position();
          if (euclidean(geom.tx, at) < cfg.min_leg_km ||
              euclidean(geom.rx, at) < cfg.min_leg_km) {
            continue;  // near-field flyby; observation model invalid
          }
        }
        const ObservationPair obs =
            observe(geom.tx, geom.rx, tracks[t].mean, wavelength,
                    sc.speed_of_light);
        const Eigen::Matrix<double, 2, 4> jac = observation_jacobian(
            geom.tx, geom.rx, tracks[t].mean, wavelength, sc.speed_of_light);
        const Eigen::Vector2d zhat(obs.delay, obs.doppler);
        const Eigen::Matrix2d s =
            jac * tracks[t].covariance * jac.transpose() + cfg.meas_noise;

        SupertargetHypothesis hyp;
        hyp.prior_existence = tracks[t].existence;
        hyp.gated = gate(channel.z, zhat, s, gate_th);
        const Eigen::Matrix2d s_inv = s.inverse();
        const double norm_const =
            1.0 / (2.0 * M_PI * std::sqrt(s.determinant()));
        for (int gi : hyp.gated) {
          const Eigen::Vector2d d = channel.z[gi] - zhat;
          hyp.likelihood.push_back(norm_const *
                                   std::exp(-0.5 * d.dot(s_inv * d)));
        }
        hyps.push_back(std::move(hyp));
        live.push_back(t);
        predicted_obs.push_back(zhat);
        innovation.push_back(s);
      }
      if (hyps.empty()) continue;

      const auto events = enumerate_fje(hyps, cfg.fje_pd, cfg.gate_probability,
                                        cfg.clutter_density);
      const auto marginals =
          marginalize(events, hyps, cfg.fje_pd, cfg.gate_probability);

      for (std::size_t h = 0; h < hyps.size(); ++h) {
        const int t = live[h];
        const auto& hyp = hyps[h];
        const auto& marg = marginals[h];
        if (!hyp.gated.empty()) any_gated[t] = true;

        std::vector<MixtureComponent> comps;
        comps.push_back(
            {tracks[t].mean.vec(), tracks[t].covariance, marg.beta[0]});
        for (std::size_t g = 0; g < hyp.gated.size(); ++g) {
          if (marg.beta[1 + g] <= 0.0) continue;
          const Track updated = ekf_update(tracks[t], channel.z[hyp.gated[g]],
                                           geom, cfg.meas_noise);
          comps.push_back(
              {updated.mean.vec(), updated.covariance, marg.beta[1 + g]});
        }
        tracks[t] = fuse_jpda(tracks[t], comps);
        existence_acc[t] += marg.existence;
        existence_count[t] += 1;
      }
    }

    // Existence update, loss pruning, history.
    for (int t = 0; t < static_cast<int>(tracks.size()); ++t) {
      if (tracks[t].lost) continue;
      if (existence_count[t] > 0) {
        tracks[t].existence = existence_acc[t] / existence_count[t];
      }
      if (any_gated[t]) {
        tracks[t].consecutive_misses = 0;
      } else {
        tracks[t].consecutive_misses += 1;
        if (tracks[t].consecutive_misses >= cfg.max_consecutive_misses) {
          tracks[t].lost = true;
        }
      }
      tracks[t].history.push_back(
          {cpi, tracks[t].mean, tracks[t].covariance, tracks[t].existence});
    }
  }
  return tracks;
}

}  // namespace disac
