#include "disac/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <filesystem>
#include <thread>

#include "disac/associate.hpp"
#include "disac/channel.hpp"
#include "disac/io.hpp"
#include "json.hpp"

namespace disac {

namespace {

// Runs fn(trial) for trial in [0, n) on a small thread pool; results must be
// written into per-trial slots so the output is schedule-independent.
void parallel_trials(int n, const std::function<void(int)>& fn) {
  const unsigned workers =
      std::max(1u, std::min(std::thread::hardware_concurrency(),
                            static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (int t = 0; t < n; ++t) fn(t);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int t = next.fetch_add(1); t < n; t = next.fetch_add(1)) fn(t);
    });
  }
  for (auto& th : pool) th.join();
}

// Permanent-ratio assignment; when the permanent underflows to zero (the
// flagged all-infeasible case), falls back to per-target maximum likelihood.
std::vector<int> assign_measurements(const LikelihoodMatrix& lmat) {
  try {
    return association_probabilities(lmat).assignment;
  } catch (const std::domain_error&) {
    const int n = static_cast<int>(lmat.values.rows());
    std::vector<int> assignment(n);
    for (int t = 0; t < n; ++t) {
      int best = 0;
      for (int r = 1; r < n; ++r) {
        if (lmat.values(r, t) > lmat.values(best, t)) best = r;
      }
      assignment[t] = best;
    }
    return assignment;
  }
}

struct ChannelObservation {
  std::vector<Eigen::Vector2d> truth;  // per target
  Eigen::VectorXd mixture;             // per target, RCS-proportional
};

ChannelObservation observe_channel(const Scenario& sc,
                                   const std::vector<TargetState>& targets,
                                   const std::vector<double>& gain2, int mr,
                                   int nr) {
  ChannelObservation out;
  out.mixture.resize(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const ObservationPair obs =
        observe(sc.radar_tx[mr], sc.radar_rx[nr], targets[t],
                sc.wavelength_m(), sc.speed_of_light);
    out.truth.push_back({obs.delay, obs.doppler});
    const double range =
        bistatic_range(sc.radar_tx[mr], sc.radar_rx[nr], targets[t]);
    out.mixture[t] = gain2[t] / std::pow(range, 4.0);
  }
  const double total = out.mixture.sum();
  if (total > 0) out.mixture /= total;
  return out;
}

}  // namespace

AssociationScore run_association_trial(const Scenario& sc,
                                       const AssociationConfig& cfg,
                                       const RngPool& pool, int trial,
                                       int n_targets) {
  // Geometry-independent draws so that all presets at the same seed share
  // targets, reflectivities, and measurement noise deviates.
  Rng target_rng = pool.stream("assoc-targets", trial);
  std::vector<TargetState> targets(n_targets);
  for (auto& t : targets) {
    const double radius = cfg.disc_radius_km * std::sqrt(target_rng.uniform());
    const double angle = 2.0 * M_PI * target_rng.uniform();
    const double speed = target_rng.uniform(cfg.speed_min, cfg.speed_max);
    const double heading = 2.0 * M_PI * target_rng.uniform();
    t = {radius * std::cos(angle), radius * std::sin(angle),
         speed * std::cos(heading), speed * std::sin(heading)};
  }
  Rng gain_rng = pool.stream("assoc-gains", trial);
  Rng noise_rng = pool.stream("assoc-noise", trial);

  AssociationScore score;
  const Eigen::VectorXd sig_t =
      Eigen::VectorXd::Constant(n_targets, cfg.sigma_delay_s);
  const Eigen::VectorXd sig_p =
      Eigen::VectorXd::Constant(n_targets, cfg.sigma_doppler_hz);

  for (int mr = 0; mr < sc.num_radar_tx(); ++mr) {
    for (int nr = 0; nr < sc.num_radar_rx(); ++nr) {
      std::vector<double> gain2(n_targets);
      for (auto& g : gain2) g = std::norm(gain_rng.cgaussian());
      const ChannelObservation chan =
          observe_channel(sc, targets, gain2, mr, nr);

      std::vector<Eigen::Vector2d> z(n_targets);
      for (int t = 0; t < n_targets; ++t) {
        z[t] = chan.truth[t] + Eigen::Vector2d(
                                   cfg.sigma_delay_s * noise_rng.gaussian(),
                                   cfg.sigma_doppler_hz * noise_rng.gaussian());
      }

      LikelihoodMatrix lmat;
      lmat.tx = mr;
      lmat.rx = nr;
      lmat.values.resize(n_targets, n_targets);
      for (int n = 0; n < n_targets; ++n) {
        lmat.values.row(n) = posterior_weighted_likelihood(
                                 z[n], chan.truth, chan.mixture, sig_t, sig_p)
                                 .transpose();
      }
      const std::vector<int> assignment = assign_measurements(lmat);
      for (int t = 0; t < n_targets; ++t) {
        score.correct += (assignment[t] == t);
        score.total += 1;
      }
    }
  }
  score.p_c = score.total > 0
                  ? static_cast<double>(score.correct) / score.total
                  : 0.0;
  return score;
}

std::vector<EchoSequenceRow> echo_sequence_table(const Scenario& sc,
                                                 const AssociationConfig& cfg,
                                                 const RngPool& pool,
                                                 int trial) {
  Rng gain_rng = pool.stream("echo-gains", trial);
  Rng noise_rng = pool.stream("echo-noise", trial);
  const int n_targets = sc.num_targets();
  const Eigen::VectorXd sig_t =
      Eigen::VectorXd::Constant(n_targets, cfg.sigma_delay_s);
  const Eigen::VectorXd sig_p =
      Eigen::VectorXd::Constant(n_targets, cfg.sigma_doppler_hz);

  std::vector<EchoSequenceRow> rows;
  for (int nr = 0; nr < sc.num_radar_rx(); ++nr) {
    for (int mr = 0; mr < sc.num_radar_tx(); ++mr) {
      std::vector<double> gain2(n_targets);
      for (auto& g : gain2) g = std::norm(gain_rng.cgaussian());
      const ChannelObservation chan =
          observe_channel(sc, sc.targets, gain2, mr, nr);

      std::vector<Eigen::Vector2d> z(n_targets);
      for (int t = 0; t < n_targets; ++t) {
        z[t] = chan.truth[t] + Eigen::Vector2d(
                                   cfg.sigma_delay_s * noise_rng.gaussian(),
                                   cfg.sigma_doppler_hz * noise_rng.gaussian());
      }

      EchoSequenceRow row;
      row.rx = nr;
      row.tx = mr;
      // Arrival order of the true echoes (1-based labels).
      std::vector<int> order(n_targets);
      for (int t = 0; t < n_targets; ++t) order[t] = t;
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return chan.truth[a][0] < chan.truth[b][0];
      });
      for (int t : order) row.before.push_back(t + 1);

      LikelihoodMatrix lmat;
      lmat.values.resize(n_targets, n_targets);
      for (int n = 0; n < n_targets; ++n) {
        lmat.values.row(n) = posterior_weighted_likelihood(
                                 z[n], chan.truth, chan.mixture, sig_t, sig_p)
                                 .transpose();
      }
      const std::vector<int> assignment = assign_measurements(lmat);
      // Measurements ordered by arrival, mapped to their assigned target.
      std::vector<int> meas_order(n_targets);
      for (int t = 0; t < n_targets; ++t) meas_order[t] = t;
      std::sort(meas_order.begin(), meas_order.end(),
                [&](int a, int b) { return z[a][0] < z[b][0]; });
      std::vector<int> meas_to_target(n_targets, -1);
      for (int t = 0; t < n_targets; ++t) {
        meas_to_target[assignment[t]] = t;
      }
      for (int n : meas_order) row.after.push_back(meas_to_target[n] + 1);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

TrackingTrialResult run_tracking_trial(const Scenario& sc,
                                       const TrackingConfig& cfg,
                                       const RngPool& pool, int trial) {
  const int n_targets = sc.num_targets();
  const int cpis = cfg.cpis;
  const double dt = sc.cpi_duration_s();
  const MotionModel model = MotionModel::nearly_constant_velocity(
      dt, cfg.process_noise, cfg.process_noise);
  const Eigen::Matrix4d chol_q =
      Eigen::LLT<Eigen::Matrix4d>(
          model.process_noise +
          1e-18 * Eigen::Matrix4d::Identity())
          .matrixL();

  Rng truth_rng = pool.stream("track-truth", trial);
  Rng meas_rng = pool.stream("track-meas", trial);
  Rng init_rng = pool.stream("track-init", trial);

  // Ground truth with process noise. The stated initial states are the
  // epoch-0 priors; measurement epoch c is the state after c+1 transitions,
  // matching the tracker's predict-then-update cycle.
  std::vector<std::vector<TargetState>> truth(n_targets);
  for (int t = 0; t < n_targets; ++t) {
    TargetState state = sc.targets[t];
    for (int c = 0; c < cpis; ++c) {
      Eigen::Vector4d g;
      for (int i = 0; i < 4; ++i) g[i] = truth_rng.gaussian();
      state = propagate(state, dt, std::optional<Eigen::Vector4d>(chol_q * g));
      truth[t].push_back(state);
    }
  }

  // Doppler span for the uniform false-alarm window.
  double f_span = 0.0;
  for (int mr = 0; mr < sc.num_radar_tx(); ++mr) {
    for (int nr = 0; nr < sc.num_radar_rx(); ++nr) {
      for (int t = 0; t < n_targets; ++t) {
        const ObservationPair obs =
            observe(sc.radar_tx[mr], sc.radar_rx[nr], sc.targets[t],
                    sc.wavelength_m(), sc.speed_of_light);
        f_span = std::max(f_span, std::abs(obs.doppler));
      }
    }
  }
  f_span = 1.5 * f_span + 10.0 * cfg.sigma_doppler_hz;
  const double window_volume = sc.pri_s * 2.0 * f_span;
  const int n_cells = sc.range_cells_per_pri * sc.pulses_per_cpi;
  const double fa_mean = cfg.false_alarm_prob * n_cells;
  const double clutter_density = fa_mean / window_volume;

  // Measurement stream.
  std::vector<CpiMeasurements> stream(cpis);
  // measurement index -> source target (or -1) per (cpi, channel), for the
  // triangulation baseline's oracle association.
  std::vector<std::vector<std::vector<int>>> origin(cpis);
  for (int c = 0; c < cpis; ++c) {
    for (int mr = 0; mr < sc.num_radar_tx(); ++mr) {
      for (int nr = 0; nr < sc.num_radar_rx(); ++nr) {
        ChannelMeasurements chan;
        chan.tx = mr;
        chan.rx = nr;
        std::vector<int> src;
        for (int t = 0; t < n_targets; ++t) {
          const bool detected = meas_rng.uniform() < cfg.detection_prob;
          const ObservationPair obs =
              observe(sc.radar_tx[mr], sc.radar_rx[nr], truth[t][c],
                      sc.wavelength_m(), sc.speed_of_light);
          const Eigen::Vector2d z(
              obs.delay + cfg.sigma_delay_s * meas_rng.gaussian(),
              obs.doppler + cfg.sigma_doppler_hz * meas_rng.gaussian());
          if (detected) {
            chan.z.push_back(z);
            src.push_back(t);
          }
        }
        const int fa_count = meas_rng.poisson(fa_mean);
        for (int f = 0; f < fa_count; ++f) {
          chan.z.push_back({meas_rng.uniform(0.0, sc.pri_s),
                            meas_rng.uniform(-f_span, f_span)});
          src.push_back(-1);
        }
        stream[c].push_back(std::move(chan));
        origin[c].push_back(std::move(src));
      }
    }
  }

  // Truth-plus-noise initialization.
  std::vector<Track> tracks(n_targets);
  for (int t = 0; t < n_targets; ++t) {
    tracks[t].id = t;
    tracks[t].mean = {
        sc.targets[t].x + cfg.init_pos_sigma_km * init_rng.gaussian(),
        sc.targets[t].y + cfg.init_pos_sigma_km * init_rng.gaussian(),
        sc.targets[t].vx + cfg.init_vel_sigma * init_rng.gaussian(),
        sc.targets[t].vy + cfg.init_vel_sigma * init_rng.gaussian()};
    tracks[t].covariance =
        Eigen::Vector4d(cfg.init_pos_sigma_km * cfg.init_pos_sigma_km,
                        cfg.init_pos_sigma_km * cfg.init_pos_sigma_km,
                        cfg.init_vel_sigma * cfg.init_vel_sigma,
                        cfg.init_vel_sigma * cfg.init_vel_sigma)
            .asDiagonal();
    tracks[t].existence = 0.9;
  }

  TrackerConfig tracker;
  tracker.model = model;
  tracker.meas_noise =
      Eigen::Vector2d(cfg.sigma_delay_s * cfg.sigma_delay_s,
                      cfg.sigma_doppler_hz * cfg.sigma_doppler_hz)
          .asDiagonal();
  tracker.detection_prob = cfg.detection_prob;
  tracker.fje_pd = cfg.detection_prob;
  tracker.gate_probability = cfg.gate_probability;
  tracker.clutter_density = clutter_density;
  tracker.max_consecutive_misses = cfg.max_consecutive_misses;

  const std::vector<Track> final_tracks =
      run_tracker(sc, stream, tracker, std::move(tracks));

  // Per-CPI triangulation baseline: Gauss-Newton on the oracle-associated
  // measurements of each CPI alone.
  const Eigen::Matrix2d omega_inv = tracker.meas_noise.inverse();
  TrackingTrialResult out;
  out.truth.resize(n_targets);
  out.estimate.resize(n_targets);
  out.existence.resize(n_targets);
  out.triangulation.resize(n_targets);
  out.survived.resize(n_targets);
  out.final_existence.resize(n_targets);

  for (int t = 0; t < n_targets; ++t) {
    for (int c = 0; c < cpis; ++c) {
      out.truth[t].push_back(truth[t][c].position());

      Eigen::Vector4d x = truth[t][c].vec();
      for (int it = 0; it < 5; ++it) {
        Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
        Eigen::Vector4d b = Eigen::Vector4d::Zero();
        int used = 0;
        for (std::size_t ch = 0; ch < stream[c].size(); ++ch) {
          const auto& chan = stream[c][ch];
          for (std::size_t mi = 0; mi < chan.z.size(); ++mi) {
            if (origin[c][ch][mi] != t) continue;
            const TargetState state = TargetState::from_vec(x);
            const ObservationPair pred =
                observe(sc.radar_tx[chan.tx], sc.radar_rx[chan.rx], state,
                        sc.wavelength_m(), sc.speed_of_light);
            const Eigen::Matrix<double, 2, 4> jac = observation_jacobian(
                sc.radar_tx[chan.tx], sc.radar_rx[chan.rx], state,
                sc.wavelength_m(), sc.speed_of_light);
            const Eigen::Vector2d r =
                chan.z[mi] - Eigen::Vector2d(pred.delay, pred.doppler);
            h += jac.transpose() * omega_inv * jac;
            b += jac.transpose() * omega_inv * r;
            ++used;
          }
        }
        if (used < 2) break;
        x += (h + 1e-9 * Eigen::Matrix4d::Identity()).ldlt().solve(b);
      }
      out.triangulation[t].push_back({x[0], x[1]});
    }
  }

  for (int t = 0; t < n_targets; ++t) {
    const Track& track = final_tracks[t];
    for (int c = 0; c < cpis; ++c) {
      if (c < static_cast<int>(track.history.size())) {
        out.estimate[t].push_back(track.history[c].mean.position());
        out.existence[t].push_back(track.history[c].existence);
      } else {
        // Lost track: hold the last state for scoring purposes.
        out.estimate[t].push_back(out.estimate[t].empty()
                                      ? track.mean.position()
                                      : out.estimate[t].back());
        out.existence[t].push_back(0.0);
      }
    }
    out.survived[t] = !track.lost &&
                      static_cast<int>(track.history.size()) == cpis;
    out.final_existence[t] = out.existence[t].back();
  }

  const RmseReport track_rmse = position_rmse(out.estimate, out.truth);
  const RmseReport tri_rmse = position_rmse(out.triangulation, out.truth);
  out.rmse_track = track_rmse.per_target_rmse;
  out.rmse_triangulation = tri_rmse.per_target_rmse;
  return out;
}

CodesignRun run_codesign(const Scenario& sc, const CodesignOptions& opts,
                         const RngPool& pool, int trial) {
  Rng chan_rng = pool.stream("codesign-channels", trial);
  const auto paths = draw_radar_paths(sc, chan_rng);
  const auto channels = draw_comm_channels(sc, chan_rng);
  const CodesignProblem problem(sc, channels, paths, opts);

  CodesignRun run;
  Rng init_rng = pool.stream("codesign-init", trial);
  auto [design, trace] = problem.bcd(init_rng);
  run.final_cwsr = trace.cwsr.empty() ? 0.0 : trace.cwsr.back();
  run.design = std::move(design);
  run.trace = std::move(trace);

  Rng baseline_rng = pool.stream("codesign-init", trial);
  const DesignVariables baseline = problem.initial_design(baseline_rng);
  run.baseline_cwsr = problem.cwsr(baseline, problem.mmse_filters(baseline));
  return run;
}

namespace {

ExperimentOutputs run_association_pc(const ExperimentConfig& cfg) {
  const RngPool pool(cfg.seed);
  const std::string label = cfg.preset.empty() ? "inline" : cfg.preset;
  std::vector<std::vector<Cell>> trial_rows;
  std::vector<std::vector<Cell>> aggregate_rows;

  for (int n : cfg.association.target_counts) {
    std::vector<AssociationScore> scores(cfg.trials);
    parallel_trials(cfg.trials, [&](int t) {
      scores[t] = run_association_trial(cfg.scenario, cfg.association, pool,
                                        n * 1000003 + t, n);
    });
    long correct = 0, total = 0;
    for (int t = 0; t < cfg.trials; ++t) {
      trial_rows.push_back({t, label, n, scores[t].p_c});
      correct += scores[t].correct;
      total += scores[t].total;
    }
    aggregate_rows.push_back(
        {label, n, cfg.trials, static_cast<double>(correct) / total});
  }

  const std::string trials_path = cfg.output_dir + "/association_trials.csv";
  const std::string agg_path = cfg.output_dir + "/association_aggregate.csv";
  write_csv(trials_path, {"trial", "geometry", "n_targets", "p_c"},
            trial_rows);
  write_csv(agg_path, {"geometry", "n_targets", "trials", "p_c"},
            aggregate_rows);
  return {{trials_path, agg_path}};
}

ExperimentOutputs run_tracking_experiment(const ExperimentConfig& cfg) {
  const RngPool pool(cfg.seed);
  std::vector<TrackingTrialResult> results(cfg.trials);
  parallel_trials(cfg.trials, [&](int t) {
    results[t] = run_tracking_trial(cfg.scenario, cfg.tracking, pool, t);
  });

  std::vector<std::vector<Cell>> rows;
  std::vector<std::vector<Cell>> summary;
  for (int t = 0; t < cfg.trials; ++t) {
    const auto& r = results[t];
    for (int target = 0; target < cfg.scenario.num_targets(); ++target) {
      for (int c = 0; c < cfg.tracking.cpis; ++c) {
        rows.push_back({t, c, target, r.truth[target][c].x,
                        r.truth[target][c].y, r.estimate[target][c].x,
                        r.estimate[target][c].y, r.existence[target][c]});
      }
      summary.push_back({t, target, r.rmse_track[target],
                         r.rmse_triangulation[target],
                         r.final_existence[target],
                         static_cast<int>(r.survived[target])});
    }
  }

  const std::string track_path = cfg.output_dir + "/tracking.csv";
  const std::string summary_path = cfg.output_dir + "/tracking_summary.csv";
  write_csv(track_path,
            {"trial", "cpi", "target_id", "truth_x", "truth_y", "est_x",
             "est_y", "existence"},
            rows);
  write_csv(summary_path,
            {"trial", "target_id", "rmse_track", "rmse_triangulation",
             "final_existence", "survived"},
            summary);

  // Echo arrival orderings before/after association (trial 0).
  const auto echo = echo_sequence_table(cfg.scenario, cfg.association, pool, 0);
  std::vector<std::vector<Cell>> echo_rows;
  auto join = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      s += std::to_string(v[i]);
      if (i + 1 < v.size()) s += " ";
    }
    return s;
  };
  for (const auto& row : echo) {
    echo_rows.push_back(
        {row.rx + 1, row.tx + 1, join(row.before), join(row.after)});
  }
  const std::string echo_path = cfg.output_dir + "/echo_sequence.csv";
  write_csv(echo_path, {"rx", "tx", "before_association", "after_association"},
            echo_rows);
  return {{track_path, summary_path, echo_path}};
}

ExperimentOutputs run_codesign_convergence(const ExperimentConfig& cfg) {
  const RngPool pool(cfg.seed);
  std::vector<std::vector<Cell>> rows;
  std::vector<std::vector<Cell>> summary;
  nlohmann::json traces;

  for (const StepRule rule :
       {StepRule::kBarzilaiBorwein, StepRule::kPolyak}) {
    CodesignOptions opts;
    opts.bcd_max_iter = cfg.codesign.bcd_iters;
    opts.dual_max_iter = cfg.codesign.dual_iters;
    opts.step_rule = rule;
    const std::string name =
        rule == StepRule::kBarzilaiBorwein ? "bb" : "polyak";
    const CodesignRun run = run_codesign(cfg.scenario, opts, pool, 0);
    for (std::size_t i = 0; i < run.trace.gamma.size(); ++i) {
      rows.push_back({name, static_cast<int>(i), run.trace.cwsr[i],
                      run.trace.gamma[i], run.trace.gamma_min[i]});
    }
    const ConvergenceSummary cs =
        summarize_convergence(run.trace.gamma_min, 1e-4);
    summary.push_back({name, run.final_cwsr, run.baseline_cwsr,
                       cs.final_value, cs.iterations_to_tolerance,
                       static_cast<int>(cs.monotone_nonincreasing)});
    traces[name] = {{"cwsr", run.trace.cwsr},
                    {"gamma", run.trace.gamma},
                    {"gamma_min", run.trace.gamma_min},
                    {"fallback_events", run.trace.fallback_events}};
  }

  const std::string conv_path = cfg.output_dir + "/convergence.csv";
  const std::string summary_path = cfg.output_dir + "/convergence_summary.csv";
  const std::string trace_path = cfg.output_dir + "/convergence_traces.json";
  write_csv(conv_path, {"rule", "iteration", "cwsr", "gamma", "gamma_min"},
            rows);
  write_csv(summary_path,
            {"rule", "final_cwsr", "baseline_cwsr", "final_gamma_min",
             "iterations_to_tolerance", "gamma_min_monotone"},
            summary);
  write_text(trace_path, traces.dump(2) + "\n");
  return {{conv_path, summary_path, trace_path}};
}

ExperimentOutputs run_system_sweep(const ExperimentConfig& cfg) {
  const RngPool pool(cfg.seed);
  std::vector<std::vector<Cell>> rows;
  for (std::size_t vi = 0; vi < cfg.sweep.values.size(); ++vi) {
    const double value = cfg.sweep.values[vi];
    Scenario sc = cfg.scenario;
    if (cfg.sweep.axis == "si_attenuation") {
      sc.si_attenuation = value;
    } else if (cfg.sweep.axis == "noise_var") {
      sc.noise_var_radar = sc.noise_var_ul = sc.noise_var_dl = value;
    } else {
      throw std::invalid_argument("unknown sweep axis: " + cfg.sweep.axis);
    }
    std::vector<CodesignRun> runs(cfg.trials);
    parallel_trials(cfg.trials, [&](int t) {
      CodesignOptions opts;
      opts.bcd_max_iter = cfg.codesign.bcd_iters;
      opts.dual_max_iter = cfg.codesign.dual_iters;
      opts.step_rule = cfg.codesign.step_rule == "polyak"
                           ? StepRule::kPolyak
                           : StepRule::kBarzilaiBorwein;
      runs[t] = run_codesign(sc, opts, pool,
                             static_cast<int>(vi) * 100000 + t);
    });
    for (int t = 0; t < cfg.trials; ++t) {
      rows.push_back({value, t, runs[t].final_cwsr, runs[t].baseline_cwsr});
    }
  }
  const std::string path = cfg.output_dir + "/sweep.csv";
  write_csv(path, {"axis_value", "trial", "cwsr_proposed", "cwsr_baseline"},
            rows);
  return {{path}};
}

}  // namespace

ExperimentOutputs run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.output_dir);
  // Resolved copy of the configuration alongside the results.
  save_config(cfg, cfg.output_dir + "/config.json");

  ExperimentOutputs out;
  switch (cfg.experiment) {
    case ExperimentKind::kAssociationPc:
      out = run_association_pc(cfg);
      break;
    case ExperimentKind::kTracking:
      out = run_tracking_experiment(cfg);
      break;
    case ExperimentKind::kCodesignConvergence:
      out = run_codesign_convergence(cfg);
      break;
    case ExperimentKind::kSystemSweep:
      out = run_system_sweep(cfg);
      break;
  }
  out.files.push_back(cfg.output_dir + "/config.json");
  return out;
}

}  // namespace disac
