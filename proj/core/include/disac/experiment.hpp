#pragma once

#include <string>
#include <vector>

#include "disac/codesign.hpp"
#include "disac/config.hpp"
#include "disac/metrics.hpp"
#include "disac/rng.hpp"
#include "disac/track.hpp"

namespace disac {

// One Monte-Carlo realization of the measurement-to-target association
// experiment on a single channel set: targets drawn in a disc, one
// measurement per target per channel, permanent-ratio assignment. Target
// and noise draws depend only on (pool, trial), so different geometries
// evaluated at the same seed share their randomness.
AssociationScore run_association_trial(const Scenario& sc,
                                       const AssociationConfig& cfg,
                                       const RngPool& pool, int trial,
                                       int n_targets);

struct TrackingTrialResult {
  std::vector<std::vector<Position2D>> truth;       // [target][cpi]
  std::vector<std::vector<Position2D>> estimate;    // [target][cpi]
  std::vector<std::vector<double>> existence;       // [target][cpi]
  std::vector<std::vector<Position2D>> triangulation;
  std::vector<bool> survived;
  std::vector<double> final_existence;
  std::vector<double> rmse_track;
  std::vector<double> rmse_triangulation;
};

TrackingTrialResult run_tracking_trial(const Scenario& sc,
                                       const TrackingConfig& cfg,
                                       const RngPool& pool, int trial);

// Delay-ordered target labels per (rx, tx) before association, and the
// association-recovered ordering, at the initial target states.
struct EchoSequenceRow {
  int rx = 0;
  int tx = 0;
  std::vector<int> before;  // target labels ordered by arrival
  std::vector<int> after;   // labels recovered through the assignment
};

std::vector<EchoSequenceRow> echo_sequence_table(const Scenario& sc,
                                                 const AssociationConfig& cfg,
                                                 const RngPool& pool,
                                                 int trial);

// Convergence run of the block-coordinate codesign under one step rule.
struct CodesignRun {
  DesignVariables design;
  ConvergenceTrace trace;
  double final_cwsr = 0.0;
  double baseline_cwsr = 0.0;  // random code + DCP + MMSE filters
};

CodesignRun run_codesign(const Scenario& sc, const CodesignOptions& opts,
                         const RngPool& pool, int trial);

struct ExperimentOutputs {
  std::vector<std::string> files;
};

// Runs the configured experiment, writes result files under
// cfg.output_dir, and returns the list of files written. Deterministic for
// a fixed config and seed.
ExperimentOutputs run_experiment(const ExperimentConfig& cfg);

}  // namespace disac
