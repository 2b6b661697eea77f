#pragma once

#include <Eigen/Dense>
#include <vector>

#include "disac/rng.hpp"

namespace disac {

// One (delay, Doppler) detection from one radar Tx-Rx channel. Coordinates
// are whatever units the caller works in (seconds/Hz or bin units),
// consistently with the sigmas passed to the likelihood functions.
struct Measurement {
  double delay = 0.0;
  double doppler = 0.0;
  int tx = 0;
  int rx = 0;

  Eigen::Vector2d vec() const { return {delay, doppler}; }
};

// Separable Gaussian measurement density scaled by the resolution cell:
// res_delay*res_doppler / (2 pi s_t s_p) * exp(-(dt/s_t)^2/2 - (df/s_p)^2/2).
double measurement_pdf(const Eigen::Vector2d& z, const Eigen::Vector2d& truth,
                       double sigma_delay, double sigma_doppler,
                       double res_delay, double res_doppler);

// Posterior probability that measurement z originated from each target of a
// Gaussian mixture with weights `mixture_weights` and per-target sigmas.
// When every component density underflows to zero the posterior falls back
// to uniform and `degenerate` (if given) is set.
Eigen::VectorXd posterior_weighted_likelihood(
    const Eigen::Vector2d& z, const std::vector<Eigen::Vector2d>& predicted,
    const Eigen::VectorXd& mixture_weights,
    const Eigen::VectorXd& sigma_delay, const Eigen::VectorXd& sigma_doppler,
    bool* degenerate = nullptr);

// Exact matrix permanent by Ryser's formula with Gray-code updates.
// Requires a square nonnegative matrix with n <= 12.
double permanent(const Eigen::MatrixXd& m);

// Assignment likelihood matrix for one radar channel: rows are measurements,
// columns are targets.
struct LikelihoodMatrix {
  Eigen::MatrixXd values;
  int tx = 0;
  int rx = 0;
};

struct AssociationResult {
  // beta(n, t): marginal probability that measurement n belongs to target t.
  // Every column is a probability vector over measurements.
  Eigen::MatrixXd beta;
  // assignment[t]: index of the measurement assigned to target t
  // (argmax over beta column; exact ties break to the lowest index).
  std::vector<int> assignment;
};

// Permanent-ratio marginal association for the equal-counts, clutter-free
// setting. Throws if L is not square or perm(L) is not positive.
AssociationResult association_probabilities(const LikelihoodMatrix& l);

// Indices of measurements passing the Mahalanobis gate
// (z - predicted)^T S^-1 (z - predicted) < threshold.
std::vector<int> gate(const std::vector<Eigen::Vector2d>& measurements,
                      const Eigen::Vector2d& predicted,
                      const Eigen::Matrix2d& innovation_cov, double threshold);

// Gating threshold for a 2-D measurement at coverage probability pg.
double gate_threshold(double pg);

// Inputs to the fusion-junction-event enumeration for one supertarget on
// one channel.
struct SupertargetHypothesis {
  double prior_existence = 1.0;       // P(chi | Z^{m-1})
  std::vector<int> gated;             // indices into the channel measurement set
  std::vector<double> likelihood;     // Gaussian density at each gated z
};

// One feasible joint assignment of measurements to supertargets.
struct FusionJunctionEvent {
  // assignment[s]: -1 when supertarget s gets no measurement, otherwise a
  // measurement index. No measurement appears twice.
  std::vector<int> assignment;
  double posterior = 0.0;
};

// Enumerates all feasible events and normalizes their posteriors.
// likelihoods are divided by gate probability (pg) per the allocated
// measurement likelihood, and by the clutter spatial density.
std::vector<FusionJunctionEvent> enumerate_fje(
    const std::vector<SupertargetHypothesis>& hypotheses, double pd, double pg,
    double clutter_density, std::size_t max_events = 1000000);

struct SupertargetMarginals {
  // beta[0] is the no-detection mass; beta[1 + g] matches gated index g.
  std::vector<double> beta;
  double existence = 0.0;
};

std::vector<SupertargetMarginals> marginalize(
    const std::vector<FusionJunctionEvent>& events,
    const std::vector<SupertargetHypothesis>& hypotheses, double pd,
    double pg);

// Poisson false-alarm count pmf with mean density*volume.
double false_alarm_count_pmf(double density, double volume, int count);

}  // namespace disac
