#pragma once

#include <Eigen/Dense>
#include <vector>

#include "disac/rng.hpp"

namespace disac {

// Eigenstructure of the whitened signal covariance used by the NP test.
struct DetectorSetup {
  Eigen::MatrixXcd signal_cov;  // G, Hermitian PSD
  Eigen::MatrixXcd eigvecs;     // V, columns ordered with eigvals
  Eigen::VectorXd eigvals;      // descending, clamped at 0

  static DetectorSetup from_whitened_signal_cov(const Eigen::MatrixXcd& g);
};

struct Detection {
  int tx = 0;
  int rx = 0;
  int range_bin = 0;
  int doppler_bin = 0;
  double statistic = 0.0;
};

// Hermitian inverse square root; throws when the matrix is not positive
// definite.
Eigen::MatrixXcd hermitian_inverse_sqrt(const Eigen::MatrixXcd& r);

// R_in^{-1/2} y. Under H0 the output has identity covariance.
Eigen::VectorXcd whiten(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& r_in);

// NP test statistic sum_k eigval_k |yhat_k|^2 / (1 + eigval_k) with
// yhat = V^H ybar; equals ybar^H (I - (G+I)^-1) ybar.
double test_statistic(const Eigen::VectorXcd& whitened,
                      const DetectorSetup& setup);

// Empirical (1 - pfa) quantile of the statistic under H0 (whitened noise
// CN(0, I)). Requires n_samples >= 10/pfa.
double calibrate_threshold(const DetectorSetup& setup, double pfa,
                           int n_samples, Rng& rng);

// Applies the NP test to every range bin of one channel; Doppler of each
// detection is the spectrum peak over a dft_size-point DFT.
std::vector<Detection> detect_targets(
    const std::vector<Eigen::VectorXcd>& range_profile,
    const Eigen::MatrixXcd& whitener, const DetectorSetup& setup,
    double threshold, int dft_size, int tx, int rx);

// Swerling detection probability P_fa^{1/(1+snr)}.
double swerling_pd(double pfa, double snr);

}  // namespace disac
