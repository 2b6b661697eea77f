#include "disac/detect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "disac/waveform.hpp"

namespace disac {

DetectorSetup DetectorSetup::from_whitened_signal_cov(
    const Eigen::MatrixXcd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(g);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("DetectorSetup: eigendecomposition failed");
  }
  const int n = static_cast<int>(g.rows());
  DetectorSetup setup;
  setup.signal_cov = g;
  setup.eigvecs.resize(n, n);
  setup.eigvals.resize(n);
  // SelfAdjointEigenSolver returns ascending order; store descending.
  for (int i = 0; i < n; ++i) {
    setup.eigvals[i] = std::max(0.0, eig.eigenvalues()[n - 1 - i]);
    setup.eigvecs.col(i) = eig.eigenvectors().col(n - 1 - i);
  }
  return setup;
}

Eigen::MatrixXcd hermitian_inverse_sqrt(const Eigen::MatrixXcd& r) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(r);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_inverse_sqrt: decomposition failed");
  }
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw std::domain_error("hermitian_inverse_sqrt: matrix not positive definite");
  }
  return eig.eigenvectors() *
         eig.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
         eig.eigenvectors().adjoint();
}

Eigen::VectorXcd whiten(const Eigen::VectorXcd& y,
                        const Eigen::MatrixXcd& r_in) {
  return hermitian_inverse_sqrt(r_in) * y;
}

double test_statistic(const Eigen::VectorXcd& whitened,
                      const DetectorSetup& setup) {
  const Eigen::VectorXcd projected = setup.eigvecs.adjoint() * whitened;
  double t = 0.0;
  for (int k = 0; k < projected.size(); ++k) {
    const double d = setup.eigvals[k];
    t += d / (1.0 + d) * std::norm(projected[k]);
  }
  return t;
}

double calibrate_threshold(const DetectorSetup& setup, double pfa,
                           int n_samples, Rng& rng) {
  if (!(pfa > 0.0 && pfa <= 1.0)) {
    throw std::invalid_argument("calibrate_threshold: pfa must be in (0, 1]");
  }
  if (n_samples < 10.0 / pfa) {
    throw std::invalid_argument(
        "calibrate_threshold: need at least 10/pfa samples");
  }
  const int dim = static_cast<int>(setup.eigvals.size());
  std::vector<double> stats(n_samples);
  Eigen::VectorXcd y(dim);
  for (int s = 0; s < n_samples; ++s) {
    for (int k = 0; k < dim; ++k) y[k] = rng.cgaussian();
    stats[s] = test_statistic(y, setup);
  }
  std::sort(stats.begin(), stats.end());
  const auto rank = static_cast<std::size_t>(
      std::min<double>(n_samples - 1.0,
                       std::floor((1.0 - pfa) * n_samples)));
  return stats[rank];
}

std::vector<Detection> detect_targets(
    const std::vector<Eigen::VectorXcd>& range_profile,
    const Eigen::MatrixXcd& whitener, const DetectorSetup& setup,
    double threshold, int dft_size, int tx, int rx) {
  std::vector<Detection> detections;
  for (int bin = 0; bin < static_cast<int>(range_profile.size()); ++bin) {
    const Eigen::VectorXcd ybar = whitener * range_profile[bin];
    const double t = test_statistic(ybar, setup);
    if (t > threshold) {
      const auto [spectrum, peak] = doppler_spectrum(range_profile[bin], dft_size);
      detections.push_back({tx, rx, bin, peak, t});
    }
  }
  return detections;
}

double swerling_pd(double pfa, double snr) {
  if (!(pfa > 0.0 && pfa < 1.0)) {
    throw std::invalid_argument("swerling_pd: pfa must be in (0,1)");
  }
  if (snr < 0.0) throw std::invalid_argument("swerling_pd: snr must be >= 0");
  return std::pow(pfa, 1.0 / (1.0 + snr));
}

}  // namespace disac
