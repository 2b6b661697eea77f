#pragma once

#include <Eigen/Dense>
#include <utility>

#include "disac/channel.hpp"

namespace disac {

// Slow-time radar code: row mr holds the K per-pulse weights of radar Tx mr.
struct RadarCodeMatrix {
  Eigen::MatrixXcd code;  // M_r x K

  int num_tx() const { return static_cast<int>(code.rows()); }
  int pulses() const { return static_cast<int>(code.cols()); }

  double row_energy(int mr) const { return code.row(mr).squaredNorm(); }
  // K max_k |a_k|^2 / ||a||^2 for row mr.
  double row_par(int mr) const;
  // Energy and PAR feasibility against per-Tx budgets/limits.
  bool feasible(const std::vector<double>& tx_power,
                const std::vector<double>& par_limit,
                double tol = 1e-9) const;
};

// Temporal steering vector: entry k is exp(j 2 pi k f_norm), k = 0..K-1.
Eigen::VectorXcd steering_vector(double f_norm, int pulses);

// Slow-time echo of one path after matched filtering:
// y[k] = h * exp(j 2 pi k f') * a[k], with f' = doppler * pri.
Eigen::VectorXcd matched_filter_echo(const RadarPathChannel& path,
                                     const Eigen::VectorXcd& code_row,
                                     double pri_s);

// P-point DFT of the zero-padded slow-time vector and its peak magnitude
// bin. Ties break to the lowest bin. Requires P >= K.
std::pair<Eigen::VectorXcd, int> doppler_spectrum(const Eigen::VectorXcd& y,
                                                  int dft_size);

// Composite per-path received vector with its stored components.
struct ReceivedPathSignal {
  Eigen::VectorXcd echo;
  Eigen::VectorXcd dl_leak;
  Eigen::VectorXcd ul_leak;
  Eigen::VectorXcd clutter;
  Eigen::VectorXcd noise;
  Eigen::VectorXcd total;

  Eigen::VectorXcd interference_plus_noise() const { return total - echo; }
};

ReceivedPathSignal compose_received(const Eigen::VectorXcd& echo,
                                    const Eigen::VectorXcd& dl_leak,
                                    const Eigen::VectorXcd& ul_leak,
                                    const Eigen::VectorXcd& clutter,
                                    const Eigen::VectorXcd& noise);

// Interference-plus-noise covariance of one range cell: the white DL/UL
// leakage powers plus clutter plus receiver noise. Always Hermitian PD.
Eigen::MatrixXcd interference_covariance(double dl_leak_power,
                                         double ul_leak_power,
                                         const Eigen::MatrixXcd& clutter_cov,
                                         double noise_var);

// Range cell hit by a propagation delay, rounded to the nearest cell and
// wrapped into [0, cells_per_pri).
int range_cell_of(double delay_s, double pulse_width_s, int cells_per_pri);

}  // namespace disac
