#include "disac/waveform.hpp"

#include <cmath>
#include <stdexcept>

namespace disac {

double RadarCodeMatrix::row_par(int mr) const {
  const double energy = row_energy(mr);
  if (energy <= 0.0) return 0.0;
  const double peak = code.row(mr).cwiseAbs2().maxCoeff();
  return pulses() * peak / energy;
}

bool RadarCodeMatrix::feasible(const std::vector<double>& tx_power,
                               const std::vector<double>& par_limit,
                               double tol) const {
  for (int mr = 0; mr < num_tx(); ++mr) {
    if (std::abs(row_energy(mr) - tx_power[mr]) > tol * std::max(1.0, tx_power[mr]))
      return false;
    const double peak = code.row(mr).cwiseAbs2().maxCoeff();
    if (pulses() * peak > par_limit[mr] * tx_power[mr] * (1.0 + tol))
      return false;
  }
  return true;
}

Eigen::VectorXcd steering_vector(double f_norm, int pulses) {
  if (pulses < 1) throw std::invalid_argument("steering_vector: K must be >= 1");
  Eigen::VectorXcd q(pulses);
  for (int k = 0; k < pulses; ++k) {
    const double phase = 2.0 * M_PI * k * f_norm;
    q[k] = cplx(std::cos(phase), std::sin(phase));
  }
  return q;
}

Eigen::VectorXcd matched_filter_echo(const RadarPathChannel& path,
                                     const Eigen::VectorXcd& code_row,
                                     double pri_s) {
  const int pulses = static_cast<int>(code_row.size());
  const Eigen::VectorXcd q = steering_vector(path.doppler_hz * pri_s, pulses);
  return path.coefficient * q.cwiseProduct(code_row);
}

std::pair<Eigen::VectorXcd, int> doppler_spectrum(const Eigen::VectorXcd& y,
                                                  int dft_size) {
  const int k_len = static_cast<int>(y.size());
  if (dft_size < k_len) {
    throw std::invalid_argument("doppler_spectrum: DFT size must be >= K");
  }
  Eigen::VectorXcd spectrum(dft_size);
  for (int p = 0; p < dft_size; ++p) {
    cplx acc{0.0, 0.0};
    for (int k = 0; k < k_len; ++k) {
      const double phase = -2.0 * M_PI * k * p / dft_size;
      acc += y[k] * cplx(std::cos(phase), std::sin(phase));
    }
    spectrum[p] = acc;
  }
  int peak = 0;
  double best = -1.0;
  for (int p = 0; p < dft_size; ++p) {
    const double mag = std::abs(spectrum[p]);
    if (mag > best) {
      best = mag;
      peak = p;
    }
  }
  return {spectrum, peak};
}

ReceivedPathSignal compose_received(const Eigen::VectorXcd& echo,
                                    const Eigen::VectorXcd& dl_leak,
                                    const Eigen::VectorXcd& ul_leak,
                                    const Eigen::VectorXcd& clutter,
                                    const Eigen::VectorXcd& noise) {
  const auto n = echo.size();
  if (dl_leak.size() != n || ul_leak.size() != n || clutter.size() != n ||
      noise.size() != n) {
    throw std::invalid_argument("compose_received: component length mismatch");
  }
  ReceivedPathSignal sig{echo, dl_leak, ul_leak, clutter, noise, {}};
  sig.total = echo + dl_leak + ul_leak + clutter + noise;
  return sig;
}

Eigen::MatrixXcd interference_covariance(double dl_leak_power,
                                         double ul_leak_power,
                                         const Eigen::MatrixXcd& clutter_cov,
                                         double noise_var) {
  if (!(noise_var > 0)) {
    throw std::invalid_argument("interference_covariance: noise_var must be > 0");
  }
  Eigen::MatrixXcd r = clutter_cov;
  r.diagonal().array() += dl_leak_power + ul_leak_power + noise_var;
  return r;
}

int range_cell_of(double delay_s, double pulse_width_s, int cells_per_pri) {
  const int cell = static_cast<int>(std::lround(delay_s / pulse_width_s));
  const int wrapped = cell % cells_per_pri;
  return wrapped < 0 ? wrapped + cells_per_pri : wrapped;
}

}  // namespace disac
