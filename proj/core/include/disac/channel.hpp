#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "disac/rng.hpp"
#include "disac/scenario.hpp"

namespace disac {

using cplx = std::complex<double>;

// One Tx -> target -> Rx radar propagation path. Coefficients follow a
// Swerling-I model: constant within a CPI, redrawn across CPIs.
struct RadarPathChannel {
  int tx = 0;      // radar Tx index
  int target = 0;  // target index
  int rx = 0;      // radar Rx index
  cplx reflectivity{0.0, 0.0};
  double range_km = 0.0;  // bistatic range
  double delay_s = 0.0;
  double doppler_hz = 0.0;
  cplx coefficient{0.0, 0.0};  // range_km^-2 * g * exp(-j 2 pi f_c delay)
};

// All communications-side channels for one CPI. Every coefficient is the
// small-scale CN(0,1) draw scaled by r^-2 (path-loss exponent 2).
struct CommChannelSet {
  // ul[i][m]: UL UE i -> RRH m, one entry per RRH antenna.
  std::vector<std::vector<Eigen::VectorXcd>> ul;
  // dl[m][j]: RRH m -> DL UE j.
  std::vector<std::vector<Eigen::VectorXcd>> dl;
  // ue_cross[i][j]: UL UE i -> DL UE j.
  std::vector<std::vector<cplx>> ue_cross;
  // radar_to_rrh[mr][nt][m]: radar Tx mr -> RRH m; nt = 0 is the direct
  // path, nt >= 1 bounces off target nt-1.
  std::vector<std::vector<std::vector<Eigen::VectorXcd>>> radar_to_rrh;
  // radar_to_dl[mr][nt][j]: same path structure toward DL UE j.
  std::vector<std::vector<std::vector<cplx>>> radar_to_dl;
  // rrh_to_radar_rx[m][nr].
  std::vector<std::vector<Eigen::VectorXcd>> rrh_to_radar_rx;
  // ul_to_radar_rx[i][nr].
  std::vector<std::vector<cplx>> ul_to_radar_rx;
  // Residual self-interference + inter-RRH channel seen at the BBU,
  // Rician with factor 1 around an all-ones mean, total power si_attenuation.
  Eigen::MatrixXcd si_channel;

  // Stacked UL channel for UE i across all RRHs (M * M_c entries).
  Eigen::VectorXcd stacked_ul(int i) const;
};

// One path channel per (tx, target, rx) triple, in that loop order.
std::vector<RadarPathChannel> draw_radar_paths(const Scenario& sc, Rng& rng);

CommChannelSet draw_comm_channels(const Scenario& sc, Rng& rng);

// Covariance of the residual SI/IRI left after BBU-side cancellation:
// gain * diag{ sum_j (H v_j)(H v_j)^H }. Diagonal, PSD, linear in gain.
Eigen::MatrixXcd residual_si_covariance(
    const std::vector<Eigen::VectorXcd>& dl_super_precoders, double gain,
    const Eigen::MatrixXcd& si_channel);

// Co-channel interference power at DL UE j: sum_i |h_ud,ij|^2 P_u,i.
double cci_power(const CommChannelSet& ch, const Eigen::VectorXd& ul_powers,
                 int dl_ue);

// Clutter covariance seen in one range cell: var * A^T conj(A), K x K,
// Hermitian PSD of rank <= M_r.
Eigen::MatrixXcd clutter_covariance(const Eigen::MatrixXcd& code,
                                    double clutter_var);

// One clutter realization: A^T rho with rho ~ CN(0, var I).
Eigen::VectorXcd draw_clutter(const Eigen::MatrixXcd& code, double clutter_var,
                              Rng& rng);

}  // namespace disac
