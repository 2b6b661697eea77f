#include "disac/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace disac {

namespace {

Eigen::VectorXcd cn_vector(int n, Rng& rng) {
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.cgaussian();
  return v;
}

// r^-2 path loss applied to a unit-variance small-scale draw.
cplx faded_scalar(double r_km, Rng& rng) {
  return rng.cgaussian() / (r_km * r_km);
}

Eigen::VectorXcd faded_vector(int n, double r_km, Rng& rng) {
  return cn_vector(n, rng) / (r_km * r_km);
}

}  // namespace

Eigen::VectorXcd CommChannelSet::stacked_ul(int i) const {
  const int m_count = static_cast<int>(ul[i].size());
  const int mc = m_count > 0 ? static_cast<int>(ul[i][0].size()) : 0;
  Eigen::VectorXcd h(m_count * mc);
  for (int m = 0; m < m_count; ++m) h.segment(m * mc, mc) = ul[i][m];
  return h;
}

std::vector<RadarPathChannel> draw_radar_paths(const Scenario& sc, Rng& rng) {
  std::vector<RadarPathChannel> paths;
  paths.reserve(static_cast<std::size_t>(sc.num_radar_tx()) *
                sc.num_targets() * sc.num_radar_rx());
  const double wavelength = sc.wavelength_m();
  for (int mr = 0; mr < sc.num_radar_tx(); ++mr) {
    for (int nt = 0; nt < sc.num_targets(); ++nt) {
      for (int nr = 0; nr < sc.num_radar_rx(); ++nr) {
        RadarPathChannel p;
        p.tx = mr;
        p.target = nt;
        p.rx = nr;
        p.reflectivity = rng.cgaussian();
        p.range_km =
            bistatic_range(sc.radar_tx[mr], sc.radar_rx[nr], sc.targets[nt]);
        const ObservationPair obs =
            observe(sc.radar_tx[mr], sc.radar_rx[nr], sc.targets[nt],
                    wavelength, sc.speed_of_light);
        p.delay_s = obs.delay;
        p.doppler_hz = obs.doppler;
        const double phase = -2.0 * M_PI * sc.carrier_freq_hz * p.delay_s;
        p.coefficient = p.reflectivity / (p.range_km * p.range_km) *
                        cplx(std::cos(phase), std::sin(phase));
        paths.push_back(p);
      }
    }
  }
  return paths;
}

CommChannelSet draw_comm_channels(const Scenario& sc, Rng& rng) {
  const int m_count = sc.num_rrh();
  const int mc = sc.rrh_antennas;
  const int i_count = sc.num_ul();
  const int j_count = sc.num_dl();
  const int mr_count = sc.num_radar_tx();
  const int nr_count = sc.num_radar_rx();
  const int nt_count = sc.num_targets();

  CommChannelSet ch;
  ch.ul.assign(i_count, std::vector<Eigen::VectorXcd>(m_count));
  for (int i = 0; i < i_count; ++i) {
    for (int m = 0; m < m_count; ++m) {
      ch.ul[i][m] = faded_vector(mc, euclidean(sc.ul_ue[i], sc.rrh[m]), rng);
    }
  }
  ch.dl.assign(m_count, std::vector<Eigen::VectorXcd>(j_count));
  for (int m = 0; m < m_count; ++m) {
    for (int j = 0; j < j_count; ++j) {
      ch.dl[m][j] = faded_vector(mc, euclidean(sc.rrh[m], sc.dl_ue[j]), rng);
    }
  }
  ch.ue_cross.assign(i_count, std::vector<cplx>(j_count));
  for (int i = 0; i < i_count; ++i) {
    for (int j = 0; j < j_count; ++j) {
      ch.ue_cross[i][j] =
          faded_scalar(euclidean(sc.ul_ue[i], sc.dl_ue[j]), rng);
    }
  }

  auto bounce_range = [&](const Position2D& from, int nt,
                          const Position2D& to) {
    if (nt == 0) return euclidean(from, to);
    const Position2D tgt = sc.targets[nt - 1].position();
    return euclidean(from, tgt) + euclidean(tgt, to);
  };

  ch.radar_to_rrh.assign(
      mr_count, std::vector<std::vector<Eigen::VectorXcd>>(
                    nt_count + 1, std::vector<Eigen::VectorXcd>(m_count)));
  ch.radar_to_dl.assign(mr_count,
                        std::vector<std::vector<cplx>>(
                            nt_count + 1, std::vector<cplx>(j_count)));
  for (int mr = 0; mr < mr_count; ++mr) {
    for (int nt = 0; nt <= nt_count; ++nt) {
      for (int m = 0; m < m_count; ++m) {
        ch.radar_to_rrh[mr][nt][m] = faded_vector(
            mc, bounce_range(sc.radar_tx[mr], nt, sc.rrh[m]), rng);
      }
      for (int j = 0; j < j_count; ++j) {
        ch.radar_to_dl[mr][nt][j] =
            faded_scalar(bounce_range(sc.radar_tx[mr], nt, sc.dl_ue[j]), rng);
      }
    }
  }

  ch.rrh_to_radar_rx.assign(m_count, std::vector<Eigen::VectorXcd>(nr_count));
  for (int m = 0; m < m_count; ++m) {
    for (int nr = 0; nr < nr_count; ++nr) {
      ch.rrh_to_radar_rx[m][nr] =
          faded_vector(mc, euclidean(sc.rrh[m], sc.radar_rx[nr]), rng);
    }
  }
  ch.ul_to_radar_rx.assign(i_count, std::vector<cplx>(nr_count));
  for (int i = 0; i < i_count; ++i) {
    for (int nr = 0; nr < nr_count; ++nr) {
      ch.ul_to_radar_rx[i][nr] =
          faded_scalar(euclidean(sc.ul_ue[i], sc.radar_rx[nr]), rng);
    }
  }

  // Rician residual SI channel, factor K_B = 1 around an all-ones mean.
  const int dim = m_count * mc;
  const double k_rician = 1.0;
  const double mean_scale =
      std::sqrt(sc.si_attenuation * k_rician / (1.0 + k_rician));
  const double diffuse_scale = std::sqrt(sc.si_attenuation / (1.0 + k_rician));
  ch.si_channel.resize(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      ch.si_channel(r, c) = mean_scale + diffuse_scale * rng.cgaussian();
    }
  }
  return ch;
}

Eigen::MatrixXcd residual_si_covariance(
    const std::vector<Eigen::VectorXcd>& dl_super_precoders, double gain,
    const Eigen::MatrixXcd& si_channel) {
  if (gain < 0) throw std::invalid_argument("residual SI gain must be >= 0");
  const int dim = static_cast<int>(si_channel.rows());
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
  for (const auto& v : dl_super_precoders) {
    if (v.size() != dim) {
      throw std::invalid_argument(
          "residual_si_covariance: precoder/channel dimension mismatch");
    }
    diag += (si_channel * v).cwiseAbs2();
  }
  return (gain * diag).asDiagonal().toDenseMatrix().cast<cplx>();
}

double cci_power(const CommChannelSet& ch, const Eigen::VectorXd& ul_powers,
                 int dl_ue) {
  double p = 0.0;
  for (int i = 0; i < static_cast<int>(ch.ue_cross.size()); ++i) {
    p += std::norm(ch.ue_cross[i][dl_ue]) * ul_powers[i];
  }
  return p;
}

Eigen::MatrixXcd clutter_covariance(const Eigen::MatrixXcd& code,
                                    double clutter_var) {
  return clutter_var * (code.transpose() * code.conjugate());
}

Eigen::VectorXcd draw_clutter(const Eigen::MatrixXcd& code, double clutter_var,
                              Rng& rng) {
  const double sigma = std::sqrt(clutter_var);
  Eigen::VectorXcd rho(code.rows());
  for (int m = 0; m < code.rows(); ++m) rho[m] = sigma * rng.cgaussian();
  return code.transpose() * rho;
}

}  // namespace disac
