#include "disac/codesign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace disac {

Eigen::VectorXcd dcp_precoder(const Eigen::VectorXcd& channel, double power) {
  if (power < 0) throw std::invalid_argument("dcp_precoder: power must be >= 0");
  const double norm = channel.norm();
  if (!(norm > 0)) {
    throw std::invalid_argument("dcp_precoder: zero channel vector");
  }
  return std::sqrt(power) / norm * channel.conjugate();
}

double bb_step(double s_prev_diff, double d_prev_diff) {
  return s_prev_diff * s_prev_diff / (s_prev_diff * d_prev_diff);
}

Eigen::VectorXcd par_project(const Eigen::VectorXcd& a, double power,
                             double par) {
  const int k = static_cast<int>(a.size());
  if (!(power > 0)) throw std::invalid_argument("par_project: power must be > 0");
  if (par < 1.0) throw std::invalid_argument("par_project: par must be >= 1");

  const double peak_bound = std::sqrt(par * power / k);
  Eigen::VectorXd mag = a.cwiseAbs();
  Eigen::VectorXcd phase(k);
  for (int i = 0; i < k; ++i) {
    phase[i] = mag[i] > 0 ? a[i] / mag[i] : cplx(1.0, 0.0);
  }

  Eigen::VectorXd m(k);
  const auto energy_at = [&](double nu) {
    double e = 0.0;
    for (int i = 0; i < k; ++i) {
      const double v = std::min(mag[i] / (1.0 + nu), peak_bound);
      e += v * v;
    }
    return e;
  };

  const double at_lower = energy_at(-1.0 + 1e-15);
  if (at_lower < power) {
    // Magnitudes alone cannot reach the energy even fully clipped; top up
    // the zero entries uniformly (any split has the same distance cost).
    double extra = power;
    int zeros = 0;
    for (int i = 0; i < k; ++i) {
      if (mag[i] > 0) {
        m[i] = peak_bound;
        extra -= peak_bound * peak_bound;
      } else {
        ++zeros;
      }
    }
    const double fill = zeros > 0 ? std::sqrt(std::max(0.0, extra) / zeros) : 0.0;
    for (int i = 0; i < k; ++i) {
      if (!(mag[i] > 0)) m[i] = fill;
    }
  } else {
    // The clipped-scaling magnitudes min(c/(1+nu), B) are the KKT solution;
    // bisect the unique nu with exact energy.
    double lo = -1.0 + 1e-15;
    double hi = 1.0;
    while (energy_at(hi) > power) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (energy_at(mid) > power) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double nu = 0.5 * (lo + hi);
    for (int i = 0; i < k; ++i) {
      m[i] = std::min(mag[i] / (1.0 + nu), peak_bound);
    }
  }

  // Exact energy normalization; the residual scaling is O(bisection tol).
  const double norm = m.norm();
  if (norm > 0) m *= std::sqrt(power) / norm;

  Eigen::VectorXcd out(k);
  for (int i = 0; i < k; ++i) out[i] = m[i] * phase[i];
  return out;
}

double radar_mi(const Eigen::VectorXcd& steered_code, double coeff_var,
                const Eigen::MatrixXcd& interference_cov) {
  if (coeff_var == 0.0) return 0.0;
  Eigen::LDLT<Eigen::MatrixXcd> ldlt(interference_cov);
  if (ldlt.info() != Eigen::Success ||
      ldlt.vectorD().real().minCoeff() <= 0.0) {
    throw std::domain_error("radar_mi: interference covariance not PD");
  }
  const double quad =
      std::real(steered_code.dot(ldlt.solve(steered_code))) * coeff_var;
  return std::log1p(quad);
}

Eigen::VectorXcd DesignVariables::dl_super_precoder(int j) const {
  const int m_count = static_cast<int>(dl_precoder_dir.size());
  const int mc =
      m_count > 0 ? static_cast<int>(dl_precoder_dir[0][j].size()) : 0;
  Eigen::VectorXcd v(m_count * mc);
  for (int m = 0; m < m_count; ++m) {
    v.segment(m * mc, mc) = dl_precoder(m, j);
  }
  return v;
}

CodesignProblem::CodesignProblem(const Scenario& sc,
                                 const CommChannelSet& channels,
                                 const std::vector<RadarPathChannel>& paths,
                                 CodesignOptions opts)
    : scenario_(sc), channels_(channels), paths_(paths), opts_(opts) {
  num_terms_ =
      sc.pulses_per_cpi * sc.num_radar_tx() * std::max(1, sc.num_targets());
  if (sc.num_targets() == 0) num_terms_ = 0;

  stacked_ul_.resize(sc.num_ul());
  for (int i = 0; i < sc.num_ul(); ++i) {
    stacked_ul_[i] = channels_.stacked_ul(i);
  }

  const int mc = sc.rrh_antennas;
  radar_to_rrh_stacked_.assign(
      sc.num_radar_tx(),
      std::vector<Eigen::VectorXcd>(sc.num_targets() + 1));
  for (int mr = 0; mr < sc.num_radar_tx(); ++mr) {
    for (int nt = 0; nt <= sc.num_targets(); ++nt) {
      Eigen::VectorXcd stacked(sc.num_rrh() * mc);
      for (int m = 0; m < sc.num_rrh(); ++m) {
        stacked.segment(m * mc, mc) = channels_.radar_to_rrh[mr][nt][m];
      }
      radar_to_rrh_stacked_[mr][nt] = stacked;
    }
  }

  // Paths with zero coefficient variance carry no information and would
  // make the WMMSE weight undefined; they are excluded from the objective.
  std::erase_if(paths_, [&](const RadarPathChannel& p) {
    return sc.rcs_variance * std::pow(p.range_km, -4.0) <= 0.0;
  });
  path_coeff_var_.resize(paths_.size());
  path_steering_.resize(paths_.size());
  for (std::size_t p = 0; p < paths_.size(); ++p) {
    path_coeff_var_[p] = sc.rcs_variance * std::pow(paths_[p].range_km, -4.0);
    path_steering_[p] = steering_vector(paths_[p].doppler_hz * sc.pri_s,
                                        sc.pulses_per_cpi);
  }
}

TermIndex CodesignProblem::term(int index) const {
  const int nt_count = std::max(1, scenario_.num_targets());
  TermIndex t;
  t.target = index % nt_count;
  index /= nt_count;
  t.tx = index % scenario_.num_radar_tx();
  t.pulse = index / scenario_.num_radar_tx();
  return t;
}

DesignVariables CodesignProblem::initial_design(Rng& rng) const {
  const Scenario& sc = scenario_;
  DesignVariables d;
  d.code.code.resize(sc.num_radar_tx(), sc.pulses_per_cpi);
  for (int mr = 0; mr < sc.num_radar_tx(); ++mr) {
    const double amp = std::sqrt(sc.radar_tx_power[mr] / sc.pulses_per_cpi);
    for (int k = 0; k < sc.pulses_per_cpi; ++k) {
      const double phase = 2.0 * M_PI * rng.uniform();
      d.code.code(mr, k) = amp * cplx(std::cos(phase), std::sin(phase));
    }
    d.code.code.row(mr) =
        par_project(d.code.code.row(mr).transpose(), sc.radar_tx_power[mr],
                    sc.par_limit[mr])
            .transpose();
  }
  d.ul_power = Eigen::VectorXd::Constant(sc.num_ul(), sc.ul_power_max);
  d.dl_power = Eigen::MatrixXd::Constant(sc.num_rrh(), sc.num_dl(),
                                         sc.dl_power_max / sc.num_dl());
  d.dl_precoder_dir.assign(sc.num_rrh(),
                           std::vector<Eigen::VectorXcd>(sc.num_dl()));
  for (int m = 0; m < sc.num_rrh(); ++m) {
    for (int j = 0; j < sc.num_dl(); ++j) {
      const Eigen::VectorXcd& g = channels_.dl[m][j];
      if (g.norm() > 0) {
        d.dl_precoder_dir[m][j] = dcp_precoder(g, 1.0);
      } else {
        d.dl_precoder_dir[m][j] = Eigen::VectorXcd::Zero(g.size());
      }
    }
  }
  return d;
}

Eigen::VectorXcd CodesignProblem::steered_code(const DesignVariables& d,
                                               int path) const {
  return path_steering_[path].cwiseProduct(
      d.code.code.row(paths_[path].tx).transpose());
}

cplx CodesignProblem::dl_signal_amplitude(const DesignVariables& d, int stream,
                                          int receiver) const {
  cplx amp{0.0, 0.0};
  for (int m = 0; m < scenario_.num_rrh(); ++m) {
    amp += (channels_.dl[m][receiver].transpose() * d.dl_precoder(m, stream)).value();
  }
  return amp;
}

Eigen::MatrixXcd CodesignProblem::ul_rx_covariance(const DesignVariables& d,
                                                   int term_idx) const {
  const Scenario& sc = scenario_;
  const int dim = sc.num_rrh() * sc.rrh_antennas;
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(dim, dim);
  for (int q = 0; q < sc.num_ul(); ++q) {
    r += d.ul_power[q] * stacked_ul_[q] * stacked_ul_[q].adjoint();
  }
  std::vector<Eigen::VectorXcd> supers(sc.num_dl());
  for (int j = 0; j < sc.num_dl(); ++j) supers[j] = d.dl_super_precoder(j);
  r += residual_si_covariance(supers, sc.si_residual_gain, channels_.si_channel);
  const TermIndex t = term(term_idx);
  const Eigen::VectorXcd& leak = radar_to_rrh_stacked_[t.tx][t.target + 1];
  r += std::norm(d.code.code(t.tx, t.pulse)) * leak * leak.adjoint();
  r.diagonal().array() += sc.noise_var_ul;
  return r;
}

double CodesignProblem::dl_second_moment(const DesignVariables& d, int ue,
                                         int term_idx) const {
  const Scenario& sc = scenario_;
  double s = sc.noise_var_dl;
  for (int stream = 0; stream < sc.num_dl(); ++stream) {
    s += std::norm(dl_signal_amplitude(d, stream, ue));
  }
  s += cci_power(channels_, d.ul_power, ue);
  const TermIndex t = term(term_idx);
  s += std::norm(channels_.radar_to_dl[t.tx][t.target + 1][ue]) *
       std::norm(d.code.code(t.tx, t.pulse));
  return s;
}

Eigen::MatrixXcd CodesignProblem::radar_interference_cov(
    const DesignVariables& d, int rx) const {
  const Scenario& sc = scenario_;
  double dl_leak = 0.0;
  for (int j = 0; j < sc.num_dl(); ++j) {
    cplx amp{0.0, 0.0};
    for (int m = 0; m < sc.num_rrh(); ++m) {
      amp += (channels_.rrh_to_radar_rx[m][rx].transpose() * d.dl_precoder(m, j)).value();
    }
    dl_leak += std::norm(amp);
  }
  double ul_leak = 0.0;
  for (int i = 0; i < sc.num_ul(); ++i) {
    ul_leak += d.ul_power[i] * std::norm(channels_.ul_to_radar_rx[i][rx]);
  }
  return interference_covariance(
      dl_leak, ul_leak, clutter_covariance(d.code.code, sc.clutter_var),
      sc.noise_var_radar);
}

FilterSet CodesignProblem::mmse_filters(const DesignVariables& d) const {
  const Scenario& sc = scenario_;
  FilterSet u;
  u.ul.assign(sc.num_ul(), std::vector<Eigen::VectorXcd>(num_terms_));
  u.dl.assign(sc.num_dl(), std::vector<cplx>(num_terms_));
  u.radar.resize(paths_.size());

  for (int t = 0; t < num_terms_; ++t) {
    const Eigen::MatrixXcd r = ul_rx_covariance(d, t);
    const Eigen::LDLT<Eigen::MatrixXcd> ldlt(r);
    for (int i = 0; i < sc.num_ul(); ++i) {
      u.ul[i][t] = std::sqrt(d.ul_power[i]) * ldlt.solve(stacked_ul_[i]);
    }
    for (int j = 0; j < sc.num_dl(); ++j) {
      u.dl[j][t] = dl_signal_amplitude(d, j, j) / dl_second_moment(d, j, t);
    }
  }

  std::vector<Eigen::LDLT<Eigen::MatrixXcd>> rin_solver;
  rin_solver.reserve(sc.num_radar_rx());
  for (int nr = 0; nr < sc.num_radar_rx(); ++nr) {
    rin_solver.emplace_back(radar_interference_cov(d, nr));
  }
  for (int p = 0; p < num_paths(); ++p) {
    const Eigen::VectorXcd s = steered_code(d, p);
    const double var = path_coeff_var_[p];
    // sigma^2 (sigma^2 s s^H + R_in)^-1 s via Sherman-Morrison on R_in.
    const Eigen::VectorXcd rin_s = rin_solver[paths_[p].rx].solve(s);
    const double quad = std::real(s.dot(rin_s));
    u.radar[p] = var / (1.0 + var * quad) * rin_s;
  }
  return u;
}

MseSet CodesignProblem::mse_values(const DesignVariables& d,
                                   const FilterSet& u) const {
  const Scenario& sc = scenario_;
  MseSet e;
  e.ul.assign(sc.num_ul(), std::vector<double>(num_terms_));
  e.dl.assign(sc.num_dl(), std::vector<double>(num_terms_));
  e.radar.resize(paths_.size());

  for (int t = 0; t < num_terms_; ++t) {
    const Eigen::MatrixXcd r = ul_rx_covariance(d, t);
    for (int i = 0; i < sc.num_ul(); ++i) {
      const Eigen::VectorXcd& f = u.ul[i][t];
      e.ul[i][t] = 1.0 -
                   2.0 * std::sqrt(d.ul_power[i]) *
                       std::real(stacked_ul_[i].dot(f)) +
                   std::real(f.dot(r * f));
    }
    for (int j = 0; j < sc.num_dl(); ++j) {
      const cplx amp = dl_signal_amplitude(d, j, j);
      const double s = dl_second_moment(d, j, t);
      const cplx f = u.dl[j][t];
      e.dl[j][t] = 1.0 - 2.0 * std::real(std::conj(f) * amp) +
                   std::norm(f) * s;
    }
  }

  std::vector<Eigen::MatrixXcd> rin(sc.num_radar_rx());
  for (int nr = 0; nr < sc.num_radar_rx(); ++nr) {
    rin[nr] = radar_interference_cov(d, nr);
  }
  for (int p = 0; p < num_paths(); ++p) {
    const Eigen::VectorXcd s = steered_code(d, p);
    const double var = path_coeff_var_[p];
    const Eigen::VectorXcd& f = u.radar[p];
    const cplx su = s.dot(f);  // s^H u
    const double quad =
        std::real(f.dot(rin[paths_[p].rx] * f)) + var * std::norm(su);
    e.radar[p] = var - 2.0 * var * std::real(su) + quad;
  }
  return e;
}

WeightSet CodesignProblem::optimal_weights(const MseSet& e) const {
  WeightSet w;
  auto invert = [](const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] > 0)) {
        throw std::domain_error("optimal_weights: nonpositive MSE");
      }
      out[i] = 1.0 / v[i];
    }
    return out;
  };
  w.ul.resize(e.ul.size());
  for (std::size_t i = 0; i < e.ul.size(); ++i) w.ul[i] = invert(e.ul[i]);
  w.dl.resize(e.dl.size());
  for (std::size_t j = 0; j < e.dl.size(); ++j) w.dl[j] = invert(e.dl[j]);
  w.radar = invert(e.radar);
  return w;
}

double CodesignProblem::gamma_value(const DesignVariables& d,
                                    const FilterSet& u,
                                    const WeightSet& w) const {
  const MseSet e = mse_values(d, u);
  double gamma = 0.0;
  for (int p = 0; p < num_paths(); ++p) {
    gamma += opts_.alpha_radar * w.radar[p] * e.radar[p];
  }
  for (int t = 0; t < num_terms_; ++t) {
    for (int i = 0; i < scenario_.num_ul(); ++i) {
      gamma += opts_.alpha_ul * w.ul[i][t] * e.ul[i][t];
    }
    for (int j = 0; j < scenario_.num_dl(); ++j) {
      gamma += opts_.alpha_dl * w.dl[j][t] * e.dl[j][t];
    }
  }
  return gamma;
}

double CodesignProblem::ul_sinr(const DesignVariables& d, const FilterSet& u,
                                int ue, int term_idx) const {
  const Eigen::VectorXcd& f = u.ul[ue][term_idx];
  const double signal =
      d.ul_power[ue] * std::norm(f.dot(stacked_ul_[ue]));
  const Eigen::MatrixXcd r = ul_rx_covariance(d, term_idx);
  const double total = std::real(f.dot(r * f));
  const double denom = total - signal;
  if (denom <= 0.0) return 0.0;
  return signal / denom;
}

double CodesignProblem::dl_sinr(const DesignVariables& d, const FilterSet&,
                                int ue, int term_idx) const {
  const double signal = std::norm(dl_signal_amplitude(d, ue, ue));
  const double denom = dl_second_moment(d, ue, term_idx) - signal;
  if (denom <= 0.0) return 0.0;
  return signal / denom;
}

double CodesignProblem::cwsr(const DesignVariables& d,
                             const FilterSet& u) const {
  double rate = 0.0;
  std::vector<Eigen::MatrixXcd> rin(scenario_.num_radar_rx());
  for (int nr = 0; nr < scenario_.num_radar_rx(); ++nr) {
    rin[nr] = radar_interference_cov(d, nr);
  }
  for (int p = 0; p < num_paths(); ++p) {
    rate += opts_.alpha_radar *
            radar_mi(steered_code(d, p), path_coeff_var_[p], rin[paths_[p].rx]);
  }
  for (int t = 0; t < num_terms_; ++t) {
    for (int i = 0; i < scenario_.num_ul(); ++i) {
      rate += opts_.alpha_ul * std::log2(1.0 + ul_sinr(d, u, i, t));
    }
    for (int j = 0; j < scenario_.num_dl(); ++j) {
      rate += opts_.alpha_dl * std::log2(1.0 + dl_sinr(d, u, j, t));
    }
  }
  return rate;
}

CodesignProblem::UlBlockModel CodesignProblem::ul_block_model(
    const DesignVariables&, const FilterSet& u, const WeightSet& w,
    int ue) const {
  const Scenario& sc = scenario_;
  UlBlockModel model;
  for (int t = 0; t < num_terms_; ++t) {
    model.lin += opts_.alpha_ul * w.ul[ue][t] * 2.0 *
                 std::real(stacked_ul_[ue].dot(u.ul[ue][t]));
    for (int q = 0; q < sc.num_ul(); ++q) {
      model.quad += opts_.alpha_ul * w.ul[q][t] *
                    std::norm(u.ul[q][t].dot(stacked_ul_[ue]));
    }
    for (int j = 0; j < sc.num_dl(); ++j) {
      model.quad += opts_.alpha_dl * w.dl[j][t] * std::norm(u.dl[j][t]) *
                    std::norm(channels_.ue_cross[ue][j]);
    }
  }
  for (int p = 0; p < num_paths(); ++p) {
    model.quad += opts_.alpha_radar * w.radar[p] * u.radar[p].squaredNorm() *
                  std::norm(channels_.ul_to_radar_rx[ue][paths_[p].rx]);
  }
  return model;
}

CodesignProblem::DlBlockModel CodesignProblem::dl_block_model(
    const DesignVariables& d, const FilterSet& u, const WeightSet& w,
    int rrh) const {
  const Scenario& sc = scenario_;
  const int j_count = sc.num_dl();
  DlBlockModel model;
  model.quad = Eigen::VectorXd::Zero(j_count);
  model.lin = Eigen::VectorXd::Zero(j_count);

  // Amplitude of stream j at receiver j' contributed by this RRH per unit
  // sqrt(power), and the fixed remainder from the other RRHs.
  auto cross_coeff = [&](int m, int stream, int receiver) {
    return (channels_.dl[m][receiver].transpose() *
            d.dl_precoder_dir[m][stream]).value();
  };
  for (int stream = 0; stream < j_count; ++stream) {
    for (int receiver = 0; receiver < j_count; ++receiver) {
      const cplx own = cross_coeff(rrh, stream, receiver);
      const cplx rest = dl_signal_amplitude(d, stream, receiver) -
                        std::sqrt(d.dl_power(rrh, stream)) * own;
      double weight_sum = 0.0;
      for (int t = 0; t < num_terms_; ++t) {
        weight_sum += opts_.alpha_dl * w.dl[receiver][t] *
                      std::norm(u.dl[receiver][t]);
      }
      model.quad[stream] += weight_sum * std::norm(own);
      model.lin[stream] +=
          weight_sum * 2.0 * std::real(std::conj(rest) * own);
      if (stream == receiver) {
        // Direct signal term -2 Re(conj(u) g_j).
        double lin_signal = 0.0;
        for (int t = 0; t < num_terms_; ++t) {
          lin_signal += opts_.alpha_dl * w.dl[receiver][t] * 2.0 *
                        std::real(std::conj(u.dl[receiver][t]) * own);
        }
        model.lin[stream] -= lin_signal;
      }
    }
  }

  // Residual SI seen by the UL filters: diag entries of H v_j are linear in
  // x_j through the columns H * (direction embedded at this RRH block).
  const int dim = sc.num_rrh() * sc.rrh_antennas;
  const int mc = sc.rrh_antennas;
  for (int stream = 0; stream < j_count; ++stream) {
    Eigen::VectorXcd embedded =Eigen::VectorXcd::Zero(dim);
    embedded.segment(rrh * mc, mc) = d.dl_precoder_dir[rrh][stream];
    const Eigen::VectorXcd own_col = channels_.si_channel * embedded;
    const Eigen::VectorXcd full =
        channels_.si_channel * d.dl_super_precoder(stream);
    const Eigen::VectorXcd rest =
        full - std::sqrt(d.dl_power(rrh, stream)) * own_col;
    Eigen::VectorXd filter_weight = Eigen::VectorXd::Zero(dim);
    for (int t = 0; t < num_terms_; ++t) {
      for (int i = 0; i < sc.num_ul(); ++i) {
        filter_weight +=
            opts_.alpha_ul * w.ul[i][t] * u.ul[i][t].cwiseAbs2();
      }
    }
    for (int dcomp = 0; dcomp < dim; ++dcomp) {
      const double scale = sc.si_residual_gain * filter_weight[dcomp];
      model.quad[stream] += scale * std::norm(own_col[dcomp]);
      model.lin[stream] += scale * 2.0 *
                           std::real(std::conj(rest[dcomp]) * own_col[dcomp]);
    }
  }

  // DL leakage into the radar interference floor.
  for (int stream = 0; stream < j_count; ++stream) {
    for (int p = 0; p < num_paths(); ++p) {
      const int nr = paths_[p].rx;
      const cplx own = (channels_.rrh_to_radar_rx[rrh][nr].transpose() *
                        d.dl_precoder_dir[rrh][stream]).value();
      cplx full{0.0, 0.0};
      for (int m = 0; m < sc.num_rrh(); ++m) {
        full += (channels_.rrh_to_radar_rx[m][nr].transpose() *
                 d.dl_precoder(m, stream)).value();
      }
      const cplx rest = full - std::sqrt(d.dl_power(rrh, stream)) * own;
      const double scale =
          opts_.alpha_radar * w.radar[p] * u.radar[p].squaredNorm();
      model.quad[stream] += scale * std::norm(own);
      model.lin[stream] +=
          scale * 2.0 * std::real(std::conj(rest) * own);
    }
  }
  return model;
}

CodesignProblem::RadarBlockModel CodesignProblem::radar_block_model(
    const DesignVariables&, const FilterSet& u, const WeightSet& w,
    int tx) const {
  const Scenario& sc = scenario_;
  const int k = sc.pulses_per_cpi;
  RadarBlockModel model;
  model.quad = Eigen::MatrixXcd::Zero(k, k);
  model.lin = Eigen::VectorXcd::Zero(k);

  for (int p = 0; p < num_paths(); ++p) {
    const double alpha_w = opts_.alpha_radar * w.radar[p];
    // Clutter couples every path to every code row.
    model.quad += alpha_w * sc.clutter_var * u.radar[p] * u.radar[p].adjoint();
    if (paths_[p].tx != tx) continue;
    const double var = path_coeff_var_[p];
    const Eigen::VectorXcd z =
        path_steering_[p].conjugate().cwiseProduct(u.radar[p]);
    model.lin += alpha_w * var * z;
    model.quad += alpha_w * var * z * z.adjoint();
  }

  for (int t = 0; t < num_terms_; ++t) {
    const TermIndex ti = term(t);
    if (ti.tx != tx) continue;
    const Eigen::VectorXcd& leak = radar_to_rrh_stacked_[tx][ti.target + 1];
    double diag = 0.0;
    for (int i = 0; i < sc.num_ul(); ++i) {
      diag += opts_.alpha_ul * w.ul[i][t] * std::norm(u.ul[i][t].dot(leak));
    }
    for (int j = 0; j < sc.num_dl(); ++j) {
      diag += opts_.alpha_dl * w.dl[j][t] * std::norm(u.dl[j][t]) *
              std::norm(channels_.radar_to_dl[tx][ti.target + 1][j]);
    }
    model.quad(ti.pulse, ti.pulse) += diag;
  }
  return model;
}

namespace {

// Shared dual-ascent step controller: BB quotient on the negated subgradient
// difference (positive-curvature form), with the fixed fallback, or Polyak's
// rule from the best feasible primal value.
class StepController {
 public:
  StepController(const CodesignOptions& o) : opts_(o) {}

  double next(double lambda, double grad, double dual_value,
              double primal_best) {
    double step = opts_.fallback_step;
    if (opts_.step_rule == StepRule::kBarzilaiBorwein) {
      if (has_prev_) {
        const double s = lambda - prev_lambda_;
        const double curvature = -(grad - prev_grad_);
        if (s * curvature > opts_.degenerate_eps) {
          step = bb_step(s, curvature);
        } else {
          ++fallbacks_;
        }
      }
    } else {
      const double g2 = grad * grad;
      if (g2 > opts_.degenerate_eps) {
        const double gap = primal_best - dual_value;
        step = gap > 0 ? gap / g2 : opts_.fallback_step;
      } else {
        ++fallbacks_;
      }
    }
    // Trust cap; keeps the first wild iterations bounded.
    const double cap = 1e3 * (1.0 + std::abs(lambda)) /
                       std::max(std::abs(grad), 1e-12);
    step = std::min(step, cap);
    has_prev_ = true;
    prev_lambda_ = lambda;
    prev_grad_ = grad;
    last_ = step;
    return step;
  }

  int fallbacks() const { return fallbacks_; }
  double last_step() const { return last_; }

 private:
  CodesignOptions opts_;
  bool has_prev_ = false;
  double prev_lambda_ = 0.0;
  double prev_grad_ = 0.0;
  double last_ = 0.0;
  int fallbacks_ = 0;
};

}  // namespace

CodesignProblem::BlockResult CodesignProblem::solve_ul_power(
    DesignVariables& d, const FilterSet& u, const WeightSet& w,
    int ue) const {
  const UlBlockModel model = ul_block_model(d, u, w, ue);
  const double budget = scenario_.ul_power_max;
  const auto model_gamma = [&](double p) {
    return -model.lin * std::sqrt(p) + model.quad * p;
  };
  const auto primal = [&](double lambda) {
    if (model.lin <= 0.0) return 0.0;
    const double denom = model.quad + lambda;
    if (denom <= 0.0) return 1e6 * std::max(budget, 1.0);
    const double root = model.lin / (2.0 * denom);
    return root * root;
  };

  double best_p = std::clamp(d.ul_power[ue], 0.0, budget);
  double best_gamma = model_gamma(best_p);
  const auto consider = [&](double p) {
    const double clamped = std::clamp(p, 0.0, budget);
    const double g = model_gamma(clamped);
    if (g < best_gamma) {
      best_gamma = g;
      best_p = clamped;
    }
  };

  StepController ctrl(opts_);
  double lambda = 0.0;
  BlockResult res;
  for (int t = 0; t < opts_.dual_max_iter; ++t) {
    const double p = primal(lambda);
    consider(p);
    const double violation = p - budget;
    res.iterations = t + 1;
    if (std::abs(violation) <= 1e-9 * std::max(1.0, budget)) break;
    if (lambda == 0.0 && violation < 0.0) break;
    const double dual_value = model_gamma(p) + lambda * violation;
    const double step = ctrl.next(lambda, violation, dual_value, best_gamma);
    lambda = std::max(0.0, lambda + step * violation);
  }
  res.multiplier = lambda;
  res.last_step = ctrl.last_step();
  res.fallbacks = ctrl.fallbacks();
  d.ul_power[ue] = best_p;
  return res;
}

CodesignProblem::BlockResult CodesignProblem::solve_dl_power(
    DesignVariables& d, const FilterSet& u, const WeightSet& w,
    int rrh) const {
  const DlBlockModel model = dl_block_model(d, u, w, rrh);
  const double budget = scenario_.dl_power_max;
  const int j_count = scenario_.num_dl();

  const auto model_gamma = [&](const Eigen::VectorXd& x) {
    double g = 0.0;
    for (int j = 0; j < j_count; ++j) {
      g += model.quad[j] * x[j] * x[j] + model.lin[j] * x[j];
    }
    return g;
  };
  const auto primal = [&](double lambda) {
    Eigen::VectorXd x(j_count);
    for (int j = 0; j < j_count; ++j) {
      const double denom = model.quad[j] + lambda;
      if (model.lin[j] >= 0.0) {
        x[j] = 0.0;
      } else if (denom <= 0.0) {
        x[j] = std::sqrt(1e6 * std::max(budget, 1.0));
      } else {
        x[j] = -model.lin[j] / (2.0 * denom);
      }
    }
    return x;
  };
  const auto project = [&](Eigen::VectorXd x) {
    const double e = x.squaredNorm();
    if (e > budget) x *= std::sqrt(budget / e);
    return x;
  };

  Eigen::VectorXd best_x(j_count);
  for (int j = 0; j < j_count; ++j) {
    best_x[j] = std::sqrt(std::max(0.0, d.dl_power(rrh, j)));
  }
  best_x = project(best_x);
  double best_gamma = model_gamma(best_x);
  const auto consider = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd xp = project(x);
    const double g = model_gamma(xp);
    if (g < best_gamma) {
      best_gamma = g;
      best_x = xp;
    }
  };

  StepController ctrl(opts_);
  double lambda = 0.0;
  BlockResult res;
  for (int t = 0; t < opts_.dual_max_iter; ++t) {
    const Eigen::VectorXd x = primal(lambda);
    consider(x);
    const double violation = x.squaredNorm() - budget;
    res.iterations = t + 1;
    if (std::abs(violation) <= 1e-9 * std::max(1.0, budget)) break;
    if (lambda == 0.0 && violation < 0.0) break;
    const double dual_value = model_gamma(x) + lambda * violation;
    const double step = ctrl.next(lambda, violation, dual_value, best_gamma);
    lambda = std::max(0.0, lambda + step * violation);
  }
  res.multiplier = lambda;
  res.last_step = ctrl.last_step();
  res.fallbacks = ctrl.fallbacks();
  for (int j = 0; j < j_count; ++j) {
    d.dl_power(rrh, j) = best_x[j] * best_x[j];
  }
  return res;
}

CodesignProblem::BlockResult CodesignProblem::solve_radar_row(
    DesignVariables& d, const FilterSet& u, const WeightSet& w,
    int tx) const {
  const RadarBlockModel model = radar_block_model(d, u, w, tx);
  const double budget = scenario_.radar_tx_power[tx];
  const int k = scenario_.pulses_per_cpi;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(model.quad);
  const Eigen::VectorXd evals = eig.eigenvalues().cwiseMax(0.0);
  const Eigen::VectorXcd beta = eig.eigenvectors().adjoint() * model.lin;

  const auto primal = [&](double lambda) {
    Eigen::VectorXcd coeffs(k);
    for (int i = 0; i < k; ++i) {
      coeffs[i] = beta[i] / std::max(evals[i] + lambda, 1e-300);
    }
    return (eig.eigenvectors() * coeffs).eval();
  };
  const auto model_gamma = [&](const Eigen::VectorXcd& a) {
    return std::real(a.dot(model.quad * a)) - 2.0 * std::real(model.lin.dot(a));
  };
  const auto project = [&](Eigen::VectorXcd a) {
    const double e = a.squaredNorm();
    if (e > budget) a *= std::sqrt(budget / e);
    return a;
  };

  Eigen::VectorXcd best_a = project(d.code.code.row(tx).transpose());
  double best_gamma = model_gamma(best_a);
  const auto consider = [&](const Eigen::VectorXcd& a) {
    const Eigen::VectorXcd ap = project(a);
    const double g = model_gamma(ap);
    if (g < best_gamma) {
      best_gamma = g;
      best_a = ap;
    }
  };

  StepController ctrl(opts_);
  double lambda = 0.0;
  BlockResult res;
  const double violation_cap = 1e3 * std::max(1.0, budget);
  for (int t = 0; t < opts_.dual_max_iter; ++t) {
    const Eigen::VectorXcd a = primal(lambda);
    consider(a);
    const double violation =
        std::min(a.squaredNorm() - budget, violation_cap);
    res.iterations = t + 1;
    if (std::abs(violation) <= 1e-9 * std::max(1.0, budget)) break;
    if (lambda == 0.0 && violation < 0.0) break;
    const double dual_value = model_gamma(a) + lambda * violation;
    const double step = ctrl.next(lambda, violation, dual_value, best_gamma);
    lambda = std::max(0.0, lambda + step * violation);
  }
  res.multiplier = lambda;
  res.last_step = ctrl.last_step();
  res.fallbacks = ctrl.fallbacks();

  d.code.code.row(tx) =
      par_project(best_a, budget, scenario_.par_limit[tx]).transpose();
  return res;
}

std::pair<DesignVariables, ConvergenceTrace> CodesignProblem::bcd(
    Rng& rng) const {
  DesignVariables d = initial_design(rng);
  FilterSet u = mmse_filters(d);
  WeightSet w = optimal_weights(mse_values(d, u));

  ConvergenceTrace trace;
  double gamma_min = std::numeric_limits<double>::infinity();

  for (int outer = 0; outer < opts_.bcd_max_iter; ++outer) {
    std::vector<double> steps;
    int fallbacks = 0;
    for (int i = 0; i < scenario_.num_ul(); ++i) {
      const BlockResult r = solve_ul_power(d, u, w, i);
      steps.push_back(r.last_step);
      fallbacks += r.fallbacks;
    }
    for (int m = 0; m < scenario_.num_rrh(); ++m) {
      const BlockResult r = solve_dl_power(d, u, w, m);
      steps.push_back(r.last_step);
      fallbacks += r.fallbacks;
    }
    for (int mr = 0; mr < scenario_.num_radar_tx(); ++mr) {
      const BlockResult r = solve_radar_row(d, u, w, mr);
      steps.push_back(r.last_step);
      fallbacks += r.fallbacks;
    }

    // Cost reached by the block sweep under the weights it minimized.
    const double gamma = gamma_value(d, u, w);
    u = mmse_filters(d);
    w = optimal_weights(mse_values(d, u));

    trace.gamma.push_back(gamma);
    gamma_min = std::min(gamma_min, gamma);
    trace.gamma_min.push_back(gamma_min);
    trace.cwsr.push_back(cwsr(d, u));
    trace.block_steps.push_back(std::move(steps));
    trace.fallback_events.push_back(fallbacks);

    // Early exit once the best cost has stalled over a ten-iteration window.
    const std::size_t n = trace.gamma_min.size();
    const std::size_t window = 10;
    if (n > window) {
      const double prev = trace.gamma_min[n - 1 - window];
      const double cur = trace.gamma_min[n - 1];
      if (std::abs(prev - cur) <=
          opts_.rel_tol * std::max(std::abs(prev), 1e-12)) {
        break;
      }
    }
  }
  return {std::move(d), std::move(trace)};
}

}  // namespace disac
