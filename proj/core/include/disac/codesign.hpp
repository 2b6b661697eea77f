#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "disac/channel.hpp"
#include "disac/waveform.hpp"

namespace disac {

// Distributed co-phasing precoder: sqrt(power) * conj(g) / ||g||, so that
// g^T v combines coherently. Throws on a zero channel vector.
Eigen::VectorXcd dcp_precoder(const Eigen::VectorXcd& channel, double power);

// Barzilai-Borwein quotient ||s||^2 / (s * gamma) for scalar histories.
// The caller guards the degenerate denominator.
double bb_step(double s_prev_diff, double d_prev_diff);

// Nearest vector to `a` with exact energy `power` and peak-to-average ratio
// at most `par`. Phases of the input are preserved; magnitudes solve the
// clipped-scaling KKT system. Throws when par < 1.
Eigen::VectorXcd par_project(const Eigen::VectorXcd& a, double power,
                             double par);

enum class StepRule { kBarzilaiBorwein, kPolyak };

struct CodesignOptions {
  int dual_max_iter = 100;  // t_max
  int bcd_max_iter = 100;   // l_max
  double rel_tol = 1e-6;    // early-exit tolerance on the Gamma_min trace
  double fallback_step = 1e-2;
  double degenerate_eps = 1e-12;
  StepRule step_rule = StepRule::kBarzilaiBorwein;
  double alpha_radar = 1.0;  // per-path weight
  double alpha_ul = 1.0;     // per-UE weights
  double alpha_dl = 1.0;
};

// One communications symbol of interest: radar pulse `pulse` from Tx `tx`
// arriving via target `target` (0-based).
struct TermIndex {
  int pulse = 0;
  int tx = 0;
  int target = 0;
};

struct DesignVariables {
  RadarCodeMatrix code;
  Eigen::VectorXd ul_power;  // per UL UE
  Eigen::MatrixXd dl_power;  // RRH x DL UE
  // Unit-norm DCP directions per (RRH, DL UE); the realized precoder is
  // sqrt(dl_power) times the direction.
  std::vector<std::vector<Eigen::VectorXcd>> dl_precoder_dir;

  Eigen::VectorXcd dl_precoder(int m, int j) const {
    return std::sqrt(dl_power(m, j)) * dl_precoder_dir[m][j];
  }
  // Stacked precoder across RRHs for DL UE j.
  Eigen::VectorXcd dl_super_precoder(int j) const;
};

// Receive filters per term/path.
struct FilterSet {
  // ul[i][term]: length M*M_c.
  std::vector<std::vector<Eigen::VectorXcd>> ul;
  // dl[j][term]: scalar.
  std::vector<std::vector<cplx>> dl;
  // radar[path]: length K, path order matches draw_radar_paths.
  std::vector<Eigen::VectorXcd> radar;
};

struct MseSet {
  std::vector<std::vector<double>> ul;  // [i][term]
  std::vector<std::vector<double>> dl;  // [j][term]
  std::vector<double> radar;            // [path]
};

struct WeightSet {
  std::vector<std::vector<double>> ul;
  std::vector<std::vector<double>> dl;
  std::vector<double> radar;
};

struct ConvergenceTrace {
  std::vector<double> cwsr;
  std::vector<double> gamma;
  std::vector<double> gamma_min;
  // Last dual step size per block for each outer iteration.
  std::vector<std::vector<double>> block_steps;
  // Degenerate BB steps replaced by the fallback, per outer iteration.
  std::vector<int> fallback_events;
};

// Mutual information of one radar path: log(1 + var * s^H R_in^-1 s),
// the rank-one form of log det(I + var s s^H R_in^-1).
double radar_mi(const Eigen::VectorXcd& steered_code, double coeff_var,
                const Eigen::MatrixXcd& interference_cov);

// Binds a scenario, one CPI's channel realization, and the CWSR weights;
// exposes the WMMSE machinery and the block-coordinate optimizer.
class CodesignProblem {
 public:
  CodesignProblem(const Scenario& sc, const CommChannelSet& channels,
                  const std::vector<RadarPathChannel>& paths,
                  CodesignOptions opts = {});

  int num_terms() const { return num_terms_; }
  TermIndex term(int index) const;
  int num_paths() const { return static_cast<int>(paths_.size()); }

  // Uniform powers, DCP directions from the channel set, and a random-phase
  // constant-modulus code projected onto the PAR constraint.
  DesignVariables initial_design(Rng& rng) const;

  FilterSet mmse_filters(const DesignVariables& d) const;
  MseSet mse_values(const DesignVariables& d, const FilterSet& u) const;
  WeightSet optimal_weights(const MseSet& e) const;

  double gamma_value(const DesignVariables& d, const FilterSet& u,
                     const WeightSet& w) const;
  double cwsr(const DesignVariables& d, const FilterSet& u) const;

  double ul_sinr(const DesignVariables& d, const FilterSet& u, int ue,
                 int term) const;
  double dl_sinr(const DesignVariables& d, const FilterSet& u, int ue,
                 int term) const;

  // Quadratic models of Gamma restricted to one block, all other variables
  // fixed. These drive the closed-form KKT primal recovery inside the dual
  // ascent and are validated against gamma_value in the tests.
  //   UL i:      Gamma(P)  = const - lin*sqrt(P) + quad*P
  //   DL RRH m:  Gamma(x)  = const + sum_j quad[j] x_j^2 + lin[j] x_j,
  //              with x_j = sqrt(P_dmj)
  //   radar row: Gamma(a)  = const + a^H quad a - 2 Re(lin^H a)
  struct UlBlockModel {
    double lin = 0.0;
    double quad = 0.0;
  };
  struct DlBlockModel {
    Eigen::VectorXd quad;
    Eigen::VectorXd lin;
  };
  struct RadarBlockModel {
    Eigen::MatrixXcd quad;
    Eigen::VectorXcd lin;
  };
  UlBlockModel ul_block_model(const DesignVariables& d, const FilterSet& u,
                              const WeightSet& w, int ue) const;
  DlBlockModel dl_block_model(const DesignVariables& d, const FilterSet& u,
                              const WeightSet& w, int rrh) const;
  RadarBlockModel radar_block_model(const DesignVariables& d,
                                    const FilterSet& u, const WeightSet& w,
                                    int tx) const;

  struct BlockResult {
    double multiplier = 0.0;
    double last_step = 0.0;
    int iterations = 0;
    int fallbacks = 0;
  };
  BlockResult solve_ul_power(DesignVariables& d, const FilterSet& u,
                             const WeightSet& w, int ue) const;
  BlockResult solve_dl_power(DesignVariables& d, const FilterSet& u,
                             const WeightSet& w, int rrh) const;
  // Updates the code row in place: dual-ascent solution of the relaxed
  // energy problem followed by the PAR projection.
  BlockResult solve_radar_row(DesignVariables& d, const FilterSet& u,
                              const WeightSet& w, int tx) const;

  // Algorithm "BCD alternating": UL powers, DL powers, radar rows, filters,
  // weights, for at most bcd_max_iter outer iterations.
  std::pair<DesignVariables, ConvergenceTrace> bcd(Rng& rng) const;

  const Scenario& scenario() const { return scenario_; }
  const CodesignOptions& options() const { return opts_; }

 private:
  struct TermContext;
  Eigen::MatrixXcd ul_rx_covariance(const DesignVariables& d, int term) const;
  // Total received second moment at DL UE `ue` during `term`.
  double dl_second_moment(const DesignVariables& d, int ue, int term) const;
  // Interference-plus-noise covariance at radar Rx nr (shared by its paths).
  Eigen::MatrixXcd radar_interference_cov(const DesignVariables& d,
                                          int rx) const;
  // Complex signal amplitude sum_m h_dmj^T v_mj at DL UE j.
  cplx dl_signal_amplitude(const DesignVariables& d, int stream,
                           int receiver) const;
  Eigen::VectorXcd steered_code(const DesignVariables& d, int path) const;

  Scenario scenario_;
  CommChannelSet channels_;
  std::vector<RadarPathChannel> paths_;
  CodesignOptions opts_;
  int num_terms_ = 0;

  // Precomputed channel quantities.
  std::vector<Eigen::VectorXcd> stacked_ul_;        // per UL UE, M*M_c
  std::vector<std::vector<Eigen::VectorXcd>> radar_to_rrh_stacked_;
  // H_SR * (direction embedded at RRH block m): [m][j].
  std::vector<std::vector<Eigen::VectorXcd>> si_columns_;
  std::vector<double> path_coeff_var_;  // per path, r^-4
  std::vector<Eigen::VectorXcd> path_steering_;

  friend class CodesignProblemTestPeer;
};

}  // namespace disac
