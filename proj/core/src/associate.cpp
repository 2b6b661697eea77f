#include "disac/associate.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "disac/stats.hpp"

namespace disac {

double measurement_pdf(const Eigen::Vector2d& z, const Eigen::Vector2d& truth,
                       double sigma_delay, double sigma_doppler,
                       double res_delay, double res_doppler) {
  if (!(sigma_delay > 0) || !(sigma_doppler > 0)) {
    throw std::invalid_argument("measurement_pdf: sigmas must be > 0");
  }
  const double dt = (z[0] - truth[0]) / sigma_delay;
  const double df = (z[1] - truth[1]) / sigma_doppler;
  return res_delay * res_doppler /
         (2.0 * M_PI * sigma_delay * sigma_doppler) *
         std::exp(-0.5 * (dt * dt + df * df));
}

Eigen::VectorXd posterior_weighted_likelihood(
    const Eigen::Vector2d& z, const std::vector<Eigen::Vector2d>& predicted,
    const Eigen::VectorXd& mixture_weights, const Eigen::VectorXd& sigma_delay,
    const Eigen::VectorXd& sigma_doppler, bool* degenerate) {
  const int n = static_cast<int>(predicted.size());
  if (degenerate) *degenerate = false;
  // Work with log densities and subtract the max exponent so that a far
  // measurement still produces a well-defined posterior.
  Eigen::VectorXd logp(n);
  double max_log = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < n; ++t) {
    const double dt = (z[0] - predicted[t][0]) / sigma_delay[t];
    const double df = (z[1] - predicted[t][1]) / sigma_doppler[t];
    const double w = mixture_weights[t];
    logp[t] = (w > 0 ? std::log(w) : -std::numeric_limits<double>::infinity()) -
              std::log(sigma_delay[t] * sigma_doppler[t]) -
              0.5 * (dt * dt + df * df);
    max_log = std::max(max_log, logp[t]);
  }
  Eigen::VectorXd post(n);
  // All component densities underflow to zero in linear space: the mixture
  // density carries no information, so report a uniform posterior.
  if (!std::isfinite(max_log) || std::exp(max_log) == 0.0) {
    if (degenerate) *degenerate = true;
    post.setConstant(1.0 / n);
    return post;
  }
  double sum = 0.0;
  for (int t = 0; t < n; ++t) {
    post[t] = std::exp(logp[t] - max_log);
    sum += post[t];
  }
  return post / sum;
}

double permanent(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  if (m.cols() != n) throw std::invalid_argument("permanent: matrix not square");
  if (n > 12) throw std::invalid_argument("permanent: n > 12 not supported");
  if (n == 0) return 1.0;

  // Ryser: perm(A) = (-1)^n sum_{S != empty} (-1)^|S| prod_i sum_{j in S} a_ij.
  // Subsets are visited in Gray-code order so each step updates one column.
  std::vector<double> rowsum(n, 0.0);
  double total = 0.0;
  std::uint32_t gray = 0;
  for (std::uint32_t idx = 1; idx < (1u << n); ++idx) {
    const std::uint32_t next = idx ^ (idx >> 1);
    const std::uint32_t changed = next ^ gray;
    const int col = std::countr_zero(changed);
    const double sgn = (next & changed) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) rowsum[i] += sgn * m(i, col);
    gray = next;

    double prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= rowsum[i];
    const int popcount = std::popcount(next);
    total += ((n - popcount) % 2 == 0 ? 1.0 : -1.0) * prod;
  }
  return total;
}

AssociationResult association_probabilities(const LikelihoodMatrix& l) {
  const Eigen::MatrixXd& m = l.values;
  const int n = static_cast<int>(m.rows());
  if (m.cols() != n) {
    throw std::invalid_argument(
        "association_probabilities: likelihood matrix must be square");
  }
  const double total = permanent(m);
  if (!(total > 0)) {
    throw std::domain_error(
        "association_probabilities: permanent is zero; all joint assignments "
        "are infeasible");
  }

  AssociationResult res;
  res.beta.resize(n, n);
  Eigen::MatrixXd minor(n - 1, n - 1);
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      for (int i = 0, mi = 0; i < n; ++i) {
        if (i == row) continue;
        for (int j = 0, mj = 0; j < n; ++j) {
          if (j == col) continue;
          minor(mi, mj) = m(i, j);
          ++mj;
        }
        ++mi;
      }
      res.beta(row, col) =
          m(row, col) * (n == 1 ? 1.0 : permanent(minor)) / total;
    }
  }

  res.assignment.resize(n);
  for (int col = 0; col < n; ++col) {
    int best = 0;
    for (int row = 1; row < n; ++row) {
      if (res.beta(row, col) > res.beta(best, col)) best = row;
    }
    res.assignment[col] = best;
  }
  return res;
}

std::vector<int> gate(const std::vector<Eigen::Vector2d>& measurements,
                      const Eigen::Vector2d& predicted,
                      const Eigen::Matrix2d& innovation_cov,
                      double threshold) {
  const Eigen::Matrix2d inv = innovation_cov.inverse();
  std::vector<int> kept;
  for (int i = 0; i < static_cast<int>(measurements.size()); ++i) {
    const Eigen::Vector2d d = measurements[i] - predicted;
    if (d.dot(inv * d) < threshold) kept.push_back(i);
  }
  return kept;
}

double gate_threshold(double pg) { return chi_square_quantile(pg, 2.0); }

namespace {

void enumerate_recursive(const std::vector<SupertargetHypothesis>& hyps,
                         double pd, double pg, double clutter_density, int s,
                         std::vector<int>& assignment, std::uint64_t used,
                         double weight,
                         std::vector<FusionJunctionEvent>& out,
                         std::size_t max_events) {
  if (out.size() >= max_events) {
    throw std::runtime_error("enumerate_fje: event space exceeds budget");
  }
  if (s == static_cast<int>(hyps.size())) {
    out.push_back({assignment, weight});
    return;
  }
  const double q = pd * pg * hyps[s].prior_existence;
  // Supertarget s undetected.
  assignment[s] = -1;
  enumerate_recursive(hyps, pd, pg, clutter_density, s + 1, assignment, used,
                      weight * (1.0 - q), out, max_events);
  // Supertarget s takes one of its gated measurements.
  for (std::size_t g = 0; g < hyps[s].gated.size(); ++g) {
    const int meas = hyps[s].gated[g];
    if (used & (1ull << meas)) continue;
    assignment[s] = meas;
    const double ratio = hyps[s].likelihood[g] / pg / clutter_density;
    enumerate_recursive(hyps, pd, pg, clutter_density, s + 1, assignment,
                        used | (1ull << meas), weight * q * ratio, out,
                        max_events);
  }
  assignment[s] = -1;
}

}  // namespace

std::vector<FusionJunctionEvent> enumerate_fje(
    const std::vector<SupertargetHypothesis>& hypotheses, double pd, double pg,
    double clutter_density, std::size_t max_events) {
  std::vector<FusionJunctionEvent> events;
  std::vector<int> assignment(hypotheses.size(), -1);
  enumerate_recursive(hypotheses, pd, pg, clutter_density, 0, assignment, 0,
                      1.0, events, max_events);
  double total = 0.0;
  for (const auto& e : events) total += e.posterior;
  if (total > 0) {
    for (auto& e : events) e.posterior /= total;
  } else if (!events.empty()) {
    // All weights underflowed; fall back to the uniform posterior.
    for (auto& e : events) e.posterior = 1.0 / events.size();
  }
  return events;
}

std::vector<SupertargetMarginals> marginalize(
    const std::vector<FusionJunctionEvent>& events,
    const std::vector<SupertargetHypothesis>& hypotheses, double pd,
    double pg) {
  const int s_count = static_cast<int>(hypotheses.size());
  std::vector<SupertargetMarginals> out(s_count);
  for (int s = 0; s < s_count; ++s) {
    const auto& hyp = hypotheses[s];
    const int g_count = static_cast<int>(hyp.gated.size());
    std::vector<double> assigned(g_count, 0.0);
    double none = 0.0;
    for (const auto& e : events) {
      if (e.assignment[s] < 0) {
        none += e.posterior;
      } else {
        for (int g = 0; g < g_count; ++g) {
          if (hyp.gated[g] == e.assignment[s]) {
            assigned[g] += e.posterior;
            break;
          }
        }
      }
    }
    // The no-assignment events carry both "exists but missed" and "does not
    // exist" mass; only the former counts toward existence.
    const double q = pd * pg * hyp.prior_existence;
    const double denom = 1.0 - q;
    const double missed =
        denom > 0 ? none * (1.0 - pd * pg) * hyp.prior_existence / denom : 0.0;
    double existence = missed;
    for (double a : assigned) existence += a;
    out[s].existence = std::min(1.0, std::max(0.0, existence));
    out[s].beta.assign(g_count + 1, 0.0);
    if (existence > 0) {
      out[s].beta[0] = missed / existence;
      for (int g = 0; g < g_count; ++g) {
        out[s].beta[1 + g] = assigned[g] / existence;
      }
    } else {
      out[s].beta[0] = 1.0;
    }
  }
  return out;
}

double false_alarm_count_pmf(double density, double volume, int count) {
  if (density < 0 || volume < 0) {
    throw std::invalid_argument("false_alarm_count_pmf: negative rate");
  }
  if (count < 0) return 0.0;
  const double mean = density * volume;
  if (mean == 0.0) return count == 0 ? 1.0 : 0.0;
  return std::exp(-mean + count * std::log(mean) - std::lgamma(count + 1.0));
}

}  // namespace disac
