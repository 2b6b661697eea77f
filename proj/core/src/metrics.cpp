#include "disac/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace disac {

AssociationScore correct_association_probability(
    const std::vector<int>& assignment, const std::vector<int>& truth) {
  if (assignment.size() != truth.size()) {
    throw std::invalid_argument(
        "correct_association_probability: size mismatch");
  }
  if (assignment.empty()) {
    throw std::invalid_argument(
        "correct_association_probability: empty assignment set");
  }
  AssociationScore s;
  s.total = static_cast<int>(assignment.size());
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == truth[i]) ++s.correct;
  }
  s.p_c = static_cast<double>(s.correct) / s.total;
  return s;
}

RmseReport position_rmse(const std::vector<std::vector<Position2D>>& estimates,
                         const std::vector<std::vector<Position2D>>& truth) {
  if (estimates.size() != truth.size()) {
    throw std::invalid_argument("position_rmse: target count mismatch");
  }
  RmseReport report;
  report.per_cpi_error.resize(estimates.size());
  report.per_target_rmse.resize(estimates.size());
  for (std::size_t t = 0; t < estimates.size(); ++t) {
    if (estimates[t].size() != truth[t].size()) {
      throw std::invalid_argument("position_rmse: time base mismatch");
    }
    double sum_sq = 0.0;
    for (std::size_t c = 0; c < estimates[t].size(); ++c) {
      const double e = euclidean(estimates[t][c], truth[t][c]);
      report.per_cpi_error[t].push_back(e);
      sum_sq += e * e;
    }
    report.per_target_rmse[t] =
        estimates[t].empty() ? 0.0 : std::sqrt(sum_sq / estimates[t].size());
  }
  return report;
}

ConvergenceSummary summarize_convergence(const std::vector<double>& trace,
                                         double tol) {
  if (trace.empty()) {
    throw std::invalid_argument("summarize_convergence: empty trace");
  }
  ConvergenceSummary s;
  s.final_value = trace.back();
  s.monotone_nonincreasing = true;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] > trace[i - 1] + 1e-12 * std::abs(trace[i - 1])) {
      s.monotone_nonincreasing = false;
      break;
    }
  }
  s.iterations_to_tolerance = static_cast<int>(trace.size());
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (std::abs(trace[i] - trace[i - 1]) <=
        tol * std::max(std::abs(trace[i - 1]), 1e-12)) {
      s.iterations_to_tolerance = static_cast<int>(i);
      break;
    }
  }
  if (trace.size() == 1) s.iterations_to_tolerance = 1;
  return s;
}

}  // namespace disac
