#pragma once

#include <vector>

#include "disac/geometry.hpp"

namespace disac {

struct AssociationScore {
  int correct = 0;
  int total = 0;
  double p_c = 0.0;
};

// Fraction of measurements assigned to their originating targets. Both
// vectors map target index -> measurement index.
AssociationScore correct_association_probability(
    const std::vector<int>& assignment, const std::vector<int>& truth);

struct RmseReport {
  // error(t, c): Euclidean position error of target t at CPI c.
  std::vector<std::vector<double>> per_cpi_error;
  std::vector<double> per_target_rmse;
};

RmseReport position_rmse(
    const std::vector<std::vector<Position2D>>& estimates,
    const std::vector<std::vector<Position2D>>& truth);

struct ConvergenceSummary {
  double final_value = 0.0;
  // 1-based index of the first step whose relative change is within tol;
  // equals the trace length when the tolerance is never met.
  int iterations_to_tolerance = 0;
  bool monotone_nonincreasing = false;
};

ConvergenceSummary summarize_convergence(const std::vector<double>& trace,
                                         double tol);

}  // namespace disac
