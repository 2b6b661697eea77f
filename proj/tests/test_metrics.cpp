#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>

#include "disac/metrics.hpp"
#include "disac/rng.hpp"

using namespace disac;

TEST_CASE("correct association probability: exact ratios") {
  const AssociationScore all = correct_association_probability({0, 1, 2},
                                                               {0, 1, 2});
  CHECK(all.p_c == doctest::Approx(1.0));

  std::vector<int> assign(10), truth(10);
  std::iota(truth.begin(), truth.end(), 0);
  assign = truth;
  assign[3] = 7;
  assign[8] = 1;
  const AssociationScore s = correct_association_probability(assign, truth);
  CHECK(s.correct == 8);
  CHECK(s.total == 10);
  CHECK(s.p_c == doctest::Approx(0.8));

  CHECK_THROWS(correct_association_probability({}, {}));
  CHECK_THROWS(correct_association_probability({1}, {1, 2}));
}

TEST_CASE("random permutations land at 1/N correct on average") {
  Rng rng(3);
  const int n = 5, trials = 20000;
  long correct = 0;
  std::vector<int> perm(n);
  for (int t = 0; t < trials; ++t) {
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
    }
    for (int i = 0; i < n; ++i) correct += perm[i] == i;
  }
  const double avg = static_cast<double>(correct) / (trials * n);
  CHECK(std::abs(avg - 1.0 / n) < 0.01);
}

TEST_CASE("p_c invariant under consistent relabeling") {
  std::vector<int> assign = {2, 0, 1, 1};
  std::vector<int> truth = {2, 1, 1, 0};
  const double before = correct_association_probability(assign, truth).p_c;
  // Relabel measurements 0->5, 1->9, 2->4 in both.
  auto relabel = [](std::vector<int> v) {
    for (auto& x : v) x = x == 0 ? 5 : (x == 1 ? 9 : 4);
    return v;
  };
  const double after =
      correct_association_probability(relabel(assign), relabel(truth)).p_c;
  CHECK(before == after);
}

TEST_CASE("position rmse: zero, 3-4-5 offset, recomputation oracle") {
  std::vector<std::vector<Position2D>> truth = {{{0, 0}, {1, 1}, {2, 2}}};
  CHECK(position_rmse(truth, truth).per_target_rmse[0] == doctest::Approx(0.0));

  std::vector<std::vector<Position2D>> offset = {
      {{3, 4}, {4, 5}, {5, 6}}};
  const RmseReport r = position_rmse(offset, truth);
  CHECK(r.per_target_rmse[0] == doctest::Approx(5.0));
  for (double e : r.per_cpi_error[0]) CHECK(e == doctest::Approx(5.0));

  Rng rng(7);
  std::vector<std::vector<Position2D>> est(2), tru(2);
  for (int t = 0; t < 2; ++t) {
    for (int c = 0; c < 20; ++c) {
      tru[t].push_back({rng.uniform(-5, 5), rng.uniform(-5, 5)});
      est[t].push_back({rng.uniform(-5, 5), rng.uniform(-5, 5)});
    }
  }
  const RmseReport rep = position_rmse(est, tru);
  for (int t = 0; t < 2; ++t) {
    double acc = 0.0;
    for (int c = 0; c < 20; ++c) {
      const double dx = est[t][c].x - tru[t][c].x;
      const double dy = est[t][c].y - tru[t][c].y;
      acc += dx * dx + dy * dy;
    }
    CHECK(rep.per_target_rmse[t] ==
          doctest::Approx(std::sqrt(acc / 20)).epsilon(1e-12));
  }

  CHECK_THROWS(position_rmse(est, {{}}));
}

TEST_CASE("convergence summary: constant, decreasing, noisy traces") {
  const ConvergenceSummary flat = summarize_convergence({5.0, 5.0, 5.0}, 1e-4);
  CHECK(flat.iterations_to_tolerance == 1);
  CHECK(flat.monotone_nonincreasing);
  CHECK(flat.final_value == 5.0);

  const ConvergenceSummary dec =
      summarize_convergence({10, 8, 6.5, 6.4999}, 1e-4);
  CHECK(dec.monotone_nonincreasing);
  CHECK(dec.iterations_to_tolerance == 3);

  // First index below tolerance by hand: |v1 - v0| = 0.5 > tol*10,
  // |v2 - v1| = 1e-5*9.5 < tol scale -> index 2.
  const ConvergenceSummary noisy =
      summarize_convergence({10.0, 9.5, 9.5 - 9.5e-5, 12.0}, 1e-4);
  CHECK(noisy.iterations_to_tolerance == 2);
  CHECK_FALSE(noisy.monotone_nonincreasing);

  CHECK_THROWS(summarize_convergence({}, 1e-4));
}
