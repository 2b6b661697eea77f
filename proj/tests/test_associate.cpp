#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "disac/associate.hpp"
#include "disac/stats.hpp"

using namespace disac;

namespace {

// Independent permanent: direct sum over all permutations.
double permanent_brute(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double total = 0.0;
  do {
    double prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= m(i, perm[i]);
    total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

// Brute-force marginals: beta(n, t) = sum over permutations assigning
// measurement n to target t, normalized by the permanent.
Eigen::MatrixXd marginals_brute(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(n, n);
  double total = 0.0;
  do {
    double prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= m(i, perm[i]);
    total += prod;
    for (int i = 0; i < n; ++i) beta(i, perm[i]) += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return beta / total;
}

}  // namespace

TEST_CASE("measurement pdf: peak value and one-sigma decay") {
  const Eigen::Vector2d z(3.0, -1.0);
  CHECK(measurement_pdf(z, z, 1, 1, 1, 1) ==
        doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-12));
  const Eigen::Vector2d off(4.0, -1.0);
  CHECK(measurement_pdf(off, z, 1, 1, 1, 1) ==
        doctest::Approx(std::exp(-0.5) / (2.0 * M_PI)).epsilon(1e-12));
  // Symmetric in each coordinate.
  const Eigen::Vector2d lo(2.0, -1.0);
  CHECK(measurement_pdf(off, z, 1, 1, 1, 1) ==
        doctest::Approx(measurement_pdf(lo, z, 1, 1, 1, 1)));
}

TEST_CASE("measurement pdf integrates to the resolution-cell mass") {
  // Riemann sum over a dense grid: integral of the density equals
  // res_delay * res_doppler.
  const Eigen::Vector2d truth(0.0, 0.0);
  const double res_d = 0.7, res_f = 1.3;
  const double lim = 8.0, step = 0.02;
  double mass = 0.0;
  for (double x = -lim; x < lim; x += step) {
    for (double y = -lim; y < lim; y += step) {
      mass += measurement_pdf({x, y}, truth, 1.0, 1.0, res_d, res_f) * step *
              step;
    }
  }
  CHECK(mass == doctest::Approx(res_d * res_f).epsilon(1e-3));
}

TEST_CASE("posterior: single target, symmetric split, Bayes oracle") {
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  const auto single = posterior_weighted_likelihood(
      {0.3, 0.4}, {Eigen::Vector2d(0, 0)}, one, one, one);
  CHECK(single[0] == doctest::Approx(1.0));

  std::vector<Eigen::Vector2d> two = {{-1, 0}, {1, 0}};
  Eigen::VectorXd w2 = Eigen::VectorXd::Constant(2, 0.5);
  Eigen::VectorXd s2 = Eigen::VectorXd::Ones(2);
  const auto mid = posterior_weighted_likelihood({0, 0.2}, two, w2, s2, s2);
  CHECK(mid[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mid[1] == doctest::Approx(0.5).epsilon(1e-12));

  // Random 3-target case against direct Bayes-rule arithmetic.
  std::vector<Eigen::Vector2d> three = {{0, 0}, {1.5, -0.5}, {-0.7, 2.0}};
  Eigen::VectorXd w(3), st(3), sp(3);
  w << 0.2, 0.5, 0.3;
  st << 0.8, 1.1, 0.9;
  sp << 1.3, 0.7, 1.0;
  const Eigen::Vector2d z(0.4, 0.6);
  Eigen::VectorXd direct(3);
  for (int t = 0; t < 3; ++t) {
    const double dt = (z[0] - three[t][0]) / st[t];
    const double df = (z[1] - three[t][1]) / sp[t];
    direct[t] = w[t] / (st[t] * sp[t]) * std::exp(-0.5 * (dt * dt + df * df));
  }
  direct /= direct.sum();
  const auto post = posterior_weighted_likelihood(z, three, w, st, sp);
  CHECK((post - direct).cwiseAbs().maxCoeff() < 1e-12);

  // Posteriors over targets sum to one.
  CHECK(post.sum() == doctest::Approx(1.0).epsilon(1e-12));

  bool degenerate = false;
  const auto far = posterior_weighted_likelihood(
      {1e9, 1e9}, three, w, st, sp, &degenerate);
  CHECK(degenerate);
  CHECK(far.sum() == doctest::Approx(1.0));
}

TEST_CASE("permanent: identity, all-ones, brute-force oracle") {
  CHECK(permanent(Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(1.0));
  CHECK(permanent(Eigen::MatrixXd::Ones(3, 3)) == doctest::Approx(6.0));

  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 5;
    Eigen::MatrixXd m(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m(r, c) = rng.uniform();
    const double expect = permanent_brute(m);
    CHECK(permanent(m) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("permanent: zero row nullifies, nonnegative, size guard") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(4, 4);
  m.row(2).setZero();
  CHECK(permanent(m) == doctest::Approx(0.0));
  CHECK_THROWS(permanent(Eigen::MatrixXd::Ones(13, 13)));
  CHECK_THROWS(permanent(Eigen::MatrixXd::Ones(2, 3)));
}

TEST_CASE("association: diagonal likelihood gives identity assignment") {
  LikelihoodMatrix l;
  l.values = Eigen::MatrixXd::Identity(4, 4) * 0.9;
  const auto res = association_probabilities(l);
  for (int t = 0; t < 4; ++t) {
    CHECK(res.assignment[t] == t);
    CHECK(res.beta(t, t) == doctest::Approx(1.0));
  }
}

TEST_CASE("association: 2x2 closed form a*d/(ad+bc)") {
  LikelihoodMatrix l;
  l.values.resize(2, 2);
  l.values << 0.7, 0.2, 0.1, 0.5;
  const auto res = association_probabilities(l);
  const double a = 0.7, b = 0.2, c = 0.1, d = 0.5;
  CHECK(res.beta(0, 0) == doctest::Approx(a * d / (a * d + b * c)));
  CHECK(res.beta(1, 0) == doctest::Approx(b * c / (a * d + b * c)));
}

TEST_CASE("association marginals match brute-force joint enumeration") {
  Rng rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 5;  // up to 6
    LikelihoodMatrix l;
    l.values.resize(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) l.values(r, c) = rng.uniform() + 1e-3;
    const auto res = association_probabilities(l);
    const Eigen::MatrixXd expect = marginals_brute(l.values);
    CHECK((res.beta - expect).cwiseAbs().maxCoeff() < 1e-10);
    // Columns are probability vectors.
    for (int c = 0; c < n; ++c) {
      CHECK(res.beta.col(c).sum() == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(res.beta.col(c).minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("association: permuting measurement rows permutes assignments") {
  Rng rng(12);
  const int n = 4;
  LikelihoodMatrix l;
  l.values.resize(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) l.values(r, c) = rng.uniform() + 1e-3;
  const auto base = association_probabilities(l);

  std::vector<int> perm = {2, 0, 3, 1};  // row r of the permuted = row perm[r]
  LikelihoodMatrix lp;
  lp.values.resize(n, n);
  for (int r = 0; r < n; ++r) lp.values.row(r) = l.values.row(perm[r]);
  const auto permuted = association_probabilities(lp);
  for (int t = 0; t < n; ++t) {
    CHECK(perm[permuted.assignment[t]] == base.assignment[t]);
  }
}

TEST_CASE("association rejects zero permanents") {
  LikelihoodMatrix l;
  l.values = Eigen::MatrixXd::Zero(3, 3);
  CHECK_THROWS(association_probabilities(l));
}

TEST_CASE("gate: inclusion rules and chi-square coverage") {
  const Eigen::Vector2d pred(1.0, 2.0);
  const Eigen::Matrix2d eye = Eigen::Matrix2d::Identity();
  const auto kept = gate({pred, {3.9, 2.0}, {4.1, 2.0}}, pred, eye, 9.0);
  CHECK(kept == std::vector<int>{0, 1});

  // MC coverage at the 0.99 gate.
  const double th = gate_threshold(0.99);
  CHECK(th == doctest::Approx(chi_square_quantile(0.99, 2.0)));
  Rng rng(6);
  Eigen::Matrix2d s;
  s << 2.0, 0.3, 0.3, 0.5;
  const Eigen::Matrix2d chol = Eigen::LLT<Eigen::Matrix2d>(s).matrixL();
  int in = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d z =
        pred + chol * Eigen::Vector2d(rng.gaussian(), rng.gaussian());
    in += !gate({z}, pred, s, th).empty();
  }
  CHECK(std::abs(static_cast<double>(in) / n - 0.99) < 0.005);
}

TEST_CASE("FJE: binary enumeration for one supertarget") {
  SupertargetHypothesis hyp;
  hyp.prior_existence = 0.8;
  hyp.gated = {0};
  hyp.likelihood = {0.6};
  const double pd = 0.9, pg = 0.95, rho = 0.2;
  const auto events = enumerate_fje({hyp}, pd, pg, rho);
  REQUIRE(events.size() == 2);
  const double q = pd * pg * 0.8;
  const double r = 0.6 / pg / rho;
  const double norm = (1 - q) + q * r;
  // Event order: no-assignment first, then the gated measurement.
  CHECK(events[0].assignment[0] == -1);
  CHECK(events[0].posterior == doctest::Approx((1 - q) / norm));
  CHECK(events[1].assignment[0] == 0);
  CHECK(events[1].posterior == doctest::Approx(q * r / norm));
}

TEST_CASE("FJE: no gated measurements gives the single all-missed event") {
  SupertargetHypothesis a, b;
  a.prior_existence = 0.5;
  b.prior_existence = 0.9;
  const auto events = enumerate_fje({a, b}, 0.9, 0.99, 1.0);
  REQUIRE(events.size() == 1);
  CHECK(events[0].posterior == doctest::Approx(1.0));
  CHECK(events[0].assignment == std::vector<int>({-1, -1}));
}

TEST_CASE("FJE: two supertargets x two shared measurements enumerate to 7 "
          "feasible events matching hand enumeration") {
  SupertargetHypothesis s0, s1;
  s0.prior_existence = 1.0;
  s0.gated = {0, 1};
  s0.likelihood = {0.5, 0.2};
  s1.prior_existence = 1.0;
  s1.gated = {0, 1};
  s1.likelihood = {0.1, 0.4};
  const double pd = 0.8, pg = 1.0, rho = 1.0;
  const auto events = enumerate_fje({s0, s1}, pd, pg, rho);
  CHECK(events.size() == 7);  // 3 options each minus the two double-uses

  // Hand enumeration of unnormalized weights.
  const double q = pd * pg;
  const double w_none = (1 - q) * (1 - q);
  const double w_0a = q * 0.5 * (1 - q);
  const double w_0b = q * 0.2 * (1 - q);
  const double w_1a = (1 - q) * q * 0.1;
  const double w_1b = (1 - q) * q * 0.4;
  const double w_01 = q * 0.5 * q * 0.4;
  const double w_10 = q * 0.2 * q * 0.1;
  const double total = w_none + w_0a + w_0b + w_1a + w_1b + w_01 + w_10;
  double found_none = -1, found_01 = -1;
  for (const auto& e : events) {
    if (e.assignment == std::vector<int>({-1, -1})) found_none = e.posterior;
    if (e.assignment == std::vector<int>({0, 1})) found_01 = e.posterior;
  }
  CHECK(found_none == doctest::Approx(w_none / total).epsilon(1e-12));
  CHECK(found_01 == doctest::Approx(w_01 / total).epsilon(1e-12));

  // Posteriors normalize.
  double sum = 0.0;
  for (const auto& e : events) sum += e.posterior;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("marginalize: beta sums to one and matches direct summation") {
  SupertargetHypothesis s0, s1;
  s0.prior_existence = 0.7;
  s0.gated = {0, 1};
  s0.likelihood = {0.5, 0.2};
  s1.prior_existence = 0.6;
  s1.gated = {1};
  s1.likelihood = {0.3};
  const double pd = 0.85, pg = 0.99, rho = 0.4;
  const auto events = enumerate_fje({s0, s1}, pd, pg, rho);
  const auto marg = marginalize(events, {s0, s1}, pd, pg);
  REQUIRE(marg.size() == 2);
  for (const auto& m : marg) {
    double sum = 0.0;
    for (double b : m.beta) sum += b;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.existence >= 0.0);
    CHECK(m.existence <= 1.0);
  }
  // Direct summation oracle for supertarget 0 assigned measurement 0.
  double p_assigned0 = 0.0, p_none0 = 0.0;
  for (const auto& e : events) {
    if (e.assignment[0] == 0) p_assigned0 += e.posterior;
    if (e.assignment[0] == -1) p_none0 += e.posterior;
  }
  const double q0 = pd * pg * 0.7;
  const double missed0 = p_none0 * (1 - pd * pg) * 0.7 / (1 - q0);
  const double exist0 = missed0 + p_assigned0 +
                        [&] {
                          double p = 0.0;
                          for (const auto& e : events) {
                            if (e.assignment[0] == 1) p += e.posterior;
                          }
                          return p;
                        }();
  CHECK(marg[0].existence == doctest::Approx(exist0).epsilon(1e-10));
  CHECK(marg[0].beta[1] == doctest::Approx(p_assigned0 / exist0).epsilon(1e-10));
}

TEST_CASE("marginalize: single certain detection confirms existence") {
  SupertargetHypothesis hyp;
  hyp.prior_existence = 0.5;
  hyp.gated = {0};
  hyp.likelihood = {1e6};  // overwhelming likelihood ratio
  const auto events = enumerate_fje({hyp}, 0.9, 0.99, 1.0);
  const auto marg = marginalize(events, {hyp}, 0.9, 0.99);
  CHECK(marg[0].beta[1] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(marg[0].existence == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("false alarm count pmf: degenerate, unit, and series sum") {
  CHECK(false_alarm_count_pmf(0.0, 5.0, 0) == 1.0);
  CHECK(false_alarm_count_pmf(0.0, 5.0, 2) == 0.0);
  CHECK(false_alarm_count_pmf(1.0, 1.0, 1) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  double sum = 0.0;
  for (int g = 0; g <= 50; ++g) sum += false_alarm_count_pmf(2.0, 1.0, g);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
}
