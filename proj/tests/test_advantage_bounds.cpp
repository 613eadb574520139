#include "doctest.h"

#include <cmath>
#include <random>

#include "gsbm/advantage_bounds.hpp"
#include "gsbm/channel_model.hpp"
#include "gsbm/errors.hpp"
#include "gsbm/multinomial.hpp"
#include "gsbm/numeric.hpp"
#include "gsbm/tensor_core.hpp"
#include "test_util.hpp"

using namespace gsbm;

namespace {

ChannelFamily sbm(double a, double b, std::int64_t n) { return build_sbm(symmetric_sbm_matrix(2, a, b), n); }

ChannelFamily flat_family() {
  Eigen::MatrixXd t(4, 2);
  t.col(0).setConstant(0.25);
  t.col(1).setConstant(0.75);
  return ChannelFamily(2, 2, t);
}

}  // namespace

TEST_CASE("exp_truncated") {
  for (int D = 0; D < 12; ++D) CHECK(exp_truncated(0.0, D) == 1.0);
  CHECK(exp_truncated(5.0, 0) == 1.0);
  CHECK(exp_truncated(1.0, 3) == doctest::Approx(8.0 / 3).epsilon(1e-15));
  CHECK(exp_truncated(2.0, 200) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
  CHECK(std::isinf(exp_truncated(1e300, 5)));
}

TEST_CASE("overlap value") {
  const SymTensor<double> T = characteristic_tensor(sbm(3, 1, 20));
  const std::vector<int> zero(4, 0);
  CHECK(overlap_value(T, zero) == 0.0);

  Eigen::VectorXd w(3);
  w << 0.5, -1.0, 2.0;
  const SymTensor<double> R = SymTensor<double>::rank_one(w, 3, 0.3);
  const std::vector<int> z = {2, 1, 4};
  CHECK(overlap_value(R, z) == doctest::Approx(0.3 * std::pow(1.0 - 1.0 + 8.0, 3)).epsilon(1e-14));
}

TEST_CASE("overlap expansion through marginals") {
  std::mt19937_64 gen(41);
  const std::vector<ChannelFamily> families = {
      sbm(3, 1, 10), build_xor_sat(3, 0.4), build_hsbm(symmetric_hsbm_tensor(3, 2, 5, 2), 12),
      build_truth_or_haar(FiniteGroup::cyclic(3), 0.4, ToHMode::sync), test::random_exchangeable_family(gen, 3, 2, 3)};
  for (const auto& fam : families) {
    const MarginalProfile prof = marginal_profile(fam);
    const int p = fam.p();
    const int d = fam.k() * fam.k();
    const int n = 25;
    for (int trial = 0; trial < 1000; ++trial) {
      CounterRng rng(trial, 99, 0);
      std::vector<int> z(d);
      draw_multinomial(rng, n, z);
      Eigen::VectorXd zbar(d);
      for (int i = 0; i < d; ++i) zbar(i) = z[i] - double(n) / d;
      double expansion = 0.0;
      for (int j = 0; j <= p; ++j) {
        const double term = j == 0 ? prof.marginal(0).value() : full_contract(prof.marginal(j), zbar);
        expansion += binomial(p, j) * std::pow(double(n), p - j) * term;
      }
      const double direct = overlap_value(prof.marginal(p), z);
      CHECK(direct == doctest::Approx(expansion).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("bound_exact") {
  for (int D : {0, 3, 7}) CHECK(bound_exact(flat_family(), 6, D).value == 1.0);
  CHECK(bound_exact(sbm(3, 1, 20), 20, 0).value == 1.0);

  const BoundReport ex = bound_exact(sbm(3, 1, 20), 20, 3);
  const BoundReport mc = bound_mc(sbm(3, 1, 20), 20, 3, 200000, 7);
  CHECK(std::abs(ex.value - mc.value) <= 3 * *mc.mc_stderr);
  CHECK(ex.value >= 1.0);

  CHECK_THROWS_AS(bound_exact(sbm(3, 1, 400), 400, 3, {1e3}), BudgetExceeded);
}

TEST_CASE("bounds are non-decreasing in D") {
  const auto fam = build_truth_or_haar(FiniteGroup::cyclic(3), 0.5, ToHMode::sync);
  double prev = 0.0;
  for (int D = 0; D <= 8; ++D) {
    const double v = bound_exact(fam, 8, D).value;
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("bound_mc") {
  const BoundReport flat = bound_mc(flat_family(), 10, 4, 1000, 1);
  CHECK(flat.value == 1.0);
  CHECK(*flat.mc_stderr == 0.0);
  const auto fam = build_xor_sat(2, 0.5);
  const BoundReport a = bound_mc(fam, 12, 4, 5000, 99);
  const BoundReport b = bound_mc(fam, 12, 4, 5000, 99);
  CHECK(a.value == b.value);
  CHECK(*a.mc_stderr == *b.mc_stderr);
  const BoundReport ex = bound_exact(fam, 12, 4);
  CHECK(std::abs(ex.value - a.value) <= 3 * *a.mc_stderr);
}

TEST_CASE("corollary relaxation") {
  const MarginalProfile prof = marginal_profile(sbm(3, 1, 8));
  CorollaryOptions zb, cs;
  zb.form = CorollaryForm::zbar;
  cs.form = CorollaryForm::chi2;
  for (int D = 1; D <= 4; ++D) {
    const double a = bound_corollary(prof, 8, D, zb).value;
    const double b = bound_corollary(prof, 8, D, cs).value;
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    CHECK(a >= bound_exact(prof.marginal(2), 8, D).value - 1e-12);
  }
  CHECK(bound_corollary(marginal_profile(flat_family()), 8, 5).value == 1.0);

  const std::vector<int> z = {3, 1, 0, 4};
  Eigen::VectorXd zbar(4);
  for (int i = 0; i < 4; ++i) zbar(i) = z[i] - 2.0;
  const double X = 4.0 / 8.0 * zbar.squaredNorm();
  CHECK(corollary_argument(prof, 8, z, CorollaryForm::zbar) ==
        doctest::Approx(corollary_argument(prof, 8, z, CorollaryForm::chi2)).epsilon(1e-12));
  CHECK(corollary_argument(prof, 8, z, CorollaryForm::zbar) ==
        doctest::Approx(prof.norm(2) * 8.0 / 4.0 * X).epsilon(1e-12));
}

TEST_CASE("marginal order condition") {
  const MarginalProfile x = marginal_profile(build_xor_sat(3, 1e-4));
  const ThresholdVerdict v1 = check_theorem_p3(x, 100, 10);
  const ThresholdVerdict v2 = check_theorem_p3(x, 200, 10);
  CHECK(v1.lhs == v2.lhs);
  CHECK(v2.margin < v1.margin);
  CHECK(v1.rhs == doctest::Approx(std::pow(100.0, -1.5) / std::sqrt(10.0)).epsilon(1e-12));

  const MarginalProfile s = marginal_profile(sbm(3, 1, 100));
  CHECK(check_theorem_p3(s, 100, 3).rhs == check_theorem_p3(s, 100, 30).rhs);

  Eigen::MatrixXd t(4, 2);
  t << 0.3, 0.7, 0.1, 0.9, 0.1, 0.9, 0.1, 0.9;
  CHECK_THROWS_AS(check_theorem_p3(marginal_profile(ChannelFamily(2, 2, t)), 100, 3), UnsupportedRegime);
  CHECK_THROWS_AS(check_theorem_p3(s, 100, 200), UnsupportedRegime);
}

TEST_CASE("order-2 condition") {
  const std::int64_t n = 100000;
  CHECK(check_theorem_p2(marginal_profile(sbm(3, 1, n)), n).leading_order.satisfied);
  CHECK_FALSE(check_theorem_p2(marginal_profile(sbm(5, 1, n)), n).leading_order.satisfied);

  for (double gamma : {0.5, 0.8, 1.2, 1.5}) {
    const double eta = gamma / std::sqrt(double(n));
    const auto prof = marginal_profile(build_truth_or_haar(FiniteGroup::cyclic(3), eta, ToHMode::sync));
    CHECK(check_theorem_p2(prof, n).leading_order.satisfied == (gamma < 1.0));
  }

  for (auto [a, b] : {std::pair{6.0, 2.0}, std::pair{9.0, 1.0}, std::pair{3.0, 2.0}}) {
    const auto prof = marginal_profile(build_hsbm(symmetric_hsbm_tensor(3, 2, a, b), 2000));
    const double closed = 2 * (a - b) * (a - b) / (4 * (a + 3 * b));
    CHECK(check_theorem_p2(prof, 2000).leading_order.satisfied == (closed < 0.9));
  }
}

TEST_CASE("Kesten-Stigum reductions") {
  for (int k : {2, 3, 4}) {
    for (auto [a, b] : {std::pair{3.0, 1.0}, std::pair{6.0, 0.0}, std::pair{2.0, 2.0}, std::pair{10.0, 1.0}}) {
      const ThresholdVerdict v = ks_threshold_sbm(symmetric_sbm_matrix(k, a, b));
      CHECK(v.satisfied == ((a - b) * (a - b) / (k * (a + (k - 1) * b)) < 1));
      const ThresholdVerdict h = ks_threshold_hsbm(symmetric_hsbm_tensor(2, k, a, b));
      CHECK(h.satisfied == v.satisfied);
      CHECK(h.lhs == doctest::Approx(v.lhs));
    }
  }
  CHECK(ks_threshold_sbm(symmetric_sbm_matrix(2, 2, 2)).lhs == doctest::Approx(0.0));
  CHECK(ks_threshold_sbm(symmetric_sbm_matrix(2, 2, 2)).satisfied);
}

TEST_CASE("multi-frequency series") {
  CHECK(multifreq_advantage(3, 0.0, 10, 5).value == 1.0);
  CHECK(multifreq_advantage(3, 0.8, 10, 0).value == 1.0);
  const MultifreqResult ex = multifreq_advantage(2, 0.5, 10, 4);
  CHECK(ex.enumerated);
  MultifreqOptions mc;
  mc.force_mc = true;
  mc.samples = 1000000;
  mc.seed = 3;
  const MultifreqResult est = multifreq_advantage(2, 0.5, 10, 4, mc);
  CHECK_FALSE(est.enumerated);
  CHECK(std::abs(ex.value - est.value) <= 3 * *est.mc_stderr);
}
