#include "doctest.h"

#include <cmath>
#include <random>

#include "gsbm/channel_model.hpp"
#include "gsbm/errors.hpp"
#include "gsbm/numeric.hpp"
#include "gsbm/tensor_core.hpp"
#include "test_util.hpp"

using namespace gsbm;

namespace {

Eigen::VectorXd pm_vector() {
  Eigen::VectorXd v(4);
  v << 1, -1, -1, 1;
  return v;
}

double sbm_prefactor(double a, double b, double n) {
  return ((a - b) * (a - b) / (4 * (a + b)) + (a - b) * (a - b) / (8 * (n - (a + b) / 2))) / n;
}

SymTensor<double> random_sym(std::mt19937_64& gen, int order, Index dim) {
  std::normal_distribution<double> g;
  Eigen::VectorXd raw(SymTensor<double>::count(order, dim));
  for (Index i = 0; i < raw.size(); ++i) raw(i) = g(gen);
  return symmetrize<double>(order, dim, raw).first;
}

}  // namespace

TEST_CASE("SymTensor basics") {
  Eigen::VectorXd e(4);
  e << 1, 2, 2, 3;
  const SymTensor<double> m(2, 2, e);
  CHECK(m({0, 1}) == 2.0);
  e << 1, 2, 5, 3;
  CHECK_THROWS_AS(SymTensor<double>(2, 2, e), ConfigError);
  const auto [sym, defect] = symmetrize<double>(2, 2, e);
  CHECK(sym({0, 1}) == 3.5);
  CHECK(defect == doctest::Approx(1.5));
  CHECK(SymTensor<double>::scalar(2.5).value() == 2.5);
}

TEST_CASE("partial contraction") {
  std::mt19937_64 gen(3);
  const SymTensor<double> A = random_sym(gen, 2, 3);
  Eigen::VectorXd v = Eigen::VectorXd::Random(3);
  const Eigen::MatrixXd Am = A.unfolding();
  const std::vector<Eigen::VectorXd> one = {v};
  CHECK((partial_contract(A, std::span<const Eigen::VectorXd>(one)).entries() - Am * v).norm() < 1e-14);

  Eigen::VectorXd w = Eigen::VectorXd::Random(3);
  const SymTensor<double> R = SymTensor<double>::rank_one(v, 4, 0.7);
  const SymTensor<double> got = contract_power(R, w, 2);
  const SymTensor<double> want = SymTensor<double>::rank_one(v, 2, 0.7 * std::pow(v.dot(w), 2));
  CHECK((got.entries() - want.entries()).norm() < 1e-13);
  CHECK(full_contract(R, w) == doctest::Approx(0.7 * std::pow(v.dot(w), 4)).epsilon(1e-12));
}

TEST_CASE("characteristic tensor of the 2-SBM") {
  for (double n : {50.0, 100.0, 500.0}) {
    const SymTensor<double> T = characteristic_tensor(build_sbm(symmetric_sbm_matrix(2, 3, 1), std::int64_t(n)));
    const SymTensor<double> want = SymTensor<double>::rank_one(pm_vector(), 2, sbm_prefactor(3, 1, n));
    CHECK((T.entries() - want.entries()).cwiseAbs().maxCoeff() < 1e-14);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);
    CHECK(contract_leading(T, ones).max_abs() < 1e-15);
  }
}

TEST_CASE("characteristic tensor of XOR-SAT") {
  for (int p = 2; p <= 4; ++p) {
    const double eta = 0.3;
    const SymTensor<double> T = characteristic_tensor(build_xor_sat(p, eta));
    const SymTensor<double> want = SymTensor<double>::rank_one(pm_vector(), p, eta / factorial(p));
    CHECK((T.entries() - want.entries()).cwiseAbs().maxCoeff() < 1e-14);
  }
  const InjectiveNorm nrm = injective_norm(characteristic_tensor(build_xor_sat(3, 0.3)));
  CHECK(nrm.method == NormMethod::rank_one_exact);
  CHECK(nrm.value == doctest::Approx(4.0 / 3 * 0.3).epsilon(1e-13));
  CHECK((nrm.witness.cwiseAbs() - Eigen::VectorXd::Constant(4, 0.5)).norm() < 1e-12);
}

TEST_CASE("trivial family has zero tensor") {
  Eigen::MatrixXd t(4, 3);
  t.rowwise() = Eigen::RowVector3d(0.2, 0.3, 0.5);
  const ChannelFamily f(2, 2, t);
  CHECK(characteristic_tensor(f).max_abs() == 0.0);
  CHECK(marginal_profile(f).trivial());
}

TEST_CASE("truth-or-Haar norm") {
  for (const auto& G : {FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::cyclic(5), FiniteGroup::symmetric3()}) {
    for (double eta : {0.1, 0.3}) {
      for (auto mode : {ToHMode::sync, ToHMode::sumset}) {
        if (mode == ToHMode::sumset && !G.abelian()) continue;
        const double k = G.order();
        const InjectiveNorm nrm = injective_norm(characteristic_tensor(build_truth_or_haar(G, eta, mode)));
        CHECK(nrm.value == doctest::Approx(k * k * eta * eta / 2).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("marginal orders") {
  for (int p = 2; p <= 4; ++p) CHECK(*marginal_profile(build_xor_sat(p, 0.2)).marginal_order == p);

  const MarginalProfile h = marginal_profile(build_hsbm(symmetric_hsbm_tensor(3, 2, 5, 2), 30));
  CHECK(*h.marginal_order == 2);

  Eigen::MatrixXd t(4, 2);
  t << 0.3, 0.7, 0.1, 0.9, 0.1, 0.9, 0.1, 0.9;
  const MarginalProfile raw = marginal_profile(ChannelFamily(2, 2, t));
  CHECK(*raw.marginal_order == 1);
  CHECK(raw.norm(1) > 1e-3);
}

TEST_CASE("marginals telescope") {
  std::mt19937_64 gen(23);
  const ChannelFamily f = test::random_exchangeable_family(gen, 3, 2, 3);
  const MarginalProfile prof = marginal_profile(f);
  for (int j = 1; j <= 3; ++j) {
    CHECK((marginalize(prof.marginal(j)).entries() - prof.marginal(j - 1).entries()).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(std::abs(prof.marginal(0).value()) < 1e-10);
}

TEST_CASE("T^(0) vanishes and flattening is PSD") {
  std::mt19937_64 gen(29);
  for (int trial = 0; trial < 12; ++trial) {
    const int p = 2 + trial % 2;
    const int k = 2 + (trial / 2) % 2;
    const ChannelFamily f = test::random_exchangeable_family(gen, p, k, 2 + trial % 3);
    const CharacteristicTensor ct = characteristic_tensor_checked(f);
    CHECK(ct.symmetry_defect < 1e-10);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k * k);
    CHECK(std::abs(full_contract(ct.tensor, ones)) < 1e-10);
    const Eigen::MatrixXd G = pair_flattening(ct.tensor, k);
    CHECK((G - G.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("power method against exact norms") {
  std::mt19937_64 gen(31);
  InjectiveNormOptions forced;
  forced.force_power = true;
  forced.restarts = 20;
  for (int trial = 0; trial < 5; ++trial) {
    const SymTensor<double> A = random_sym(gen, 2, 4);
    const InjectiveNorm exact = injective_norm(A);
    CHECK(exact.method == NormMethod::exact_spectral);
    const InjectiveNorm power = injective_norm(A, forced);
    CHECK(power.value <= exact.value + 1e-12);
    CHECK(power.value == doctest::Approx(exact.value).epsilon(1e-8));

    Eigen::VectorXd w = Eigen::VectorXd::Random(3);
    const SymTensor<double> R = SymTensor<double>::rank_one(w, 3, trial % 2 ? -1.3 : 0.4);
    const InjectiveNorm r_exact = injective_norm(R);
    CHECK(r_exact.method == NormMethod::rank_one_exact);
    const InjectiveNorm r_power = injective_norm(R, forced);
    CHECK(r_power.value <= r_exact.value + 1e-12);
    CHECK(r_power.value == doctest::Approx(r_exact.value).epsilon(1e-8));
    CHECK(r_power.lower_bound);
  }
}

TEST_CASE("power method witness and determinism") {
  std::mt19937_64 gen(37);
  const SymTensor<double> T = random_sym(gen, 3, 3);
  const InjectiveNorm a = injective_norm(T);
  const InjectiveNorm b = injective_norm(T);
  CHECK(a.method == NormMethod::power_multistart);
  CHECK(a.value == b.value);
  CHECK(a.witness.norm() == doctest::Approx(1.0));
  CHECK(std::abs(full_contract(T, a.witness)) == doctest::Approx(a.value).epsilon(1e-10));
}
