#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsbm/channel_model.hpp"
#include "gsbm/sym_tensor.hpp"
#include "gsbm/tensor_core.hpp"

namespace gsbm {

// sum_{d=0}^{D} t^d / d!, by term recurrence with compensated summation.
// Returns +inf on overflow.
double exp_truncated(double t, int D);

enum class BoundMethod { exact_enum, monte_carlo, corollary_relaxation };
std::string to_string(BoundMethod m);

// A bound on CAdv_{<=D}^2.
struct BoundReport {
  std::int64_t n = 0;
  int D = 0;
  double value = 1.0;
  BoundMethod method = BoundMethod::exact_enum;
  std::optional<double> mc_stderr;
  std::optional<std::int64_t> samples;
  std::optional<std::uint64_t> seed;
  // Corollary only: the expectation was enumerated (false: Monte Carlo).
  bool enumerated = true;
  // Corollary only: some injective norm is a power-method lower bound, so the
  // relaxation is not certified.
  bool norm_lower_bound = false;
  bool overflow = false;
};

struct ThresholdVerdict {
  std::string condition;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  double margin = 0.0;
  std::string note;
};

ThresholdVerdict make_verdict(std::string condition, double lhs, double rhs, std::string note = {});

// <T, z^{(x) p}>
double overlap_value(const SymTensor<double>& T, std::span<const int> z);

struct EnumOptions {
  double budget = 1e7;
};

BoundReport bound_exact(const SymTensor<double>& T, std::int64_t n, int D, const EnumOptions& opts = {});
BoundReport bound_exact(const ChannelFamily& fam, std::int64_t n, int D, const EnumOptions& opts = {});

BoundReport bound_mc(const SymTensor<double>& T, std::int64_t n, int D, std::int64_t samples, std::uint64_t seed);
BoundReport bound_mc(const ChannelFamily& fam, std::int64_t n, int D, std::int64_t samples, std::uint64_t seed);

enum class CorollaryForm { zbar, chi2 };

struct CorollaryOptions {
  CorollaryForm form = CorollaryForm::zbar;
  double budget = 1e7;
  std::int64_t samples = 100000;
  std::uint64_t seed = 0;
};

// The relaxed argument sum_{j=p*}^{p} C(p,j) ||T^(j)|| n^{p-j} ||zbar||^j, zbar = z - (n/k^2) 1.
double corollary_argument(const MarginalProfile& profile, std::int64_t n, std::span<const int> z, CorollaryForm form);
BoundReport bound_corollary(const MarginalProfile& profile, std::int64_t n, int D, const CorollaryOptions& opts = {});

// Condition for general marginal order p* >= 2:
// max_{p* <= j <= p} ||T^(j)||_inj <= c n^{-(2p-p*)/2} D^{-(p*-2)/2}.
// The constant c is an input; the verdict is relative to it.
ThresholdVerdict check_theorem_p3(const MarginalProfile& profile, std::int64_t n, int D, double c = 1.0);

struct P2Verdict {
  // ||T^(2)|| <= (1 - epsilon) (k^2 / (p(p-1))) / n^{p-1}
  ThresholdVerdict sharp;
  // ||T^(2)|| n^{p-1} p(p-1) / k^2 against 1 - epsilon
  ThresholdVerdict leading_order;
  // ||T^(j)||_inj <= C / n^{p-1} for 3 <= j <= p
  std::vector<ThresholdVerdict> crude;
  bool satisfied = false;
};

P2Verdict check_theorem_p2(const MarginalProfile& profile, std::int64_t n, double epsilon = 0.1, double C = 1.0);

// max_{j >= 2} |lambda_j(Q)|^2 < k lambda_1(Q), lambda_1 the eigenvalue of the all-ones vector.
ThresholdVerdict ks_threshold_sbm(const Eigen::MatrixXd& Q);
// The same on A = Q[1,...,1,.,.] with right side (k^{p-1}/(p-1)) lambda_1(A).
ThresholdVerdict ks_threshold_hsbm(const SymTensor<double>& Q);

struct MultifreqOptions {
  double budget = 1e7;
  std::int64_t samples = 100000;
  std::uint64_t seed = 0;
  bool force_mc = false;
};

struct MultifreqResult {
  double value = 1.0;
  std::optional<double> mc_stderr;
  bool enumerated = true;
};

// E exp^{<=D}(lambda^2 X / 2) for X ~ Pearson(n, k), i.e. the series
// sum_d (1/d!) (lambda^{2d} / n^d) E ((k/2) sum_l (z_l - n/k)^2)^d.
MultifreqResult multifreq_advantage(int k, double lambda, std::int64_t n, int D, const MultifreqOptions& opts = {});

}  // namespace gsbm
