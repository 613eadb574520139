#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsbm/channel_model.hpp"
#include "gsbm/sym_tensor.hpp"
#include "gsbm/tensor_core.hpp"

namespace gsbm {

// A population small enough to enumerate every observation vector y in
// [ell]^N, N = C(n, p), and every labelling in [k]^n.
struct TinyInstance {
  TinyInstance(ChannelFamily fam, int n, double state_budget = 1e7);

  ChannelFamily fam;
  int n;
  int N;
  // p-subsets in lexicographic order of their sorted index tuples.
  std::vector<std::vector<int>> subsets;

  std::int64_t states() const { return states_; }
  std::int64_t labellings() const { return labellings_; }
  // Observation vector with index s; coordinate 0 is most significant.
  std::vector<int> decode(std::int64_t s) const;
  std::int64_t encode(std::span<const int> y) const;

 private:
  std::int64_t states_;
  std::int64_t labellings_;
};

// dP/dQ(y), summing over labellings x for the given y.
double likelihood_ratio(const TinyInstance& inst, std::span<const int> y);
// dP/dQ for every y, computed independently as P(y)/Q(y) with x outermost.
std::vector<double> likelihood_ratio_table(const TinyInstance& inst);

// Orthogonal decomposition of dP/dQ in L^2(Q) over coordinate subsets U of [N]
// (bit i of a mask is coordinate i).
class EfronStein {
 public:
  explicit EfronStein(const TinyInstance& inst);

  // f_U(y); only the coordinates in U are read.
  double component(std::uint32_t U, std::span<const int> y) const;
  double component_norm2(std::uint32_t U) const { return norm2_[U]; }
  // ||proj onto coordinate degree <= D|| in L^2(Q).
  double cadv(int D) const;
  int coordinates() const { return N_; }

 private:
  double conditional(std::uint32_t S, std::span<const int> y) const;

  int N_;
  int ell_;
  Eigen::VectorXd avg_;
  // cond_[S] holds E_Q[L | y_S] indexed by y_S (ascending coordinates, first most significant).
  std::vector<std::vector<double>> cond_;
  std::vector<double> norm2_;
};

double cadv_exact(const TinyInstance& inst, int D);

// R: sum over increasing index tuples; R': all tuples in [n]^p divided by p!.
double overlap_R(const TinyInstance& inst, std::span<const int> x1, std::span<const int> x2, bool distinct_only);

struct ChainOptions {
  // Used for values (iv) and (v) instead of the family's own tensor.
  std::optional<SymTensor<double>> tensor_override;
  bool throw_on_failure = true;
  double slack = 1e-9;
  double equality_tol = 1e-10;
  InjectiveNormOptions norm_options;
};

struct ChainLink {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  // rhs - lhs for inequalities, -|rhs - lhs| for the equality link.
  double slack = 0.0;
  bool ok = true;
};

struct ChainReport {
  int n = 0;
  int D = 0;
  double cadv_squared = 1.0;
  double exp_R = 1.0;
  double exp_R_prime = 1.0;
  double bound_exact = 1.0;
  double bound_corollary = 1.0;
  std::vector<ChainLink> links;
  bool passed = true;
  std::string violated;
};

// (i) CAdv^2 <= (ii) E exp(R) <= (iii) E exp(R') = (iv) multinomial bound <= (v) relaxation.
ChainReport verify_chain(const TinyInstance& inst, int D, const ChainOptions& opts = {});

}  // namespace gsbm
