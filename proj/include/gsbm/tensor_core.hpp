#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gsbm/channel_model.hpp"
#include "gsbm/sym_tensor.hpp"

namespace gsbm {

struct CharacteristicTensor {
  SymTensor<double> tensor;
  // Largest deviation from permutation symmetry before symmetrization. Zero up
  // to rounding for weakly symmetric families.
  double symmetry_defect = 0.0;
};

// Order p, dimension k^2. The pair (a_i, b_i) is flattened to a_i * k + b_i.
CharacteristicTensor characteristic_tensor_checked(const ChannelFamily& fam);
SymTensor<double> characteristic_tensor(const ChannelFamily& fam);

// k^p x k^p matrix G[a][b] = p! T_{(a_1,b_1),...,(a_p,b_p)}.
Eigen::MatrixXd pair_flattening(const SymTensor<double>& T, int k);

enum class NormMethod { exact_spectral, rank_one_exact, power_multistart };
std::string to_string(NormMethod m);

struct InjectiveNormOptions {
  int restarts = 50;
  int iters = 500;
  std::uint64_t seed = 0;
  double tol = 1e-12;
  // Skip the exact paths (order 2, rank one); used to test the power method.
  bool force_power = false;
};

struct InjectiveNorm {
  double value = 0.0;
  // Unit vector; <T, w^m> = signed_value and |signed_value| = value.
  Eigen::VectorXd witness;
  double signed_value = 0.0;
  NormMethod method = NormMethod::exact_spectral;
  bool converged = true;
  // True when value is only a lower bound on the norm (power method).
  bool lower_bound = false;
};

InjectiveNorm injective_norm(const SymTensor<double>& T, const InjectiveNormOptions& opts = {});

struct MarginalProfile {
  int p = 0;
  int k = 0;
  // tensors[j] is T^(j) for j = 0..p; tensors[p] is the full characteristic tensor.
  std::vector<SymTensor<double>> tensors;
  // norms[j] matches tensors[j] for j >= 1; norms[0] is |T^(0)|.
  std::vector<InjectiveNorm> norms;
  // Least j with max |T^(j)| > zero_tol; empty for a trivial family.
  std::optional<int> marginal_order;
  double zero_tol = 1e-10;
  double symmetry_defect = 0.0;

  const SymTensor<double>& marginal(int j) const { return tensors.at(j); }
  double norm(int j) const { return norms.at(j).value; }
  bool trivial() const { return !marginal_order.has_value(); }
  // Any norm over j in [p*, p] came from the power method.
  bool any_lower_bound() const;
};

// T^(j-1) = (1/k^2) T^(j)[1, ., ..., .]
SymTensor<double> marginalize(const SymTensor<double>& Tj);

MarginalProfile marginal_profile(const ChannelFamily& fam, double zero_tol = 1e-10,
                                 const InjectiveNormOptions& opts = {});
// Same, from a given order-p tensor over R^{k^2}. No consistency assertion on
// T^(0), so deliberately corrupted tensors can be profiled.
MarginalProfile marginal_profile(const SymTensor<double>& T, int k, double zero_tol = 1e-10,
                                 const InjectiveNormOptions& opts = {});

}  // namespace gsbm
