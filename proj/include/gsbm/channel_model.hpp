#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gsbm/sym_tensor.hpp"

namespace gsbm {

// Channel table of a discrete GSBM: one probability vector over [ell] for each
// label tuple a in [k]^p. Row r of table() is mu_a for the tuple whose
// row-major (first label most significant) index is r.
class ChannelFamily {
 public:
  // Rows are validated: entries >= -1e-14 (tiny negatives clamped to 0), row
  // sums within sum_tol of 1, and every symbol must have positive average mass.
  ChannelFamily(int p, int k, Eigen::MatrixXd table, double sum_tol = 1e-12);

  int p() const { return p_; }
  int k() const { return k_; }
  int ell() const { return static_cast<int>(table_.cols()); }
  Index tuples() const { return table_.rows(); }

  const Eigen::MatrixXd& table() const { return table_; }
  const Eigen::VectorXd& average() const { return average_; }

  Eigen::VectorXd channel(Index a) const { return table_.row(a).transpose(); }
  Eigen::VectorXd channel(std::span<const int> a) const { return channel(tuple_index(a)); }

  Index tuple_index(std::span<const int> a) const;
  std::vector<int> tuple(Index a) const;

 private:
  int p_;
  int k_;
  Eigen::MatrixXd table_;
  Eigen::VectorXd average_;
};

// Cayley-table group on elements {0, ..., order-1}.
class FiniteGroup {
 public:
  // Validates the Latin-square property, associativity (k <= 64), identity and inverses.
  explicit FiniteGroup(std::vector<std::vector<int>> cayley);

  static FiniteGroup cyclic(int k);
  // Sym([3]) with elements ordered as permutations of (0,1,2) in lexicographic order.
  static FiniteGroup symmetric3();
  // "Z<k>", "S3" / "Sym3".
  static FiniteGroup by_name(const std::string& name);

  int order() const { return static_cast<int>(cayley_.size()); }
  int identity() const { return identity_; }
  int mul(int g, int h) const { return cayley_[g][h]; }
  int inverse(int g) const { return inverse_[g]; }
  int element_order(int g) const;
  bool abelian() const;
  const std::vector<std::vector<int>>& cayley() const { return cayley_; }

 private:
  std::vector<std::vector<int>> cayley_;
  std::vector<int> inverse_;
  int identity_ = 0;
};

struct ModelAudit {
  bool nontrivial = false;
  bool weakly_symmetric = false;
  bool strongly_symmetric = false;
  double max_symmetry_defect = 0.0;
  // Regularity holds automatically for non-degenerate discrete families.
  bool regular = true;
  // Set when k^{2p} p! exceeded the audit budget; the symmetry checks still ran.
  bool cost_warning = false;
};

Eigen::VectorXd average_channel(const ChannelFamily& fam);
Eigen::VectorXd centered_channel(const ChannelFamily& fam, std::span<const int> a);

ModelAudit audit(const ChannelFamily& fam, double tol = 1e-10, double budget = 1e8);

// Q is k x k, symmetric, nonnegative with max entry below n, and Q 1 = lambda 1.
ChannelFamily build_sbm(const Eigen::MatrixXd& Q, std::int64_t n);
Eigen::MatrixXd symmetric_sbm_matrix(int k, double alpha, double beta);

// Q is a symmetric order-p tensor over R^k with Q[1,...,1,.] = lambda 1.
ChannelFamily build_hsbm(const SymTensor<double>& Q, std::int64_t n);
// alpha on the diagonal (all labels equal), beta elsewhere.
SymTensor<double> symmetric_hsbm_tensor(int p, int k, double alpha, double beta);

enum class ToHMode { sync, sumset };
ChannelFamily build_truth_or_haar(const FiniteGroup& G, double eta, ToHMode mode);

// Labels 0, 1 stand for +1, -1; the alphabet is (+1, -1, •).
ChannelFamily build_xor_sat(int p, double eta);
// Noiseless parity channel over the alphabet (+1, -1).
ChannelFamily build_xor_full_reveal(int p);

ChannelFamily resample(const ChannelFamily& fam, double eta);
// Appends the erasure symbol as the last alphabet entry. eta = 0 returns fam
// unchanged; eta = 1 returns the one-symbol family.
ChannelFamily censor(const ChannelFamily& fam, double eta);

}  // namespace gsbm
