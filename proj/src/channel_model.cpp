#include "gsbm/channel_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "gsbm/errors.hpp"
#include "gsbm/numeric.hpp"

namespace gsbm {

namespace {

void require_eta(double eta, const char* what) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError(std::string(what) + ": eta must lie in [0, 1]");
}

// perm_maps[s][r] is the row index of the tuple a∘σ_s for the tuple with row index r.
std::vector<std::vector<Index>> permutation_maps(const ChannelFamily& fam) {
  std::vector<int> sigma(fam.p());
  std::iota(sigma.begin(), sigma.end(), 0);
  std::vector<std::vector<Index>> maps;
  std::vector<int> permuted(fam.p());
  do {
    std::vector<Index> m(fam.tuples());
    for (Index r = 0; r < fam.tuples(); ++r) {
      const auto a = fam.tuple(r);
      for (int i = 0; i < fam.p(); ++i) permuted[i] = a[sigma[i]];
      m[r] = fam.tuple_index(permuted);
    }
    maps.push_back(std::move(m));
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return maps;
}

}  // namespace

ChannelFamily::ChannelFamily(int p, int k, Eigen::MatrixXd table, double sum_tol)
    : p_(p), k_(k), table_(std::move(table)) {
  if (p < 2) throw ConfigError("channel family: p must be at least 2");
  if (k < 1) throw ConfigError("channel family: k must be at least 1");
  if (table_.cols() < 1) throw ConfigError("channel family: alphabet must be nonempty");
  if (table_.rows() != static_cast<Index>(ipow(k, p))) {
    throw ConfigError("channel family: expected k^p = " + std::to_string(ipow(k, p)) + " channels, got " +
                      std::to_string(table_.rows()));
  }
  if (!table_.allFinite()) throw ConfigError("channel family: non-finite probability");
  if (table_.minCoeff() < -1e-14) throw ConfigError("channel family: negative probability");
  table_ = table_.cwiseMax(0.0);
  for (Index r = 0; r < table_.rows(); ++r) {
    const double s = table_.row(r).sum();
    if (std::abs(s - 1.0) > sum_tol) {
      throw ConfigError("channel family: channel " + std::to_string(r) + " sums to " + std::to_string(s));
    }
  }
  average_ = table_.colwise().mean().transpose();
  for (Index y = 0; y < average_.size(); ++y) {
    if (!(average_(y) > 0.0)) {
      throw ConfigError("channel family: degenerate, average channel has zero mass on symbol " + std::to_string(y));
    }
  }
}

Index ChannelFamily::tuple_index(std::span<const int> a) const {
  if (static_cast<int>(a.size()) != p_) throw ConfigError("label tuple must have length p");
  Index r = 0;
  for (int v : a) {
    if (v < 0 || v >= k_) throw ConfigError("label out of range");
    r = r * k_ + v;
  }
  return r;
}

std::vector<int> ChannelFamily::tuple(Index a) const {
  std::vector<int> out(p_);
  for (int i = p_ - 1; i >= 0; --i) {
    out[i] = static_cast<int>(a % k_);
    a /= k_;
  }
  return out;
}

Eigen::VectorXd average_channel(const ChannelFamily& fam) { return fam.average(); }

Eigen::VectorXd centered_channel(const ChannelFamily& fam, std::span<const int> a) {
  return fam.channel(a) - fam.average();
}

ModelAudit audit(const ChannelFamily& fam, double tol, double budget) {
  ModelAudit out;
  const Eigen::MatrixXd centered = fam.table().rowwise() - fam.average().transpose();
  out.nontrivial = centered.cwiseAbs().maxCoeff() > tol;

  const double cost = static_cast<double>(fam.tuples()) * static_cast<double>(fam.tuples()) * factorial(fam.p());
  out.cost_warning = cost > budget;

  const auto maps = permutation_maps(fam);
  // Gram matrix of likelihood ratios in L2(mu_avg).
  const Eigen::MatrixXd scaled = fam.table() * fam.average().cwiseInverse().asDiagonal();
  const Eigen::MatrixXd gram = scaled * fam.table().transpose();

  double weak = 0.0;
  double strong = 0.0;
  for (const auto& m : maps) {
    for (Index a = 0; a < fam.tuples(); ++a) {
      strong = std::max(strong, (fam.table().row(a) - fam.table().row(m[a])).cwiseAbs().maxCoeff());
      for (Index b = 0; b < fam.tuples(); ++b) {
        weak = std::max(weak, std::abs(gram(a, b) - gram(m[a], m[b])));
      }
    }
  }
  out.max_symmetry_defect = std::max(weak, strong);
  out.weakly_symmetric = weak <= tol;
  out.strongly_symmetric = strong <= tol;
  // Strong symmetry forces the Gram identity exactly; keep the implication under rounding.
  if (out.strongly_symmetric) out.weakly_symmetric = true;
  return out;
}

Eigen::MatrixXd symmetric_sbm_matrix(int k, double alpha, double beta) {
  if (k < 1) throw ConfigError("sbm: k must be at least 1");
  Eigen::MatrixXd Q = Eigen::MatrixXd::Constant(k, k, beta);
  Q.diagonal().setConstant(alpha);
  return Q;
}

ChannelFamily build_sbm(const Eigen::MatrixXd& Q, std::int64_t n) {
  if (Q.rows() != Q.cols() || Q.rows() < 1) throw ConfigError("sbm: Q must be a nonempty square matrix");
  if (!Q.allFinite()) throw ConfigError("sbm: Q has non-finite entries");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ConfigError("sbm: Q must be symmetric");
  if (Q.minCoeff() < 0.0) throw ConfigError("sbm: Q must be nonnegative");
  if (n < 2) throw ConfigError("sbm: n must be at least 2");
  if (Q.maxCoeff() > static_cast<double>(n)) throw ConfigError("sbm: entries of Q must not exceed n");
  const Eigen::VectorXd rows = Q.rowwise().sum();
  const double lambda = rows.mean();
  if ((rows.array() - lambda).abs().maxCoeff() > 1e-10 * std::max(1.0, std::abs(lambda))) {
    throw ConfigError("sbm: the all-ones vector must be an eigenvector of Q");
  }
  const int k = static_cast<int>(Q.rows());
  Eigen::MatrixXd table(k * k, 2);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const double q = Q(a, b) / static_cast<double>(n);
      table(a * k + b, 0) = q;
      table(a * k + b, 1) = 1.0 - q;
    }
  }
  return ChannelFamily(2, k, std::move(table));
}

SymTensor<double> symmetric_hsbm_tensor(int p, int k, double alpha, double beta) {
  if (p < 2 || k < 1) throw ConfigError("hsbm: need p >= 2 and k >= 1");
  const Index size = SymTensor<double>::count(p, k);
  Eigen::VectorXd e = Eigen::VectorXd::Constant(size, beta);
  Index stride = 0;
  for (int i = 0; i < p; ++i) stride = stride * k + 1;
  for (int a = 0; a < k; ++a) e(a * stride) = alpha;
  return SymTensor<double>(p, k, std::move(e), SymTensor<double>::AssumeSymmetric{});
}

ChannelFamily build_hsbm(const SymTensor<double>& Q, std::int64_t n) {
  const int p = Q.order();
  if (p < 2) throw ConfigError("hsbm: Q must have order at least 2");
  if (n < p) throw ConfigError("hsbm: n must be at least p");
  if (!Q.entries().allFinite()) throw ConfigError("hsbm: Q has non-finite entries");
  if (symmetry_defect(Q) > 1e-12 * std::max(1.0, Q.max_abs())) throw ConfigError("hsbm: Q must be symmetric");
  if (Q.entries().minCoeff() < 0.0) throw ConfigError("hsbm: Q must be nonnegative");
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(Q.dim());
  const Eigen::VectorXd rows = contract_power(Q, ones, p - 1).entries();
  const double lambda = rows.mean();
  if ((rows.array() - lambda).abs().maxCoeff() > 1e-10 * std::max(1.0, std::abs(lambda))) {
    throw ConfigError("hsbm: Q[1,...,1,.] must be a multiple of the all-ones vector");
  }
  const double denom = static_cast<double>(binomial(static_cast<std::uint64_t>(n), p - 1));
  const int k = static_cast<int>(Q.dim());
  Eigen::MatrixXd table(Q.size(), 2);
  for (Index a = 0; a < Q.size(); ++a) {
    const double q = Q.entries()(a) / denom;
    if (q > 1.0) throw ConfigError("hsbm: Q_a / C(n, p-1) exceeds 1");
    table(a, 0) = q;
    table(a, 1) = 1.0 - q;
  }
  return ChannelFamily(p, k, std::move(table));
}

ChannelFamily build_truth_or_haar(const FiniteGroup& G, double eta, ToHMode mode) {
  require_eta(eta, "truth-or-Haar");
  const int k = G.order();
  Eigen::MatrixXd table = Eigen::MatrixXd::Constant(k * k, k, (1.0 - eta) / k);
  for (int g = 0; g < k; ++g) {
    for (int h = 0; h < k; ++h) {
      const int y = mode == ToHMode::sync ? G.mul(g, G.inverse(h)) : G.mul(g, h);
      table(g * k + h, y) += eta;
    }
  }
  return ChannelFamily(2, k, std::move(table));
}

ChannelFamily build_xor_full_reveal(int p) {
  if (p < 2) throw ConfigError("xor: p must be at least 2");
  const Index tuples = static_cast<Index>(ipow(2, p));
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(tuples, 2);
  for (Index a = 0; a < tuples; ++a) {
    // Parity of the number of -1 labels decides the product.
    table(a, std::popcount(static_cast<std::uint64_t>(a)) % 2) = 1.0;
  }
  return ChannelFamily(p, 2, std::move(table));
}

ChannelFamily build_xor_sat(int p, double eta) {
  require_eta(eta, "xor");
  if (p < 2) throw ConfigError("xor: p must be at least 2");
  const ChannelFamily full = build_xor_full_reveal(p);
  Eigen::MatrixXd table(full.tuples(), 3);
  table << eta * full.table(), Eigen::VectorXd::Constant(full.tuples(), 1.0 - eta);
  return ChannelFamily(p, 2, std::move(table));
}

ChannelFamily resample(const ChannelFamily& fam, double eta) {
  require_eta(eta, "resample");
  Eigen::MatrixXd table = (1.0 - eta) * fam.table();
  table.rowwise() += eta * fam.average().transpose();
  return ChannelFamily(fam.p(), fam.k(), std::move(table));
}

ChannelFamily censor(const ChannelFamily& fam, double eta) {
  require_eta(eta, "censor");
  if (eta == 0.0) return fam;
  if (eta == 1.0) return ChannelFamily(fam.p(), fam.k(), Eigen::MatrixXd::Ones(fam.tuples(), 1));
  Eigen::MatrixXd table(fam.tuples(), fam.ell() + 1);
  table << (1.0 - eta) * fam.table(), Eigen::VectorXd::Constant(fam.tuples(), eta);
  return ChannelFamily(fam.p(), fam.k(), std::move(table));
}

}  // namespace gsbm
