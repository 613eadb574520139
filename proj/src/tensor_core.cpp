#include "gsbm/tensor_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gsbm/errors.hpp"
#include "gsbm/numeric.hpp"
#include "gsbm/parallel.hpp"
#include "gsbm/rng.hpp"

namespace gsbm {

namespace {

using Vec = Eigen::VectorXd;

Vec gaussian_unit(int dim, std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed, streams::kPowerMethod, index);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) {
    const double u1 = 1.0 - rng.uniform();
    const double u2 = rng.uniform();
    v(i) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  return v / v.norm();
}

struct PowerRun {
  double value = -std::numeric_limits<double>::infinity();
  Vec x;
  bool converged = false;
};

// Adaptive shifted symmetric power iteration maximizing <T, x^m> on the sphere.
// The shift keeps the iteration map monotone: alpha makes the shifted objective
// locally convex at x.
PowerRun power_iterate(const SymTensor<double>& T, Vec x, int iters, double tol) {
  const int m = T.order();
  const double tau = 1e-6 * std::max(1e-300, T.max_abs());
  PowerRun run;
  double lambda = full_contract(T, x);
  for (int it = 0; it < iters; ++it) {
    const SymTensor<double> M = contract_power(T, x, m - 2);
    const Eigen::Map<const Eigen::MatrixXd> mat(M.entries().data(), T.dim(), T.dim());
    const double lam_min = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(mat, Eigen::EigenvaluesOnly)
                               .eigenvalues()
                               .minCoeff();
    const double alpha = std::max(0.0, tau - (m - 1) * lam_min);
    Vec y = mat * x + alpha * x;
    const double ny = y.norm();
    if (!(ny > 0.0)) break;
    y /= ny;
    const double next = full_contract(T, y);
    const double step = (y - x).norm();
    x = std::move(y);
    const bool small = std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next)) && step <= std::sqrt(tol);
    lambda = next;
    if (small) {
      run.converged = true;
      break;
    }
  }
  run.value = lambda;
  run.x = std::move(x);
  return run;
}

std::optional<InjectiveNorm> rank_one_norm(const SymTensor<double>& T, double tol) {
  const double scale = T.max_abs();
  const int d = static_cast<int>(T.dim());
  InjectiveNorm out;
  out.method = NormMethod::rank_one_exact;
  if (scale == 0.0) {
    out.witness = Vec::Unit(d, 0);
    return out;
  }
  const auto U = T.unfolding();
  Index col = 0;
  U.colwise().norm().maxCoeff(&col);
  Vec u = U.col(col);
  u /= u.norm();
  const double s = full_contract(T, u);
  const SymTensor<double> fit = SymTensor<double>::rank_one(u, T.order(), s);
  const double residual = (T.entries() - fit.entries()).cwiseAbs().maxCoeff();
  if (residual > std::max(tol, 1e-12) * scale) return std::nullopt;
  out.value = std::abs(s);
  out.signed_value = s;
  out.witness = u;
  return out;
}

InjectiveNorm power_norm(const SymTensor<double>& T, const InjectiveNormOptions& opts) {
  const int d = static_cast<int>(T.dim());
  std::vector<Vec> starts;
  // Dominant left singular vector of the unfolding is a good deterministic start.
  const Eigen::MatrixXd U = T.unfolding();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram(U * U.transpose());
  starts.push_back(gram.eigenvectors().col(d - 1));
  for (int r = 0; r < opts.restarts; ++r) starts.push_back(gaussian_unit(d, opts.seed, static_cast<std::uint64_t>(r)));

  const SymTensor<double> neg = -1.0 * T;
  std::vector<PowerRun> plus(starts.size()), minus(starts.size());
  parallel_chunks(starts.size(), [&](std::size_t i) {
    plus[i] = power_iterate(T, starts[i], opts.iters, opts.tol);
    minus[i] = power_iterate(neg, starts[i], opts.iters, opts.tol);
  });

  InjectiveNorm out;
  out.method = NormMethod::power_multistart;
  out.lower_bound = true;
  out.value = -1.0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    for (int sign : {1, -1}) {
      const PowerRun& run = sign > 0 ? plus[i] : minus[i];
      if (run.value > out.value) {
        out.value = run.value;
        out.witness = run.x;
        out.signed_value = sign * run.value;
        out.converged = run.converged;
      }
    }
  }
  out.value = std::max(out.value, 0.0);
  return out;
}

}  // namespace

std::string to_string(NormMethod m) {
  switch (m) {
    case NormMethod::exact_spectral:
      return "exact-spectral";
    case NormMethod::rank_one_exact:
      return "rank-one-exact";
    case NormMethod::power_multistart:
      return "power-multistart";
  }
  return "unknown";
}

CharacteristicTensor characteristic_tensor_checked(const ChannelFamily& fam) {
  const int p = fam.p();
  const int k = fam.k();
  const Eigen::MatrixXd centered = fam.table().rowwise() - fam.average().transpose();
  const Eigen::MatrixXd gram = centered * fam.average().cwiseInverse().asDiagonal() * centered.transpose();
  const double inv_pfact = 1.0 / factorial(p);

  const Index d = static_cast<Index>(k) * k;
  const Index size = SymTensor<double>::count(p, d);
  Vec raw(size);
  std::vector<Index> idx(p);
  const SymTensor<double> shape(p, d);
  for (Index flat = 0; flat < size; ++flat) {
    shape.unravel(flat, idx);
    Index a = 0, b = 0;
    for (int i = 0; i < p; ++i) {
      a = a * k + idx[i] / k;
      b = b * k + idx[i] % k;
    }
    raw(flat) = gram(a, b) * inv_pfact;
  }
  auto [tensor, defect] = symmetrize<double>(p, d, raw);
  return {std::move(tensor), defect};
}

SymTensor<double> characteristic_tensor(const ChannelFamily& fam) { return characteristic_tensor_checked(fam).tensor; }

Eigen::MatrixXd pair_flattening(const SymTensor<double>& T, int k) {
  const int p = T.order();
  if (T.dim() != static_cast<Index>(k) * k) throw ConfigError("pair_flattening: tensor dimension must be k^2");
  const Index kp = static_cast<Index>(ipow(k, p));
  Eigen::MatrixXd G(kp, kp);
  std::vector<Index> idx(p);
  const double pfact = factorial(p);
  for (Index a = 0; a < kp; ++a) {
    for (Index b = 0; b < kp; ++b) {
      Index ra = a, rb = b;
      for (int i = p - 1; i >= 0; --i) {
        idx[i] = (ra % k) * k + rb % k;
        ra /= k;
        rb /= k;
      }
      G(a, b) = pfact * T(std::span<const Index>(idx));
    }
  }
  return G;
}

InjectiveNorm injective_norm(const SymTensor<double>& T, const InjectiveNormOptions& opts) {
  const int m = T.order();
  const int d = static_cast<int>(T.dim());
  if (m == 0) {
    InjectiveNorm out;
    out.method = NormMethod::rank_one_exact;
    out.value = std::abs(T.value());
    out.signed_value = T.value();
    return out;
  }
  if (m == 1) {
    InjectiveNorm out;
    out.method = NormMethod::rank_one_exact;
    out.value = T.entries().norm();
    out.signed_value = out.value;
    out.witness = out.value > 0.0 ? Vec(T.entries() / out.value) : Vec(Vec::Unit(d, 0));
    return out;
  }
  if (!opts.force_power) {
    if (m == 2) {
      const Eigen::Map<const Eigen::MatrixXd> mat(T.entries().data(), d, d);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat);
      Index i_max = 0, i_min = 0;
      const double top = es.eigenvalues().maxCoeff(&i_max);
      const double bottom = es.eigenvalues().minCoeff(&i_min);
      const Index pick = std::abs(top) >= std::abs(bottom) ? i_max : i_min;
      InjectiveNorm out;
      out.method = NormMethod::exact_spectral;
      out.signed_value = es.eigenvalues()(pick);
      out.value = std::abs(out.signed_value);
      out.witness = es.eigenvectors().col(pick);
      return out;
    }
    if (auto r1 = rank_one_norm(T, opts.tol)) return *r1;
  }
  return power_norm(T, opts);
}

bool MarginalProfile::any_lower_bound() const {
  if (!marginal_order) return false;
  for (int j = *marginal_order; j <= p; ++j) {
    if (norms[j].lower_bound) return true;
  }
  return false;
}

SymTensor<double> marginalize(const SymTensor<double>& Tj) {
  const Vec ones = Vec::Ones(Tj.dim());
  const SymTensor<double> c = contract_leading(Tj, ones);
  return (1.0 / static_cast<double>(Tj.dim())) * c;
}

MarginalProfile marginal_profile(const SymTensor<double>& T, int k, double zero_tol, const InjectiveNormOptions& opts) {
  if (!(zero_tol > 0.0)) throw ConfigError("marginal_profile: zero_tol must be positive");
  if (T.dim() != static_cast<Index>(k) * k) throw ConfigError("marginal_profile: tensor dimension must be k^2");
  MarginalProfile out;
  out.p = T.order();
  out.k = k;
  out.zero_tol = zero_tol;
  out.tensors.resize(out.p + 1);
  out.tensors[out.p] = T;
  for (int j = out.p; j >= 1; --j) out.tensors[j - 1] = marginalize(out.tensors[j]);
  out.norms.resize(out.p + 1);
  for (int j = 0; j <= out.p; ++j) out.norms[j] = injective_norm(out.tensors[j], opts);
  if (T.max_abs() > zero_tol) {
    for (int j = 1; j <= out.p; ++j) {
      if (out.tensors[j].max_abs() > zero_tol) {
        out.marginal_order = j;
        break;
      }
    }
  }
  return out;
}

MarginalProfile marginal_profile(const ChannelFamily& fam, double zero_tol, const InjectiveNormOptions& opts) {
  auto ct = characteristic_tensor_checked(fam);
  MarginalProfile out = marginal_profile(ct.tensor, fam.k(), zero_tol, opts);
  out.symmetry_defect = ct.symmetry_defect;
  const double t0 = std::abs(out.tensors[0].value());
  if (t0 > 1e-10 * std::max(1.0, ct.tensor.max_abs())) {
    throw VerificationFailure("marginal_profile: T^(0) = " + std::to_string(t0) + " is not zero");
  }
  return out;
}

}  // namespace gsbm
