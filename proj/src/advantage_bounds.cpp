#include "gsbm/advantage_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gsbm/concentration.hpp"
#include "gsbm/errors.hpp"
#include "gsbm/multinomial.hpp"
#include "gsbm/numeric.hpp"

namespace gsbm {

namespace {

int population(std::int64_t n) {
  if (n < 1 || n > std::numeric_limits<int>::max()) throw ConfigError("n must be a positive integer");
  return static_cast<int>(n);
}

void require_degree(int D) {
  if (D < 0) throw ConfigError("D must be nonnegative");
}

Eigen::VectorXd as_vector(std::span<const int> z) {
  Eigen::VectorXd v(static_cast<Index>(z.size()));
  for (std::size_t i = 0; i < z.size(); ++i) v(static_cast<Index>(i)) = z[i];
  return v;
}

}  // namespace

double exp_truncated(double t, int D) {
  require_degree(D);
  KahanSum sum;
  double term = 1.0;
  sum.add(term);
  for (int d = 1; d <= D; ++d) {
    term *= t / d;
    sum.add(term);
  }
  const double v = sum.value();
  if (std::isnan(v) || std::isinf(v)) return std::numeric_limits<double>::infinity();
  return v;
}

std::string to_string(BoundMethod m) {
  switch (m) {
    case BoundMethod::exact_enum:
      return "exact-enum";
    case BoundMethod::monte_carlo:
      return "monte-carlo";
    case BoundMethod::corollary_relaxation:
      return "corollary-relaxation";
  }
  return "unknown";
}

ThresholdVerdict make_verdict(std::string condition, double lhs, double rhs, std::string note) {
  ThresholdVerdict v;
  v.condition = std::move(condition);
  v.lhs = lhs;
  v.rhs = rhs;
  v.satisfied = lhs < rhs;
  v.margin = rhs - lhs;
  v.note = std::move(note);
  return v;
}

double overlap_value(const SymTensor<double>& T, std::span<const int> z) {
  if (static_cast<Index>(z.size()) != T.dim()) throw ConfigError("overlap_value: z length must equal tensor dimension");
  for (int v : z) {
    if (v < 0) throw ConfigError("overlap_value: z must be nonnegative");
  }
  if (T.order() == 2) {
    const Eigen::VectorXd v = as_vector(z);
    const Eigen::Map<const Eigen::MatrixXd> M(T.entries().data(), T.dim(), T.dim());
    return v.dot(M * v);
  }
  return full_contract(T, as_vector(z));
}

BoundReport bound_exact(const SymTensor<double>& T, std::int64_t n, int D, const EnumOptions& opts) {
  require_degree(D);
  BoundReport r;
  r.n = n;
  r.D = D;
  r.method = BoundMethod::exact_enum;
  // exp^{<=D} of a zero overlap is 1 for every z.
  if (D == 0 || T.max_abs() == 0.0) return r;
  r.value = multinomial_expectation(
      population(n), static_cast<int>(T.dim()),
      [&](std::span<const int> z) { return exp_truncated(overlap_value(T, z), D); }, opts.budget);
  r.overflow = std::isinf(r.value);
  return r;
}

BoundReport bound_exact(const ChannelFamily& fam, std::int64_t n, int D, const EnumOptions& opts) {
  return bound_exact(characteristic_tensor(fam), n, D, opts);
}

BoundReport bound_mc(const SymTensor<double>& T, std::int64_t n, int D, std::int64_t samples, std::uint64_t seed) {
  require_degree(D);
  const int nn = population(n);
  const auto d = static_cast<std::size_t>(T.dim());
  const MeanEstimate e = monte_carlo_mean(samples, seed, streams::kMultinomial, [&](CounterRng& rng) {
    std::vector<int> z(d);
    draw_multinomial(rng, nn, z);
    return exp_truncated(overlap_value(T, z), D);
  });
  BoundReport r;
  r.n = n;
  r.D = D;
  r.method = BoundMethod::monte_carlo;
  r.value = e.mean;
  r.mc_stderr = e.std_error;
  r.samples = samples;
  r.seed = seed;
  r.overflow = std::isinf(r.value);
  return r;
}

BoundReport bound_mc(const ChannelFamily& fam, std::int64_t n, int D, std::int64_t samples, std::uint64_t seed) {
  return bound_mc(characteristic_tensor(fam), n, D, samples, seed);
}

double corollary_argument(const MarginalProfile& profile, std::int64_t n, std::span<const int> z, CorollaryForm form) {
  if (profile.trivial()) return 0.0;
  const int p = profile.p;
  const double nn = static_cast<double>(n);
  const double d = static_cast<double>(profile.k) * profile.k;
  double sq = 0.0;
  for (int v : z) sq += (v - nn / d) * (v - nn / d);
  const double zbar = std::sqrt(sq);
  const double X = d / nn * sq;
  KahanSum sum;
  for (int j = *profile.marginal_order; j <= p; ++j) {
    const double c = std::exp(log_binomial(p, j));
    if (form == CorollaryForm::zbar) {
      sum.add(c * profile.norm(j) * std::pow(nn, p - j) * std::pow(zbar, j));
    } else {
      sum.add(c * profile.norm(j) * std::pow(nn, p - j / 2.0) * std::pow(X, j / 2.0) / std::pow(profile.k, j));
    }
  }
  return sum.value();
}

BoundReport bound_corollary(const MarginalProfile& profile, std::int64_t n, int D, const CorollaryOptions& opts) {
  require_degree(D);
  BoundReport r;
  r.n = n;
  r.D = D;
  r.method = BoundMethod::corollary_relaxation;
  if (profile.trivial()) return r;
  r.norm_lower_bound = profile.any_lower_bound();
  const int nn = population(n);
  const int d = profile.k * profile.k;
  auto f = [&](std::span<const int> z) { return exp_truncated(corollary_argument(profile, n, z, opts.form), D); };
  if (composition_count(nn, d) <= opts.budget) {
    r.value = multinomial_expectation(nn, d, f, opts.budget);
  } else {
    const MeanEstimate e = monte_carlo_mean(opts.samples, opts.seed, streams::kMultinomial, [&](CounterRng& rng) {
      std::vector<int> z(static_cast<std::size_t>(d));
      draw_multinomial(rng, nn, z);
      return f(z);
    });
    r.value = e.mean;
    r.mc_stderr = e.std_error;
    r.samples = opts.samples;
    r.seed = opts.seed;
    r.enumerated = false;
  }
  r.overflow = std::isinf(r.value);
  return r;
}

ThresholdVerdict check_theorem_p3(const MarginalProfile& profile, std::int64_t n, int D, double c) {
  if (profile.trivial() || *profile.marginal_order < 2) {
    throw UnsupportedRegime("marginal order condition requires p* >= 2");
  }
  if (n < 1) throw ConfigError("n must be positive");
  if (D < 1) throw ConfigError("D must be at least 1");
  if (!(c > 0.0)) throw ConfigError("c must be positive");
  if (static_cast<double>(D) > c * static_cast<double>(n)) throw UnsupportedRegime("D must not exceed c n");
  const int p = profile.p;
  const int ps = *profile.marginal_order;
  double lhs = 0.0;
  for (int j = ps; j <= p; ++j) lhs = std::max(lhs, profile.norm(j));
  const double nn = static_cast<double>(n);
  const double rhs = c * std::pow(nn, -(2.0 * p - ps) / 2.0) * std::pow(static_cast<double>(D), -(ps - 2.0) / 2.0);
  std::string note = "relative to the supplied constant c";
  if (profile.any_lower_bound()) note += "; lhs uses power-method lower bounds";
  return make_verdict("marginal_order_condition", lhs, rhs, note);
}

P2Verdict check_theorem_p2(const MarginalProfile& profile, std::int64_t n, double epsilon, double C) {
  if (profile.trivial() || *profile.marginal_order != 2) {
    throw UnsupportedRegime("order-2 condition requires marginal order exactly 2");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  if (n < 1) throw ConfigError("n must be positive");
  const int p = profile.p;
  const double k2 = static_cast<double>(profile.k) * profile.k;
  const double npow = std::pow(static_cast<double>(n), p - 1);
  const double pp = static_cast<double>(p) * (p - 1);
  P2Verdict out;
  const double t2 = profile.norm(2);
  out.sharp = make_verdict("order2_sharp", t2, (1.0 - epsilon) * k2 / pp / npow,
                           "finite-n check of an asymptotic condition; advisory");
  out.leading_order = make_verdict("order2_leading_order", t2 * npow * pp / k2, 1.0 - epsilon,
                                   "leading-order ratio ||T^(2)|| n^{p-1} p(p-1)/k^2");
  out.satisfied = out.sharp.satisfied;
  for (int j = 3; j <= p; ++j) {
    std::string note = "crude condition on order " + std::to_string(j);
    if (profile.norms[j].lower_bound) note += "; lhs is a power-method lower bound";
    out.crude.push_back(make_verdict("order2_crude_j" + std::to_string(j), profile.norm(j), C / npow, note));
    out.satisfied = out.satisfied && out.crude.back().satisfied;
  }
  return out;
}

namespace {

ThresholdVerdict ks_from_matrix(const Eigen::MatrixXd& A, double rhs_scale, const std::string& name) {
  const Index k = A.rows();
  const Eigen::VectorXd rows = A.rowwise().sum();
  const double lambda1 = rows.mean();
  if ((rows.array() - lambda1).abs().maxCoeff() > 1e-10 * std::max(1.0, std::abs(lambda1))) {
    throw ConfigError(name + ": the all-ones vector must be an eigenvector");
  }
  const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(k, k) - Eigen::MatrixXd::Constant(k, k, 1.0 / k);
  const Eigen::MatrixXd B = P * A * P;
  const double top = k > 1 ? Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (B + B.transpose()),
                                                                            Eigen::EigenvaluesOnly)
                                 .eigenvalues()
                                 .cwiseAbs()
                                 .maxCoeff()
                           : 0.0;
  return make_verdict(name, top * top, rhs_scale * lambda1);
}

}  // namespace

ThresholdVerdict ks_threshold_sbm(const Eigen::MatrixXd& Q) {
  if (Q.rows() != Q.cols() || Q.rows() < 1) throw ConfigError("ks: Q must be square");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ConfigError("ks: Q must be symmetric");
  if (Q.minCoeff() < 0.0) throw ConfigError("ks: Q must be nonnegative");
  return ks_from_matrix(Q, static_cast<double>(Q.rows()), "kesten_stigum_sbm");
}

ThresholdVerdict ks_threshold_hsbm(const SymTensor<double>& Q) {
  const int p = Q.order();
  if (p < 2) throw ConfigError("ks: Q must have order at least 2");
  if (symmetry_defect(Q) > 1e-12 * std::max(1.0, Q.max_abs())) throw ConfigError("ks: Q must be symmetric");
  if (Q.entries().minCoeff() < 0.0) throw ConfigError("ks: Q must be nonnegative");
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(Q.dim());
  const SymTensor<double> A = contract_power(Q, ones, p - 2);
  const Eigen::Map<const Eigen::MatrixXd> mat(A.entries().data(), Q.dim(), Q.dim());
  const double k = static_cast<double>(Q.dim());
  return ks_from_matrix(mat, std::pow(k, p - 1) / (p - 1), "kesten_stigum_hsbm");
}

MultifreqResult multifreq_advantage(int k, double lambda, std::int64_t n, int D, const MultifreqOptions& opts) {
  if (k < 2) throw ConfigError("multifreq: k must be at least 2");
  if (!(lambda >= 0.0)) throw ConfigError("multifreq: lambda must be nonnegative");
  require_degree(D);
  const int nn = population(n);
  MultifreqResult out;
  if (lambda == 0.0 || D == 0) return out;
  const double half = lambda * lambda / 2.0;
  const PearsonSpec spec{nn, k};
  if (!opts.force_mc && composition_count(nn, k) <= opts.budget) {
    const auto moments = pearson_moments_exact(spec, D, opts.budget);
    KahanSum sum;
    double coeff = 1.0;
    for (int d = 0; d <= D; ++d) {
      if (d > 0) coeff *= half / d;
      sum.add(coeff * moments[d]);
    }
    out.value = sum.value();
    return out;
  }
  const MeanEstimate e = monte_carlo_mean(opts.samples, opts.seed, streams::kPearson, [&](CounterRng& rng) {
    return exp_truncated(half * sample_pearson(spec, rng), D);
  });
  out.value = e.mean;
  out.mc_stderr = e.std_error;
  out.enumerated = false;
  return out;
}

}  // namespace gsbm
