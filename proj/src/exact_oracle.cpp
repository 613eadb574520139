#include "gsbm/exact_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "gsbm/advantage_bounds.hpp"
#include "gsbm/errors.hpp"
#include "gsbm/numeric.hpp"

namespace gsbm {

namespace {

std::vector<std::vector<int>> lex_subsets(int n, int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> s(p);
  for (int i = 0; i < p; ++i) s[i] = i;
  while (true) {
    out.push_back(s);
    int i = p - 1;
    while (i >= 0 && s[i] == n - p + i) --i;
    if (i < 0) break;
    ++s[i];
    for (int j = i + 1; j < p; ++j) s[j] = s[j - 1] + 1;
  }
  return out;
}

std::vector<int> decode_base(std::int64_t v, int base, int len) {
  std::vector<int> out(len);
  for (int i = len - 1; i >= 0; --i) {
    out[i] = static_cast<int>(v % base);
    v /= base;
  }
  return out;
}

// Row index of the channel for the labels of x on the index tuple idx.
Index channel_row(const ChannelFamily& fam, std::span<const int> x, std::span<const int> idx) {
  Index r = 0;
  for (int i : idx) r = r * fam.k() + x[i];
  return r;
}

// R(a, b) = E_{mu_avg}[(dmu_a/dmu_avg - 1)(dmu_b/dmu_avg - 1)] for all tuple pairs.
Eigen::MatrixXd overlap_kernel(const ChannelFamily& fam) {
  const Index m = fam.tuples();
  Eigen::MatrixXd R(m, m);
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b < m; ++b) {
      KahanSum s;
      for (int y = 0; y < fam.ell(); ++y) {
        const double w = fam.average()(y);
        s.add(w * (fam.table()(a, y) / w - 1.0) * (fam.table()(b, y) / w - 1.0));
      }
      R(a, b) = s.value();
    }
  }
  return R;
}

double overlap_with_kernel(const TinyInstance& inst, const Eigen::MatrixXd& R, std::span<const int> x1,
                           std::span<const int> x2, bool distinct_only) {
  const int p = inst.fam.p();
  KahanSum sum;
  if (distinct_only) {
    for (const auto& S : inst.subsets) sum.add(R(channel_row(inst.fam, x1, S), channel_row(inst.fam, x2, S)));
    return sum.value();
  }
  const auto tuples = static_cast<std::int64_t>(ipow(inst.n, p));
  for (std::int64_t t = 0; t < tuples; ++t) {
    const auto idx = decode_base(t, inst.n, p);
    sum.add(R(channel_row(inst.fam, x1, idx), channel_row(inst.fam, x2, idx)));
  }
  return sum.value() / factorial(p);
}

}  // namespace

TinyInstance::TinyInstance(ChannelFamily family, int population, double state_budget)
    : fam(std::move(family)), n(population) {
  if (n < fam.p()) throw ConfigError("tiny instance: n must be at least p");
  subsets = lex_subsets(n, fam.p());
  N = static_cast<int>(subsets.size());
  const double states = std::pow(static_cast<double>(fam.ell()), N);
  const double labels = std::pow(static_cast<double>(fam.k()), 2.0 * n);
  if (states > state_budget) {
    throw BudgetExceeded("tiny instance: ell^N = " + std::to_string(states) + " exceeds the state budget");
  }
  if (labels > state_budget) {
    throw BudgetExceeded("tiny instance: k^{2n} = " + std::to_string(labels) + " exceeds the state budget");
  }
  states_ = static_cast<std::int64_t>(ipow(fam.ell(), N));
  labellings_ = static_cast<std::int64_t>(ipow(fam.k(), n));
}

std::vector<int> TinyInstance::decode(std::int64_t s) const { return decode_base(s, fam.ell(), N); }

std::int64_t TinyInstance::encode(std::span<const int> y) const {
  if (static_cast<int>(y.size()) != N) throw ConfigError("observation vector must have length N");
  std::int64_t s = 0;
  for (int v : y) {
    if (v < 0 || v >= fam.ell()) throw ConfigError("observation symbol out of range");
    s = s * fam.ell() + v;
  }
  return s;
}

double likelihood_ratio(const TinyInstance& inst, std::span<const int> y) {
  inst.encode(y);
  const auto& fam = inst.fam;
  KahanSum sum;
  for (std::int64_t xi = 0; xi < inst.labellings(); ++xi) {
    const auto x = decode_base(xi, fam.k(), inst.n);
    double prod = 1.0;
    for (int s = 0; s < inst.N; ++s) {
      const int sym = y[s];
      prod *= fam.table()(channel_row(fam, x, inst.subsets[s]), sym) / fam.average()(sym);
    }
    sum.add(prod);
  }
  return sum.value() / static_cast<double>(inst.labellings());
}

std::vector<double> likelihood_ratio_table(const TinyInstance& inst) {
  const auto& fam = inst.fam;
  std::vector<KahanSum> planted(static_cast<std::size_t>(inst.states()));
  std::vector<Index> rows(inst.N);
  for (std::int64_t xi = 0; xi < inst.labellings(); ++xi) {
    const auto x = decode_base(xi, fam.k(), inst.n);
    for (int s = 0; s < inst.N; ++s) rows[s] = channel_row(fam, x, inst.subsets[s]);
    for (std::int64_t yi = 0; yi < inst.states(); ++yi) {
      const auto y = inst.decode(yi);
      double prob = 1.0;
      for (int s = 0; s < inst.N; ++s) prob *= fam.table()(rows[s], y[s]);
      planted[yi].add(prob);
    }
  }
  std::vector<double> out(planted.size());
  for (std::int64_t yi = 0; yi < inst.states(); ++yi) {
    const auto y = inst.decode(yi);
    double null = 1.0;
    for (int s = 0; s < inst.N; ++s) null *= fam.average()(y[s]);
    out[yi] = planted[yi].value() / static_cast<double>(inst.labellings()) / null;
  }
  return out;
}

EfronStein::EfronStein(const TinyInstance& inst) : N_(inst.N), ell_(inst.fam.ell()), avg_(inst.fam.average()) {
  if (N_ > 24) throw BudgetExceeded("Efron-Stein: too many coordinates");
  const double tables = std::pow(1.0 + ell_, N_);
  const double work = std::pow(1.0 + 2.0 * ell_, N_);
  if (tables > 2e8 || work > 2e8) throw BudgetExceeded("Efron-Stein: decomposition too large for exact evaluation");

  const auto L = likelihood_ratio_table(inst);
  const std::uint32_t masks = 1u << N_;
  std::vector<std::vector<int>> ys(static_cast<std::size_t>(inst.states()));
  std::vector<double> qy(ys.size());
  for (std::int64_t s = 0; s < inst.states(); ++s) {
    ys[s] = inst.decode(s);
    double q = 1.0;
    for (int v : ys[s]) q *= avg_(v);
    qy[s] = q;
  }

  cond_.resize(masks);
  for (std::uint32_t S = 0; S < masks; ++S) {
    const int size = std::popcount(S);
    std::vector<KahanSum> num(static_cast<std::size_t>(ipow(ell_, size)));
    for (std::size_t s = 0; s < ys.size(); ++s) {
      std::size_t key = 0;
      for (int i = 0; i < N_; ++i) {
        if (S >> i & 1u) key = key * ell_ + ys[s][i];
      }
      num[key].add(L[s] * qy[s]);
    }
    cond_[S].resize(num.size());
    for (std::size_t key = 0; key < num.size(); ++key) {
      // Divide by the Q-marginal of y_S.
      double q = 1.0;
      std::size_t rest = key;
      for (int j = 0; j < size; ++j) {
        q *= avg_(static_cast<Index>(rest % ell_));
        rest /= ell_;
      }
      cond_[S][key] = num[key].value() / q;
    }
  }

  norm2_.assign(masks, 0.0);
  std::vector<int> y(N_, 0);
  for (std::uint32_t U = 0; U < masks; ++U) {
    std::vector<int> coords;
    for (int i = 0; i < N_; ++i) {
      if (U >> i & 1u) coords.push_back(i);
    }
    std::fill(y.begin(), y.end(), 0);
    KahanSum acc;
    while (true) {
      double w = 1.0;
      for (int c : coords) w *= avg_(y[c]);
      const double f = component(U, y);
      acc.add(w * f * f);
      // Odometer over the coordinates in U.
      int j = static_cast<int>(coords.size()) - 1;
      while (j >= 0 && y[coords[j]] == ell_ - 1) {
        y[coords[j]] = 0;
        --j;
      }
      if (j < 0) break;
      ++y[coords[j]];
    }
    norm2_[U] = acc.value();
  }
}

double EfronStein::conditional(std::uint32_t S, std::span<const int> y) const {
  std::size_t key = 0;
  for (int i = 0; i < N_; ++i) {
    if (S >> i & 1u) key = key * ell_ + y[i];
  }
  return cond_[S][key];
}

double EfronStein::component(std::uint32_t U, std::span<const int> y) const {
  KahanSum sum;
  const int size = std::popcount(U);
  // Walk all submasks S of U, including the empty set.
  for (std::uint32_t S = U;; S = (S - 1) & U) {
    const int sign = (size - std::popcount(S)) % 2 == 0 ? 1 : -1;
    sum.add(sign * conditional(S, y));
    if (S == 0) break;
  }
  return sum.value();
}

double EfronStein::cadv(int D) const {
  if (D < 0) throw ConfigError("cadv: D must be nonnegative");
  KahanSum s;
  for (std::uint32_t U = 0; U < norm2_.size(); ++U) {
    if (std::popcount(U) <= D) s.add(norm2_[U]);
  }
  return std::sqrt(s.value());
}

double cadv_exact(const TinyInstance& inst, int D) { return EfronStein(inst).cadv(D); }

double overlap_R(const TinyInstance& inst, std::span<const int> x1, std::span<const int> x2, bool distinct_only) {
  if (static_cast<int>(x1.size()) != inst.n || static_cast<int>(x2.size()) != inst.n) {
    throw ConfigError("overlap_R: labellings must have length n");
  }
  for (std::span<const int> x : {x1, x2}) {
    for (int v : x) {
      if (v < 0 || v >= inst.fam.k()) throw ConfigError("overlap_R: label out of range");
    }
  }
  return overlap_with_kernel(inst, overlap_kernel(inst.fam), x1, x2, distinct_only);
}

ChainReport verify_chain(const TinyInstance& inst, int D, const ChainOptions& opts) {
  if (D < 0) throw ConfigError("verify_chain: D must be nonnegative");
  ChainReport rep;
  rep.n = inst.n;
  rep.D = D;

  const double cadv = cadv_exact(inst, D);
  rep.cadv_squared = cadv * cadv;

  const Eigen::MatrixXd R = overlap_kernel(inst.fam);
  KahanSum er, erp;
  for (std::int64_t i1 = 0; i1 < inst.labellings(); ++i1) {
    const auto x1 = decode_base(i1, inst.fam.k(), inst.n);
    for (std::int64_t i2 = 0; i2 < inst.labellings(); ++i2) {
      const auto x2 = decode_base(i2, inst.fam.k(), inst.n);
      er.add(exp_truncated(overlap_with_kernel(inst, R, x1, x2, true), D));
      erp.add(exp_truncated(overlap_with_kernel(inst, R, x1, x2, false), D));
    }
  }
  const double pairs = static_cast<double>(inst.labellings()) * static_cast<double>(inst.labellings());
  rep.exp_R = er.value() / pairs;
  rep.exp_R_prime = erp.value() / pairs;

  const SymTensor<double> T = opts.tensor_override ? *opts.tensor_override : characteristic_tensor(inst.fam);
  rep.bound_exact = bound_exact(T, inst.n, D).value;
  const MarginalProfile profile = marginal_profile(T, inst.fam.k(), 1e-10, opts.norm_options);
  rep.bound_corollary = bound_corollary(profile, inst.n, D).value;

  auto inequality = [&](std::string name, double lhs, double rhs) {
    ChainLink l{std::move(name), lhs, rhs, rhs - lhs, rhs - lhs >= -opts.slack};
    rep.links.push_back(l);
  };
  inequality("cadv_sq <= E exp(R)", rep.cadv_squared, rep.exp_R);
  inequality("E exp(R) <= E exp(R')", rep.exp_R, rep.exp_R_prime);
  {
    const double diff = std::abs(rep.exp_R_prime - rep.bound_exact);
    ChainLink l{"E exp(R') == multinomial enumeration", rep.exp_R_prime, rep.bound_exact, -diff,
                diff <= opts.equality_tol * std::max(1.0, std::abs(rep.bound_exact))};
    rep.links.push_back(l);
  }
  inequality("multinomial enumeration <= relaxation", rep.bound_exact, rep.bound_corollary);

  for (const auto& l : rep.links) {
    if (!l.ok) {
      rep.passed = false;
      rep.violated = l.name;
      break;
    }
  }
  if (!rep.passed && opts.throw_on_failure) {
    throw VerificationFailure("inequality chain violated at link '" + rep.violated + "' (n=" + std::to_string(inst.n) +
                              ", D=" + std::to_string(D) + ")");
  }
  return rep;
}

}  // namespace gsbm
