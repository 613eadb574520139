#include "gsbm/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gsbm/advantage_bounds.hpp"
#include "gsbm/errors.hpp"
#include "gsbm/multinomial.hpp"
#include "gsbm/numeric.hpp"
#include "gsbm/parallel.hpp"

namespace gsbm {

namespace {

void require_unit_open(double x, const char* name) {
  if (!(x > 0.0 && x < 1.0)) throw ConfigError(std::string(name) + " must lie in (0, 1)");
}

double log_net_size(int d, double epsilon) { return d * std::log1p(2.0 / epsilon); }

double log_add(double a, double b) {
  const double m = std::max(a, b);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

template <typename Draw>
std::vector<double> draw_all(std::int64_t samples, std::uint64_t seed, std::uint64_t stream, Draw&& draw) {
  if (samples < 1) throw ConfigError("samples must be at least 1");
  std::vector<double> xs(static_cast<std::size_t>(samples));
  constexpr std::int64_t kChunk = 8192;
  const auto chunks = static_cast<std::size_t>((samples + kChunk - 1) / kChunk);
  parallel_chunks(chunks, [&](std::size_t c) {
    const std::int64_t begin = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t end = std::min(samples, begin + kChunk);
    for (std::int64_t i = begin; i < end; ++i) {
      CounterRng rng(seed, stream, static_cast<std::uint64_t>(i));
      xs[static_cast<std::size_t>(i)] = draw(rng);
    }
  });
  return xs;
}

// Fraction of sorted values >= t.
double tail_fraction(const std::vector<double>& sorted, double t) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
  return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

}  // namespace

void validate(const PearsonSpec& spec) {
  if (spec.n < 1 || spec.d < 1) throw ConfigError("Pearson spec needs n >= 1 and d >= 1");
}

double log_vector_bernstein_bound(int n, int d, double sigma2, double M, double t, double epsilon) {
  require_unit_open(epsilon, "epsilon");
  if (n < 1 || d < 1) throw ConfigError("Bernstein: need n >= 1 and d >= 1");
  if (!(sigma2 >= 0.0) || !(M > 0.0) || !(t >= 0.0)) throw ConfigError("Bernstein: need sigma2 >= 0, M > 0, t >= 0");
  const double net = log_net_size(d, epsilon);
  if (t == 0.0) return net;
  const double e = 1.0 - epsilon;
  const double denom = 2.0 * sigma2 * n / (e * e) + (2.0 / 3.0) * M * t / e;
  return net - t * t / denom;
}

double vector_bernstein_bound(int n, int d, double sigma2, double M, double t, double epsilon) {
  return std::exp(log_vector_bernstein_bound(n, d, sigma2, M, t, epsilon));
}

double log_pearson_tail_bound(const PearsonSpec& spec, double t, double epsilon) {
  validate(spec);
  require_unit_open(epsilon, "epsilon");
  if (!(t >= 0.0)) throw ConfigError("Pearson tail: t must be nonnegative");
  const double e = 1.0 - epsilon;
  const double correction = 1.0 + (e / 3.0) * std::sqrt((spec.d - 1.0) / spec.n) * std::sqrt(t);
  return log_net_size(spec.d, epsilon) - 0.5 * e * e * t / correction;
}

double pearson_tail_bound(const PearsonSpec& spec, double t, double epsilon) {
  return std::exp(log_pearson_tail_bound(spec, t, epsilon));
}

double log_pearson_moment_bound(const PearsonSpec& spec, int r, double delta, double epsilon) {
  validate(spec);
  require_unit_open(delta, "delta");
  require_unit_open(epsilon, "epsilon");
  if (r < 1) throw ConfigError("moment bound: r must be at least 1");
  const double e2 = (1.0 - epsilon) * (1.0 - epsilon);
  const double first = r * std::log((1.0 + std::sqrt(delta * spec.d)) / e2) + r * std::numbers::ln2 + std::lgamma(r);
  const double second =
      r * std::log((4.0 / delta + 4.0 * spec.d) / e2) + std::lgamma(2.0 * r) - r * std::log(static_cast<double>(spec.n));
  return std::log(2.0 * r) + log_net_size(spec.d, epsilon) + log_add(first, second);
}

double pearson_moment_bound(const PearsonSpec& spec, int r, double delta, double epsilon) {
  return std::exp(log_pearson_moment_bound(spec, r, delta, epsilon));
}

double pearson_statistic(std::span<const int> z, int n) {
  const double d = static_cast<double>(z.size());
  const double mean = n / d;
  double sq = 0.0;
  for (int v : z) sq += (v - mean) * (v - mean);
  return d / n * sq;
}

std::vector<double> pearson_moments_exact(const PearsonSpec& spec, int r_max, double budget) {
  validate(spec);
  if (r_max < 0) throw ConfigError("moments: r must be nonnegative");
  if (composition_count(spec.n, spec.d) > budget) {
    throw BudgetExceeded("Pearson moments: support too large for exact enumeration");
  }
  std::vector<SignedLogAccumulator> acc(static_cast<std::size_t>(r_max) + 1);
  for_each_composition(spec.n, spec.d, [&](std::span<const int> z, double lw) {
    const double x = pearson_statistic(z, spec.n);
    acc[0].add(lw, 1);
    if (x <= 0.0) return;
    const double lx = std::log(x);
    for (int r = 1; r <= r_max; ++r) acc[r].add(lw + r * lx, 1);
  });
  std::vector<double> out;
  out.reserve(acc.size());
  for (const auto& a : acc) out.push_back(a.value());
  return out;
}

double pearson_moment_exact(const PearsonSpec& spec, int r, double budget) {
  return pearson_moments_exact(spec, r, budget).back();
}

double sample_pearson(const PearsonSpec& spec, CounterRng& rng) {
  std::vector<int> z(static_cast<std::size_t>(spec.d));
  draw_multinomial(rng, spec.n, z);
  return pearson_statistic(z, spec.n);
}

MomentFit simple_moment_bound_fit(const std::vector<PearsonSpec>& specs, double epsilon, int r_max, double C_max) {
  if (!(epsilon > 0.0)) throw ConfigError("moment fit: epsilon must be positive");
  MomentFit fit;
  fit.gamma = 0.1;
  constexpr double kStep = 0.01;
  // Required log C per constraint: (log E X^r - 1.5 log r - r log((2+eps) r / e)) / d.
  double need = -std::numeric_limits<double>::infinity();
  for (const auto& spec : specs) {
    validate(spec);
    const int r_hi = std::min(r_max, static_cast<int>(std::floor(fit.gamma * spec.n)));
    if (r_hi < 1) continue;
    const auto m = pearson_moments_exact(spec, r_hi);
    for (int r = 1; r <= r_hi; ++r) {
      ++fit.constraints;
      if (m[r] <= 0.0) continue;
      const double lr = std::log(static_cast<double>(r));
      const double req = (std::log(m[r]) - 1.5 * lr - r * (std::log((2.0 + epsilon) * r) - 1.0)) / spec.d;
      need = std::max(need, req);
    }
  }
  double C = kStep;
  if (need > -std::numeric_limits<double>::infinity()) {
    C = std::max(kStep, std::ceil(std::exp(need) / kStep - 1e-9) * kStep);
    // Rounding may leave the grid point a hair short.
    while (std::log(C) < need) C += kStep;
  }
  fit.C = C;
  fit.ok = C <= C_max;
  return fit;
}

OverlapLemmaReport check_overlap_lemma(const std::function<double(CounterRng&)>& sampler,
                                       const OverlapLemmaParams& params) {
  if (params.D < 1) throw ConfigError("overlap lemma: D must be at least 1");
  if (!(params.A >= 0.0)) throw ConfigError("overlap lemma: A must be nonnegative");
  if (params.grid_points < 2) throw ConfigError("overlap lemma: need at least 2 grid points");
  OverlapLemmaReport rep;
  if (params.r_sup) {
    const double D = params.D;
    const double lg = *params.r_sup > 0.0 ? std::log(*params.r_sup / D) : -std::numeric_limits<double>::infinity();
    rep.condition1 = params.A >= D * std::max(2.0, lg);
  }
  auto xs = draw_all(params.samples, params.seed, streams::kOverlap, [&](CounterRng& rng) { return sampler(rng); });
  RunningMoments m;
  for (double x : xs) m.add(exp_truncated(x, params.D));
  const auto est = m.estimate();
  rep.mean_exp_truncated = est.mean;
  rep.mean_exp_truncated_stderr = est.std_error;
  std::sort(xs.begin(), xs.end());
  for (int i = 0; i < params.grid_points; ++i) {
    const double t = params.A * i / (params.grid_points - 1);
    const double emp = tail_fraction(xs, t);
    const double env = params.C * std::exp(-(1.0 + params.decay) * t);
    rep.t_grid.push_back(t);
    rep.empirical_tail.push_back(emp);
    rep.envelope.push_back(env);
    if (env > 0.0) rep.worst_ratio = std::max(rep.worst_ratio, emp / env);
    if (emp > env && rep.condition2) {
      rep.condition2 = false;
      rep.first_violation_t = t;
    }
  }
  return rep;
}

bool factorial_lower_bound_holds(int d) {
  if (d < 1) throw ConfigError("factorial bound: d must be positive");
  return log_factorial(d) >= d * (std::log(static_cast<double>(d)) - 1.0);
}

std::vector<TailRow> pearson_tail_table(const PearsonSpec& spec, double epsilon, const std::vector<double>& t_grid,
                                        std::int64_t samples, std::uint64_t seed, double* max_sample) {
  validate(spec);
  auto xs = draw_all(samples, seed, streams::kPearson, [&](CounterRng& rng) { return sample_pearson(spec, rng); });
  std::sort(xs.begin(), xs.end());
  if (max_sample) *max_sample = xs.back();
  std::vector<TailRow> rows;
  for (double t : t_grid) rows.push_back({t, tail_fraction(xs, t), pearson_tail_bound(spec, t, epsilon)});
  return rows;
}

std::vector<TailRow> bernstein_tail_table(int n, int d, double epsilon, const std::vector<double>& t_grid,
                                          std::int64_t samples, std::uint64_t seed) {
  if (n < 1 || d < 1) throw ConfigError("Bernstein table: need n >= 1 and d >= 1");
  auto xs = draw_all(samples, seed, streams::kBernstein, [&](CounterRng& rng) {
    std::vector<double> s(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < n; ++i) {
      const auto axis = rng.below(static_cast<std::uint64_t>(d));
      s[axis] += rng.below(2) ? 1.0 : -1.0;
    }
    double sq = 0.0;
    for (double v : s) sq += v * v;
    return std::sqrt(sq);
  });
  std::sort(xs.begin(), xs.end());
  std::vector<TailRow> rows;
  for (double t : t_grid) rows.push_back({t, tail_fraction(xs, t), vector_bernstein_bound(n, d, 1.0 / d, 1.0, t, epsilon)});
  return rows;
}

}  // namespace gsbm
