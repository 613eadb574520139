#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gsbm/rng.hpp"

namespace gsbm {

// Pearson chi-squared statistic X = (d/n) sum_i (z_i - n/d)^2 for z ~ Mult(n, uniform over d cells).
struct PearsonSpec {
  int n = 1;
  int d = 1;
};

void validate(const PearsonSpec& spec);

// Tail bound for || sum of n i.i.d. centered vectors || >= t in R^d with
// ||Cov|| <= sigma2 and ||v|| <= M.
double log_vector_bernstein_bound(int n, int d, double sigma2, double M, double t, double epsilon);
double vector_bernstein_bound(int n, int d, double sigma2, double M, double t, double epsilon);

double log_pearson_tail_bound(const PearsonSpec& spec, double t, double epsilon);
double pearson_tail_bound(const PearsonSpec& spec, double t, double epsilon);

// Upper bound on E X^r, valid for r >= 1 and delta, epsilon in (0, 1).
double log_pearson_moment_bound(const PearsonSpec& spec, int r, double delta, double epsilon);
double pearson_moment_bound(const PearsonSpec& spec, int r, double delta, double epsilon);

// Exact E X^r by enumerating the multinomial support.
double pearson_moment_exact(const PearsonSpec& spec, int r, double budget = 1e7);
// E X^0, ..., E X^{r_max} in one enumeration.
std::vector<double> pearson_moments_exact(const PearsonSpec& spec, int r_max, double budget = 1e7);

double pearson_statistic(std::span<const int> z, int n);
double sample_pearson(const PearsonSpec& spec, CounterRng& rng);

struct MomentFit {
  double C = 0.0;
  double gamma = 0.1;
  bool ok = false;
  // Constraint pairs (spec, r) that were checked.
  int constraints = 0;
};

// Smallest C on a 0.01 grid (at most C_max) such that
// E X^r <= r^{3/2} C^d ((2 + epsilon) r / e)^r for every spec and 1 <= r <= min(r_max, gamma n).
MomentFit simple_moment_bound_fit(const std::vector<PearsonSpec>& specs, double epsilon, int r_max,
                                  double C_max = 1e6);

struct OverlapLemmaParams {
  int D = 1;
  double A = 2.0;
  // Envelope f(t) = C exp(-decay t); condition 2 asks P[R >= t] <= f(t) e^{-t}.
  double C = 1.0;
  double decay = 0.0;
  // Analytic bound on sup |R|; condition 1 is skipped without it.
  std::optional<double> r_sup;
  int grid_points = 50;
  std::int64_t samples = 100000;
  std::uint64_t seed = 0;
};

struct OverlapLemmaReport {
  std::optional<bool> condition1;
  bool condition2 = true;
  // First grid point where condition 2 failed.
  std::optional<double> first_violation_t;
  double worst_ratio = 0.0;
  double mean_exp_truncated = 0.0;
  double mean_exp_truncated_stderr = 0.0;
  std::vector<double> t_grid;
  std::vector<double> empirical_tail;
  std::vector<double> envelope;
};

// sampler(rng) draws one R; sample i receives CounterRng(seed, streams::kOverlap, i).
OverlapLemmaReport check_overlap_lemma(const std::function<double(CounterRng&)>& sampler,
                                       const OverlapLemmaParams& params);

// log d! >= d (log d - 1).
bool factorial_lower_bound_holds(int d);

struct TailRow {
  double t = 0.0;
  double empirical = 0.0;
  double bound = 0.0;
};

// Empirical P[X >= t] against the Pearson tail bound on a t grid.
std::vector<TailRow> pearson_tail_table(const PearsonSpec& spec, double epsilon, const std::vector<double>& t_grid,
                                        std::int64_t samples, std::uint64_t seed, double* max_sample = nullptr);

// Sum of n i.i.d. vectors uniform on {+e_i, -e_i}: empirical P[||S|| >= t] against the
// Bernstein bound with sigma2 = 1/d and M = 1.
std::vector<TailRow> bernstein_tail_table(int n, int d, double epsilon, const std::vector<double>& t_grid,
                                          std::int64_t samples, std::uint64_t seed);

}  // namespace gsbm
