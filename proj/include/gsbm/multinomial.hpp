#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gsbm/errors.hpp"
#include "gsbm/numeric.hpp"
#include "gsbm/parallel.hpp"
#include "gsbm/rng.hpp"

namespace gsbm {

// Number of compositions of n into d nonnegative parts, C(n+d-1, d-1), as a double.
inline double composition_count(int n, int d) {
  return std::round(std::exp(log_binomial(n + d - 1.0, d - 1.0)));
}

// Visits every z in Z_{>=0}^d with sum n in lexicographic order, passing the
// log-probability of z under Mult(n, uniform over d cells).
template <typename Visit>
void for_each_composition(int n, int d, Visit&& visit) {
  if (n < 0 || d < 1) throw ConfigError("compositions: need n >= 0 and d >= 1");
  std::vector<int> z(d, 0);
  const double base = log_factorial(n) - n * std::log(static_cast<double>(d));
  z[0] = n;
  while (true) {
    double lw = base;
    for (int v : z) lw -= log_factorial(v);
    visit(std::span<const int>(z), lw);
    // Next composition: move one unit from the last nonzero non-final slot rightwards.
    int i = d - 2;
    while (i >= 0 && z[i] == 0) --i;
    if (i < 0) break;
    --z[i];
    const int tail = z[d - 1];
    z[d - 1] = 0;
    z[i + 1] = tail + 1;
  }
}

// Exact E f(z) for z ~ Mult(n, uniform over d cells), accumulated in log space.
template <typename F>
double multinomial_expectation(int n, int d, F&& f, double budget = 1e7) {
  if (composition_count(n, d) > budget) {
    throw BudgetExceeded("exact enumeration needs " + std::to_string(composition_count(n, d)) +
                         " compositions, above the budget of " + std::to_string(budget) + "; use Monte Carlo");
  }
  SignedLogAccumulator acc;
  for_each_composition(n, d, [&](std::span<const int> z, double lw) { acc.add_weighted(lw, f(z)); });
  return acc.value();
}

// Draws Mult(n, uniform over d cells) counts.
inline void draw_multinomial(CounterRng& rng, int n, std::span<int> z) {
  std::fill(z.begin(), z.end(), 0);
  const auto d = static_cast<std::uint64_t>(z.size());
  for (int i = 0; i < n; ++i) ++z[rng.below(d)];
}

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double variance = 0.0;
  std::int64_t samples = 0;
};

// Welford accumulator with Chan's pairwise merge.
struct RunningMoments {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  void merge(const RunningMoments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(count + o.count);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.count) / total;
    m2 += o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) / total;
    count += o.count;
  }
  MeanEstimate estimate() const {
    MeanEstimate e;
    e.samples = count;
    e.mean = mean;
    e.variance = count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
    e.std_error = count > 0 ? std::sqrt(e.variance / static_cast<double>(count)) : 0.0;
    return e;
  }
};

// Monte Carlo mean of f(rng) over sample indices [0, samples). Sample i
// uses CounterRng(seed, stream, i), and chunks are merged in index order, so the
// result does not depend on the thread count.
template <typename F>
MeanEstimate monte_carlo_mean(std::int64_t samples, std::uint64_t seed, std::uint64_t stream, F&& f) {
  if (samples < 1) throw ConfigError("Monte Carlo: samples must be at least 1");
  constexpr std::int64_t kChunk = 4096;
  const auto chunks = static_cast<std::size_t>((samples + kChunk - 1) / kChunk);
  std::vector<RunningMoments> parts(chunks);
  parallel_chunks(chunks, [&](std::size_t c) {
    const std::int64_t begin = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t end = std::min(samples, begin + kChunk);
    RunningMoments m;
    for (std::int64_t i = begin; i < end; ++i) {
      CounterRng rng(seed, stream, static_cast<std::uint64_t>(i));
      m.add(f(rng));
    }
    parts[c] = m;
  });
  RunningMoments total;
  for (const auto& m : parts) total.merge(m);
  return total.estimate();
}

}  // namespace gsbm
