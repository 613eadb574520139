#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gsbm/channel_model.hpp"

namespace gsbm {

struct Instance {
  int n = 0;
  int p = 0;
  int k = 0;
  int ell = 0;
  std::uint64_t seed = 0;
  // Hidden labels; present exactly for planted draws.
  std::optional<std::vector<int>> labels;
  // subsets[i] is sorted ascending; subsets are in lexicographic order.
  std::vector<std::vector<int>> subsets;
  std::vector<int> symbols;
};

// Colexicographic rank of a sorted subset.
std::uint64_t colex_rank(const std::vector<int>& sorted_subset);

// Labels use CounterRng(seed, labels stream, i); observation S uses
// CounterRng(seed, observations stream, colex_rank(S)).
Instance sample(const ChannelFamily& fam, int n, bool planted, std::uint64_t seed, double budget = 5e7);

nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);
// "i,j,symbol" rows for p = 2, skipping observations equal to background when given.
std::string edge_list_csv(const Instance& inst, std::optional<int> background = std::nullopt);

struct ChannelFit {
  std::vector<int> tuple;
  std::vector<std::int64_t> counts;
  Eigen::VectorXd expected;
  double chi2 = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

struct Chi2Report {
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<ChannelFit> channels;
  double min_p_value = 1.0;
};

// Draws `samples` symbols from each channel of fam and tests them against fam.
Chi2Report empirical_chi2_distance(const ChannelFamily& fam, std::int64_t samples, std::uint64_t seed);
// Draws from `sampled` and tests against `reference` (same shape).
Chi2Report empirical_chi2_distance(const ChannelFamily& sampled, const ChannelFamily& reference, std::int64_t samples,
                                   std::uint64_t seed);

}  // namespace gsbm
