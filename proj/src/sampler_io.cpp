#include "gsbm/sampler_io.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "gsbm/errors.hpp"
#include "gsbm/numeric.hpp"
#include "gsbm/parallel.hpp"
#include "gsbm/rng.hpp"

namespace gsbm {

std::uint64_t colex_rank(const std::vector<int>& s) {
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < s.size(); ++i) r += binomial(static_cast<std::uint64_t>(s[i]), i + 1);
  return r;
}

Instance sample(const ChannelFamily& fam, int n, bool planted, std::uint64_t seed, double budget) {
  const int p = fam.p();
  if (n < p) throw ConfigError("sample: n must be at least p");
  const double count = std::exp(log_binomial(n, p));
  if (count > budget) throw BudgetExceeded("sample: C(n, p) observations exceed the sampling budget");

  Instance inst;
  inst.n = n;
  inst.p = p;
  inst.k = fam.k();
  inst.ell = fam.ell();
  inst.seed = seed;
  if (planted) {
    std::vector<int> x(n);
    for (int i = 0; i < n; ++i) {
      CounterRng rng(seed, streams::kLabels, static_cast<std::uint64_t>(i));
      x[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(fam.k())));
    }
    inst.labels = std::move(x);
  }

  std::vector<int> s(p);
  for (int i = 0; i < p; ++i) s[i] = i;
  while (true) {
    inst.subsets.push_back(s);
    int i = p - 1;
    while (i >= 0 && s[i] == n - p + i) --i;
    if (i < 0) break;
    ++s[i];
    for (int j = i + 1; j < p; ++j) s[j] = s[j - 1] + 1;
  }

  inst.symbols.assign(inst.subsets.size(), 0);
  const Eigen::VectorXd avg = fam.average();
  constexpr std::size_t kChunk = 16384;
  const std::size_t chunks = (inst.subsets.size() + kChunk - 1) / kChunk;
  parallel_chunks(chunks, [&](std::size_t c) {
    std::vector<double> probs(static_cast<std::size_t>(fam.ell()));
    const std::size_t end = std::min(inst.subsets.size(), (c + 1) * kChunk);
    for (std::size_t o = c * kChunk; o < end; ++o) {
      const auto& S = inst.subsets[o];
      if (planted) {
        Index row = 0;
        for (int v : S) row = row * fam.k() + (*inst.labels)[v];
        for (int y = 0; y < fam.ell(); ++y) probs[y] = fam.table()(row, y);
      } else {
        for (int y = 0; y < fam.ell(); ++y) probs[y] = avg(y);
      }
      CounterRng rng(seed, streams::kObservations, colex_rank(S));
      inst.symbols[o] = rng.categorical(probs);
    }
  });
  return inst;
}

nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json j;
  j["n"] = inst.n;
  j["p"] = inst.p;
  j["k"] = inst.k;
  j["ell"] = inst.ell;
  j["seed"] = inst.seed;
  j["labels"] = inst.labels ? nlohmann::json(*inst.labels) : nlohmann::json(nullptr);
  nlohmann::json obs = nlohmann::json::array();
  for (std::size_t o = 0; o < inst.subsets.size(); ++o) {
    nlohmann::json row(inst.subsets[o]);
    row.push_back(inst.symbols[o]);
    obs.push_back(std::move(row));
  }
  j["obs"] = std::move(obs);
  return j;
}

Instance instance_from_json(const nlohmann::json& j) {
  try {
    Instance inst;
    inst.n = j.at("n").get<int>();
    inst.p = j.at("p").get<int>();
    inst.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("labels").is_null()) inst.labels = j.at("labels").get<std::vector<int>>();
    int max_symbol = -1, max_label = -1;
    for (const auto& row : j.at("obs")) {
      auto v = row.get<std::vector<int>>();
      if (static_cast<int>(v.size()) != inst.p + 1) throw ConfigError("instance: observation rows need p + 1 entries");
      inst.symbols.push_back(v.back());
      max_symbol = std::max(max_symbol, v.back());
      v.pop_back();
      if (!std::is_sorted(v.begin(), v.end()) || v.front() < 0 || v.back() >= inst.n) {
        throw ConfigError("instance: observation subsets must be sorted and within [0, n)");
      }
      inst.subsets.push_back(std::move(v));
    }
    if (inst.n < inst.p || inst.p < 1 || inst.subsets.size() != binomial(inst.n, inst.p)) {
      throw ConfigError("instance: expected C(n, p) observations");
    }
    for (std::size_t i = 1; i < inst.subsets.size(); ++i) {
      if (!(inst.subsets[i - 1] < inst.subsets[i])) throw ConfigError("instance: observations must be in lexicographic order");
    }
    if (inst.labels) {
      if (static_cast<int>(inst.labels->size()) != inst.n) throw ConfigError("instance: labels must have length n");
      for (int v : *inst.labels) max_label = std::max(max_label, v);
    }
    inst.k = j.contains("k") ? j.at("k").get<int>() : max_label + 1;
    inst.ell = j.contains("ell") ? j.at("ell").get<int>() : max_symbol + 1;
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("instance: ") + e.what());
  }
}

std::string edge_list_csv(const Instance& inst, std::optional<int> background) {
  if (inst.p != 2) throw ConfigError("edge list export needs p = 2");
  std::ostringstream out;
  out << "i,j,symbol\n";
  for (std::size_t o = 0; o < inst.subsets.size(); ++o) {
    if (background && inst.symbols[o] == *background) continue;
    out << inst.subsets[o][0] << ',' << inst.subsets[o][1] << ',' << inst.symbols[o] << '\n';
  }
  return out.str();
}

Chi2Report empirical_chi2_distance(const ChannelFamily& sampled, const ChannelFamily& reference, std::int64_t samples,
                                   std::uint64_t seed) {
  if (samples < 1) throw ConfigError("chi2: samples must be at least 1");
  if (sampled.p() != reference.p() || sampled.k() != reference.k() || sampled.ell() != reference.ell()) {
    throw ConfigError("chi2: sampled and reference families must have the same shape");
  }
  Chi2Report rep;
  rep.samples = samples;
  rep.seed = seed;
  const int ell = sampled.ell();
  rep.channels.resize(static_cast<std::size_t>(sampled.tuples()));
  parallel_chunks(rep.channels.size(), [&](std::size_t a) {
    ChannelFit fit;
    fit.tuple = sampled.tuple(static_cast<Index>(a));
    fit.counts.assign(ell, 0);
    const Eigen::VectorXd probs = sampled.channel(static_cast<Index>(a));
    CounterRng rng(seed, streams::kChannelDraws, a);
    for (std::int64_t i = 0; i < samples; ++i) {
      ++fit.counts[rng.categorical(std::span<const double>(probs.data(), probs.size()))];
    }
    fit.expected = static_cast<double>(samples) * reference.channel(static_cast<Index>(a));
    bool impossible = false;
    int support = 0;
    for (int y = 0; y < ell; ++y) {
      const double e = fit.expected(y);
      if (e > 0.0) {
        ++support;
        fit.chi2 += (fit.counts[y] - e) * (fit.counts[y] - e) / e;
      } else if (fit.counts[y] > 0) {
        impossible = true;
      }
    }
    fit.dof = std::max(0, support - 1);
    if (impossible) {
      fit.chi2 = std::numeric_limits<double>::infinity();
      fit.p_value = 0.0;
    } else if (fit.dof == 0) {
      fit.p_value = 1.0;
    } else {
      fit.p_value = boost::math::gamma_q(fit.dof / 2.0, fit.chi2 / 2.0);
    }
    rep.channels[a] = std::move(fit);
  });
  for (const auto& c : rep.channels) rep.min_p_value = std::min(rep.min_p_value, c.p_value);
  return rep;
}

Chi2Report empirical_chi2_distance(const ChannelFamily& fam, std::int64_t samples, std::uint64_t seed) {
  return empirical_chi2_distance(fam, fam, samples, seed);
}

}  // namespace gsbm
