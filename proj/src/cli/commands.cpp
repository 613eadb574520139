#include "gsbm/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "gsbm/advantage_bounds.hpp"
#include "gsbm/channel_model.hpp"
#include "gsbm/concentration.hpp"
#include "gsbm/errors.hpp"
#include "gsbm/exact_oracle.hpp"
#include "gsbm/model_spec.hpp"
#include "gsbm/multinomial.hpp"
#include "gsbm/report_json.hpp"
#include "gsbm/sampler_io.hpp"
#include "gsbm/tensor_core.hpp"

namespace gsbm::cli {

namespace {

using json = nlohmann::json;

struct RunConfig {
  std::string command;
  std::string model;
  std::optional<std::int64_t> n;
  std::optional<int> D;
  std::int64_t samples = 100000;
  std::uint64_t seed = 0;
  std::optional<double> eta;
  std::optional<double> gamma;
  std::string sweep;
  std::string out;
  std::string format;
  std::vector<std::string> tol;
  std::string method = "auto";
  bool quick = false;
  bool mutate = false;
  bool null_draw = false;
  int bins = 4;
};

// Named tolerances and constants settable with --tol name=value.
class Tolerances {
 public:
  explicit Tolerances(const std::vector<std::string>& items) {
    for (const auto& item : items) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("--tol expects name=value, got '" + item + "'");
      const std::string name = item.substr(0, eq);
      if (!defaults().count(name)) throw ConfigError("--tol: unknown name '" + name + "'");
      try {
        values_[name] = std::stod(item.substr(eq + 1));
      } catch (const std::logic_error&) {
        throw ConfigError("--tol: bad value in '" + item + "'");
      }
    }
  }

  double get(const std::string& name) const {
    const auto it = values_.find(name);
    return it != values_.end() ? it->second : defaults().at(name);
  }
  std::optional<double> given(const std::string& name) const {
    const auto it = values_.find(name);
    return it != values_.end() ? std::optional<double>(it->second) : std::nullopt;
  }

  json resolved() const {
    json j = json::object();
    for (const auto& [k, v] : defaults()) j[k] = get(k);
    return j;
  }

 private:
  static const std::map<std::string, double>& defaults() {
    static const std::map<std::string, double> d = {
        {"zero_tol", 1e-10}, {"audit_tol", 1e-10}, {"epsilon", 0.1}, {"C", 1.0},         {"c", 1.0},
        {"delta", 0.5},      {"budget", 1e7},      {"restarts", 50}, {"iters", 500},     {"power_tol", 1e-12},
        {"slack", 1e-9},     {"decay", 0.0},       {"A", 0.0},       {"envelope_C", 1.0}};
    return d;
  }
  std::map<std::string, double> values_;
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

struct Output {
  json report;
  std::string csv;
  bool failed = false;
};

class Runner {
 public:
  explicit Runner(const RunConfig& cfg) : cfg_(cfg), tol_(cfg.tol) {}

  Output execute() {
    if (cfg_.command == "analyze") return analyze();
    if (cfg_.command == "bound") return cfg_.sweep.empty() ? bound() : sweep();
    if (cfg_.command == "sweep") {
      if (cfg_.sweep.empty()) throw ConfigError("sweep: --sweep param:start:stop:steps is required");
      return sweep();
    }
    if (cfg_.command == "verify") return verify();
    if (cfg_.command == "sample") return sample_cmd();
    if (cfg_.command == "concentrate") return concentrate();
    throw ConfigError("unknown command " + cfg_.command);
  }

  json resolved_config(const std::optional<json>& model) const {
    json c;
    c["command"] = cfg_.command;
    c["model"] = model ? *model : json(nullptr);
    c["model_source"] = cfg_.model.empty() ? json(nullptr) : json(cfg_.model);
    c["n"] = cfg_.n ? json(*cfg_.n) : json(nullptr);
    c["D"] = cfg_.D ? json(*cfg_.D) : json(nullptr);
    c["samples"] = cfg_.samples;
    c["seed"] = cfg_.seed;
    c["eta"] = cfg_.eta ? json(*cfg_.eta) : json(nullptr);
    c["gamma"] = cfg_.gamma ? json(*cfg_.gamma) : json(nullptr);
    c["sweep"] = cfg_.sweep.empty() ? json(nullptr) : json(cfg_.sweep);
    c["method"] = cfg_.method;
    c["quick"] = cfg_.quick;
    c["mutate"] = cfg_.mutate;
    c["null"] = cfg_.null_draw;
    c["bins"] = cfg_.bins;
    c["tolerances"] = tol_.resolved();
    return c;
  }

  std::optional<json> model_json;

 private:
  ModelOverrides overrides() const { return {cfg_.n, cfg_.eta, cfg_.gamma}; }

  ModelSpec load_model(const json& spec, const ModelOverrides& ov) {
    ModelSpec m = build_model(spec, ov);
    model_json = m.resolved;
    return m;
  }

  ModelSpec load_model() {
    if (cfg_.model.empty()) throw ConfigError(cfg_.command + ": --model is required");
    return load_model(load_model_source(cfg_.model), overrides());
  }

  InjectiveNormOptions norm_options() const {
    InjectiveNormOptions o;
    o.restarts = static_cast<int>(tol_.get("restarts"));
    o.iters = static_cast<int>(tol_.get("iters"));
    o.tol = tol_.get("power_tol");
    o.seed = cfg_.seed;
    return o;
  }

  std::int64_t population(const ModelSpec& m) const {
    if (cfg_.n) return *cfg_.n;
    if (m.n) return *m.n;
    throw ConfigError(cfg_.command + ": population size needed (--n or model field n)");
  }

  Output analyze() {
    ModelSpec m = load_model();
    if (!m.family) throw ConfigError("analyze: model '" + m.kind + "' has no channel family");
    const ChannelFamily& fam = *m.family;
    const ModelAudit a = audit(fam, tol_.get("audit_tol"));
    if (!a.weakly_symmetric) {
      throw ConfigError(
          "analyze: the model is not weakly symmetric (max defect " + std::to_string(a.max_symmetry_defect) +
          "); the characteristic tensor bounds assume weak symmetry, as for sumset models over non-abelian groups");
    }
    json r;
    r["audit"] = to_json(a);
    const MarginalProfile prof = marginal_profile(fam, tol_.get("zero_tol"), norm_options());
    r["profile"] = to_json(prof);
    if (m.resampled > 0.0 || m.censored > 0.0) {
      r["channel_calculus"] = {{"resample_eta", m.resampled},
                               {"censor_eta", m.censored},
                               {"tensor_scale", (1.0 - m.resampled) * (1.0 - m.resampled) * (1.0 - m.censored)}};
    }
    json verdicts = json::array();
    json notes = json::array();
    if (m.sbm_Q) verdicts.push_back(to_json(ks_threshold_sbm(*m.sbm_Q)));
    if (m.hsbm_Q) verdicts.push_back(to_json(ks_threshold_hsbm(*m.hsbm_Q)));
    const std::optional<std::int64_t> n = cfg_.n ? cfg_.n : m.n;
    const int D = cfg_.D.value_or(10);
    if (prof.trivial()) {
      notes.push_back("trivial family: no bound applies");
    } else if (*prof.marginal_order < 2) {
      notes.push_back("marginal order 1: the hardness conditions require p* >= 2");
    } else if (!n) {
      notes.push_back("threshold conditions need a population size (--n)");
    } else {
      const double c = tol_.get("c");
      if (static_cast<double>(D) <= c * static_cast<double>(*n)) {
        verdicts.push_back(to_json(check_theorem_p3(prof, *n, D, c)));
      } else {
        notes.push_back("marginal order condition skipped: D exceeds c n");
      }
      if (*prof.marginal_order == 2) {
        r["order2"] = to_json(check_theorem_p2(prof, *n, tol_.get("epsilon"), tol_.get("C")));
      }
    }
    r["verdicts"] = std::move(verdicts);
    r["notes"] = std::move(notes);
    return {r, {}, false};
  }

  struct BoundPoint {
    double value = 1.0;
    std::optional<double> stderr_value;
    std::string method;
    json detail;
  };

  BoundPoint bound_point(const ModelSpec& m, std::int64_t n, int D, bool with_corollary) {
    BoundPoint pt;
    if (m.kind == "multifreq") {
      MultifreqOptions o;
      o.budget = tol_.get("budget");
      o.samples = cfg_.samples;
      o.seed = cfg_.seed;
      o.force_mc = cfg_.method == "mc";
      if (cfg_.method == "exact" && composition_count(static_cast<int>(n), m.multifreq_k) > o.budget) {
        throw BudgetExceeded("bound: exact Pearson moments exceed the enumeration budget");
      }
      const MultifreqResult res = multifreq_advantage(m.multifreq_k, m.multifreq_lambda, n, D, o);
      pt.value = res.value;
      pt.stderr_value = res.mc_stderr;
      pt.method = res.enumerated ? "exact-moments" : "monte-carlo";
      pt.detail = to_json(res);
      return pt;
    }
    if (!m.family) throw ConfigError("bound: model has no channel family");
    const SymTensor<double> T = characteristic_tensor(*m.family);
    const int d = static_cast<int>(T.dim());
    const double budget = tol_.get("budget");
    const bool feasible = n <= std::numeric_limits<int>::max() && composition_count(static_cast<int>(n), d) <= budget;
    BoundReport b;
    if (cfg_.method == "exact" || (cfg_.method == "auto" && feasible)) {
      b = bound_exact(T, n, D, {budget});
    } else {
      b = bound_mc(T, n, D, cfg_.samples, cfg_.seed);
    }
    pt.value = b.value;
    pt.stderr_value = b.mc_stderr;
    pt.method = to_string(b.method);
    pt.detail = json{{"bound", to_json(b)}};
    if (with_corollary) {
      const MarginalProfile prof = marginal_profile(T, m.family->k(), tol_.get("zero_tol"), norm_options());
      CorollaryOptions co;
      co.budget = budget;
      co.samples = cfg_.samples;
      co.seed = cfg_.seed;
      pt.detail["corollary"] = to_json(bound_corollary(prof, n, D, co));
      pt.detail["marginal_order"] = prof.marginal_order ? json(*prof.marginal_order) : json("trivial");
    }
    return pt;
  }

  Output bound() {
    if (cfg_.method != "auto" && cfg_.method != "exact" && cfg_.method != "mc") {
      throw ConfigError("--method must be auto, exact or mc");
    }
    ModelSpec m = load_model();
    const std::int64_t n = population(m);
    const int D = cfg_.D.value_or(10);
    BoundPoint pt = bound_point(m, n, D, true);
    json r = pt.detail;
    r["n"] = n;
    r["D"] = D;
    return {r, {}, false};
  }

  Output sweep() {
    const auto parts = [&] {
      std::vector<std::string> out;
      std::stringstream s(cfg_.sweep);
      std::string item;
      while (std::getline(s, item, ':')) out.push_back(item);
      return out;
    }();
    if (parts.size() != 4) throw ConfigError("--sweep expects param:start:stop:steps");
    const std::string param = parts[0];
    double start = 0, stop = 0;
    int steps = 0;
    try {
      start = std::stod(parts[1]);
      stop = std::stod(parts[2]);
      steps = std::stoi(parts[3]);
    } catch (const std::logic_error&) {
      throw ConfigError("--sweep: bad number in '" + cfg_.sweep + "'");
    }
    if (steps < 1) throw ConfigError("--sweep: steps must be at least 1");
    static const std::vector<std::string> known = {"D", "n", "gamma", "eta", "lambda", "alpha", "beta"};
    if (std::find(known.begin(), known.end(), param) == known.end()) {
      throw ConfigError("--sweep: parameter must be one of D, n, gamma, eta, lambda, alpha, beta");
    }
    if (cfg_.model.empty()) throw ConfigError("sweep: --model is required");
    const json base_spec = load_model_source(cfg_.model);

    json rows = json::array();
    std::ostringstream csv;
    csv << std::setprecision(17) << param << ",value,stderr,method\n";
    for (int i = 0; i < steps; ++i) {
      double x = steps == 1 ? start : start + (stop - start) * i / (steps - 1);
      ModelOverrides ov = overrides();
      json spec = base_spec;
      int D = cfg_.D.value_or(10);
      if (param == "D") {
        x = std::round(x);
        D = static_cast<int>(x);
      } else if (param == "n") {
        x = std::round(x);
        ov.n = static_cast<std::int64_t>(x);
      } else if (param == "gamma") {
        ov.gamma = x;
        ov.eta.reset();
      } else if (param == "eta") {
        ov.eta = x;
        ov.gamma.reset();
      } else {
        json& target = spec.contains("base") ? spec["base"] : spec;
        target[param] = x;
      }
      ModelSpec m = load_model(spec, ov);
      const std::int64_t n = population(m);
      const BoundPoint pt = bound_point(m, n, D, false);
      rows.push_back({{param, x},
                      {"n", n},
                      {"D", D},
                      {"value", pt.value},
                      {"stderr", pt.stderr_value ? json(*pt.stderr_value) : json(nullptr)},
                      {"method", pt.method}});
      csv << std::setprecision(12) << x << std::setprecision(17) << ',' << pt.value << ',' << (pt.stderr_value ? *pt.stderr_value : 0.0) << ',' << pt.method << '\n';
    }
    json r;
    r["parameter"] = param;
    r["rows"] = std::move(rows);
    return {r, csv.str(), false};
  }

  // Negates the orbit of the largest entry; the result is still symmetric.
  static SymTensor<double> mutate_tensor(const SymTensor<double>& T) {
    Index flat = 0;
    T.entries().cwiseAbs().maxCoeff(&flat);
    std::vector<Index> target(T.order()), idx(T.order());
    T.unravel(flat, target);
    std::sort(target.begin(), target.end());
    Eigen::VectorXd e = T.entries();
    for (Index i = 0; i < T.size(); ++i) {
      T.unravel(i, idx);
      std::sort(idx.begin(), idx.end());
      if (idx == target) e(i) = -e(i);
    }
    return SymTensor<double>(T.order(), T.dim(), std::move(e), SymTensor<double>::AssumeSymmetric{});
  }

  json chain_case(const std::string& name, const ChannelFamily& fam, int n, int D_max, bool& failed) {
    const TinyInstance inst(fam, n);
    json out;
    out["case"] = name;
    out["n"] = n;
    out["weakly_symmetric"] = audit(fam).weakly_symmetric;
    json runs = json::array();
    for (int D = 1; D <= D_max; ++D) {
      ChainOptions opts;
      opts.throw_on_failure = false;
      opts.slack = tol_.get("slack");
      opts.norm_options = norm_options();
      if (cfg_.mutate) opts.tensor_override = mutate_tensor(characteristic_tensor(fam));
      const ChainReport rep = verify_chain(inst, D, opts);
      failed = failed || !rep.passed;
      runs.push_back(to_json(rep));
    }
    out["chain"] = std::move(runs);
    return out;
  }

  Output verify() {
    bool failed = false;
    json cases = json::array();
    const int D_max = cfg_.D.value_or(4);
    if (!cfg_.model.empty()) {
      ModelSpec m = load_model();
      if (!m.family) throw ConfigError("verify: model has no channel family");
      const int n = static_cast<int>(cfg_.n.value_or(4));
      cases.push_back(chain_case(m.kind, *m.family, n, D_max, failed));
    } else {
      model_json = json("default suite");
      const ChannelFamily sbm = build_sbm(symmetric_sbm_matrix(2, 3.0, 1.0), 4);
      cases.push_back(chain_case("sbm(alpha=3,beta=1,n=4)", sbm, 4, D_max, failed));
      cases.push_back(chain_case("xor(p=2,eta=0.4)", build_xor_sat(2, 0.4), 4, D_max, failed));
      cases.push_back(chain_case("toh_sync(Z2,eta=0.5)",
                                 build_truth_or_haar(FiniteGroup::cyclic(2), 0.5, ToHMode::sync), 4, D_max, failed));
      cases.push_back(chain_case("censor(sbm,0.3)", censor(sbm, 0.3), 4, D_max, failed));
      if (!cfg_.quick) {
        cases.push_back(chain_case("toh_sync(Z3,eta=0.5)",
                                   build_truth_or_haar(FiniteGroup::cyclic(3), 0.5, ToHMode::sync), 3, D_max, failed));
        cases.push_back(chain_case("sbm(alpha=3,beta=1,n=5)", build_sbm(symmetric_sbm_matrix(2, 3.0, 1.0), 5), 5,
                                   D_max, failed));
      }
    }
    json r;
    r["chains"] = std::move(cases);
    if (!cfg_.quick && cfg_.model.empty()) r["concentration"] = concentration_checks(failed);
    r["passed"] = !failed;
    return {r, {}, failed};
  }

  json concentration_checks(bool& failed) {
    json out;
    json means = json::array();
    for (int n : {20, 50}) {
      for (int d : {2, 4}) {
        const double m1 = pearson_moment_exact({n, d}, 1);
        const bool ok = std::abs(m1 - (d - 1)) <= 1e-10;
        failed = failed || !ok;
        means.push_back({{"n", n}, {"d", d}, {"exact_mean", m1}, {"ok", ok}});
      }
    }
    out["pearson_mean"] = std::move(means);
    bool moments_ok = true;
    for (int n : {20, 50}) {
      for (int d : {2, 4}) {
        const auto m = pearson_moments_exact({n, d}, 5);
        for (int r = 1; r <= 5; ++r) {
          for (double delta : {0.1, 0.5, 0.9}) {
            for (double eps : {0.1, 0.5, 0.9}) {
              moments_ok = moments_ok && m[r] <= pearson_moment_bound({n, d}, r, delta, eps);
            }
          }
        }
      }
    }
    failed = failed || !moments_ok;
    out["moment_bound_dominates_exact"] = moments_ok;
    bool fact_ok = true;
    for (int d = 1; d <= 170; ++d) fact_ok = fact_ok && factorial_lower_bound_holds(d);
    failed = failed || !fact_ok;
    out["factorial_bound"] = fact_ok;
    return out;
  }

  Output sample_cmd() {
    ModelSpec m = load_model();
    if (!m.family) throw ConfigError("sample: model has no channel family");
    const std::int64_t n = population(m);
    if (n > std::numeric_limits<int>::max()) throw ConfigError("sample: n too large");
    const Instance inst = sample(*m.family, static_cast<int>(n), !cfg_.null_draw, cfg_.seed);
    std::string csv;
    if (inst.p == 2) {
      Index background = 0;
      m.family->average().maxCoeff(&background);
      csv = edge_list_csv(inst, static_cast<int>(background));
    }
    return {instance_to_json(inst), csv, false};
  }

  Output concentrate() {
    const int n = static_cast<int>(cfg_.n.value_or(200));
    const int d = cfg_.bins;
    const PearsonSpec spec{n, d};
    validate(spec);
    const double eps = tol_.given("epsilon").value_or(0.5);
    const double delta = tol_.get("delta");
    json r;
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(i * 0.5 * d);
    double max_sample = 0.0;
    const auto tails = pearson_tail_table(spec, eps, grid, cfg_.samples, cfg_.seed, &max_sample);
    json tail_rows = json::array();
    std::ostringstream csv;
    csv << std::setprecision(17) << "t,empirical,bound\n";
    bool tails_ok = true;
    for (const auto& row : tails) {
      tail_rows.push_back({{"t", row.t}, {"empirical", row.empirical}, {"bound", row.bound}});
      csv << row.t << ',' << row.empirical << ',' << row.bound << '\n';
      tails_ok = tails_ok && row.empirical <= row.bound;
    }
    r["pearson_tail"] = {{"n", n}, {"d", d}, {"epsilon", eps}, {"rows", std::move(tail_rows)}, {"ok", tails_ok}};
    r["max_sample"] = max_sample;
    r["sup_bound_ok"] = max_sample <= static_cast<double>(d) * n;

    json moments = json::array();
    if (composition_count(n, d) <= tol_.get("budget")) {
      const auto m = pearson_moments_exact(spec, 5, tol_.get("budget"));
      for (int k = 1; k <= 5; ++k) {
        moments.push_back({{"r", k}, {"exact", m[k]}, {"bound", pearson_moment_bound(spec, k, delta, eps)}});
      }
      r["exact_mean"] = m[1];
    }
    r["moments"] = std::move(moments);
    r["moment_fit"] = to_json(simple_moment_bound_fit({{20, 2}, {40, 2}, {80, 2}, {20, 4}, {40, 4}, {80, 4}}, eps, 8));

    if (!cfg_.model.empty()) {
      ModelSpec m = load_model();
      if (!m.family) throw ConfigError("concentrate: model has no channel family");
      const std::int64_t pop = population(m);
      const SymTensor<double> T = characteristic_tensor(*m.family);
      OverlapLemmaParams op;
      op.D = cfg_.D.value_or(10);
      op.r_sup = T.max_abs() * std::pow(static_cast<double>(pop), T.order());
      op.A = tol_.given("A").value_or(op.D * std::max(2.0, std::log(*op.r_sup / op.D)));
      op.C = tol_.get("envelope_C");
      op.decay = tol_.get("decay");
      op.samples = cfg_.samples;
      op.seed = cfg_.seed;
      const auto dim = static_cast<std::size_t>(T.dim());
      const int npop = static_cast<int>(pop);
      const auto rep = check_overlap_lemma(
          [&](CounterRng& rng) {
            std::vector<int> z(dim);
            draw_multinomial(rng, npop, z);
            return overlap_value(T, z);
          },
          op);
      r["overlap_lemma"] = to_json(rep);
      r["overlap_lemma"]["A"] = op.A;
      r["overlap_lemma"]["r_sup"] = *op.r_sup;
    }
    return {r, csv.str(), false};
  }

  const RunConfig& cfg_;
  Tolerances tol_;
};

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--model", cfg.model, "Model file, inline JSON, or shorthand like sbm:k=2,alpha=3,beta=1");
  sub->add_option("--n", cfg.n, "Population size");
  sub->add_option("--D", cfg.D, "Coordinate degree");
  sub->add_option("--samples", cfg.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
  sub->add_option("--seed", cfg.seed, "Random seed");
  sub->add_option("--eta", cfg.eta, "Channel strength for truth-or-Haar and xor models");
  sub->add_option("--gamma", cfg.gamma, "Truth-or-Haar strength with eta = gamma / sqrt(n)");
  sub->add_option("--sweep", cfg.sweep, "param:start:stop:steps");
  sub->add_option("--out", cfg.out, "Output path (default stdout)");
  sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--tol", cfg.tol, "Tolerance or constant override, name=value (repeatable)");
  sub->add_option("--method", cfg.method, "auto, exact or mc")->check(CLI::IsMember({"auto", "exact", "mc"}));
}

}  // namespace

json without_timestamp(json report) {
  if (report.is_object()) report.erase("timestamp");
  return report;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"gsbm_lab: characteristic tensors, hardness bounds and exact checks for generalized block models"};
  app.require_subcommand(1);
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {{"analyze", "Audit a model, compute its marginal profile and threshold verdicts"},
                      {"bound", "Evaluate advantage bounds (exact enumeration or Monte Carlo)"},
                      {"verify", "Run the exact inequality-chain verification suite"},
                      {"sample", "Draw a planted or null instance"},
                      {"concentrate", "Pearson and Bernstein concentration checks"},
                      {"sweep", "Bound values over a parameter grid"}};
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, cfg);
    sub->callback([&cfg, name = std::string(s.name)] { cfg.command = name; });
    if (std::string(s.name) == "verify") {
      sub->add_flag("--quick", cfg.quick, "Only the n <= 4 instances, no concentration checks");
      sub->add_flag("--mutate", cfg.mutate, "Negate one entry orbit of the tensor (negative control)");
    }
    if (std::string(s.name) == "sample") sub->add_flag("--null", cfg.null_draw, "Draw from the null measure");
    if (std::string(s.name) == "concentrate") sub->add_option("--d", cfg.bins, "Number of Pearson bins");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    Runner runner(cfg);
    Output result = runner.execute();
    const bool csv_default = cfg.command == "sweep";
    const std::string format = cfg.format.empty() ? (csv_default ? "csv" : "json") : cfg.format;
    std::string text;
    if (format == "csv") {
      if (result.csv.empty()) throw ConfigError(cfg.command + ": CSV output is not available for this command/model");
      text = result.csv;
    } else {
      json doc;
      doc["command"] = cfg.command;
      doc["config"] = runner.resolved_config(runner.model_json);
      doc["timestamp"] = utc_timestamp();
      doc["result"] = std::move(result.report);
      text = doc.dump(2) + "\n";
    }
    if (cfg.out.empty()) {
      out << text;
    } else {
      std::ofstream f(cfg.out);
      if (!f) throw ConfigError("cannot write to '" + cfg.out + "'");
      f << text;
    }
    if (result.failed) {
      err << "verification failed\n";
      return kVerificationFailure;
    }
    return kOk;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kBudgetExceeded;
  } catch (const VerificationFailure& e) {
    err << "verification failure: " << e.what() << '\n';
    return kVerificationFailure;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace gsbm::cli
