#include "gsbm/report_json.hpp"

#include "gsbm/errors.hpp"

namespace gsbm {

using json = nlohmann::json;

namespace {

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

json tensor_to_json(const SymTensor<double>& T) {
  return {{"order", T.order()}, {"dim", T.dim()}, {"entries", vec(T.entries())}};
}

SymTensor<double> tensor_from_json(const json& j) {
  try {
    const auto e = j.at("entries").get<std::vector<double>>();
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(e.data(), static_cast<Index>(e.size()));
    return SymTensor<double>(j.at("order").get<int>(), j.at("dim").get<Index>(), v);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("tensor: ") + ex.what());
  }
}

json to_json(const ModelAudit& a) {
  return {{"nontrivial", a.nontrivial},
          {"regular", a.regular},
          {"weakly_symmetric", a.weakly_symmetric},
          {"strongly_symmetric", a.strongly_symmetric},
          {"max_symmetry_defect", a.max_symmetry_defect},
          {"cost_warning", a.cost_warning}};
}

json to_json(const InjectiveNorm& n) {
  return {{"value", n.value},
          {"signed_value", n.signed_value},
          {"method", to_string(n.method)},
          {"converged", n.converged},
          {"lower_bound", n.lower_bound},
          {"witness", vec(n.witness)}};
}

json to_json(const MarginalProfile& p, bool include_tensors) {
  json j;
  j["p"] = p.p;
  j["k"] = p.k;
  j["zero_tol"] = p.zero_tol;
  j["marginal_order"] = p.marginal_order ? json(*p.marginal_order) : json("trivial");
  j["symmetry_defect"] = p.symmetry_defect;
  j["T0"] = p.tensors[0].value();
  json orders = json::array();
  for (int jj = p.p; jj >= 1; --jj) {
    json o;
    o["j"] = jj;
    o["max_abs"] = p.tensors[jj].max_abs();
    o["injective_norm"] = to_json(p.norms[jj]);
    if (include_tensors) o["tensor"] = tensor_to_json(p.tensors[jj]);
    orders.push_back(std::move(o));
  }
  j["marginals"] = std::move(orders);
  return j;
}

json to_json(const BoundReport& b) {
  json j;
  j["n"] = b.n;
  j["D"] = b.D;
  j["value"] = b.value;
  j["method"] = to_string(b.method);
  j["mc_stderr"] = b.mc_stderr ? json(*b.mc_stderr) : json(nullptr);
  j["samples"] = b.samples ? json(*b.samples) : json(nullptr);
  j["seed"] = b.seed ? json(*b.seed) : json(nullptr);
  j["overflow"] = b.overflow;
  if (b.method == BoundMethod::corollary_relaxation) {
    j["enumerated"] = b.enumerated;
    j["norm_lower_bound"] = b.norm_lower_bound;
  }
  return j;
}

json to_json(const ThresholdVerdict& v) {
  json j = {{"condition", v.condition}, {"lhs", v.lhs}, {"rhs", v.rhs}, {"satisfied", v.satisfied}, {"margin", v.margin}};
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

json to_json(const P2Verdict& v) {
  json crude = json::array();
  for (const auto& c : v.crude) crude.push_back(to_json(c));
  return {{"sharp", to_json(v.sharp)},
          {"leading_order", to_json(v.leading_order)},
          {"crude", std::move(crude)},
          {"satisfied", v.satisfied}};
}

json to_json(const ChainReport& c) {
  json links = json::array();
  for (const auto& l : c.links) {
    links.push_back({{"link", l.name}, {"lhs", l.lhs}, {"rhs", l.rhs}, {"slack", l.slack}, {"ok", l.ok}});
  }
  return {{"n", c.n},
          {"D", c.D},
          {"values",
           {{"cadv_squared", c.cadv_squared},
            {"exp_R", c.exp_R},
            {"exp_R_prime", c.exp_R_prime},
            {"bound_exact", c.bound_exact},
            {"bound_corollary", c.bound_corollary}}},
          {"links", std::move(links)},
          {"passed", c.passed},
          {"violated", c.violated.empty() ? json(nullptr) : json(c.violated)}};
}

json to_json(const Chi2Report& c) {
  json channels = json::array();
  for (const auto& ch : c.channels) {
    channels.push_back({{"tuple", ch.tuple},
                        {"counts", ch.counts},
                        {"expected", vec(ch.expected)},
                        {"chi2", ch.chi2},
                        {"dof", ch.dof},
                        {"p_value", ch.p_value}});
  }
  return {{"samples", c.samples}, {"seed", c.seed}, {"min_p_value", c.min_p_value}, {"channels", std::move(channels)}};
}

json to_json(const MomentFit& f) {
  return {{"C", f.C}, {"gamma", f.gamma}, {"ok", f.ok}, {"constraints", f.constraints}};
}

json to_json(const OverlapLemmaReport& r) {
  return {{"condition1", r.condition1 ? json(*r.condition1) : json("skipped: no analytic sup bound")},
          {"condition2", r.condition2},
          {"first_violation_t", r.first_violation_t ? json(*r.first_violation_t) : json(nullptr)},
          {"worst_ratio", r.worst_ratio},
          {"mean_exp_truncated", r.mean_exp_truncated},
          {"mean_exp_truncated_stderr", r.mean_exp_truncated_stderr},
          {"t", r.t_grid},
          {"empirical_tail", r.empirical_tail},
          {"envelope", r.envelope}};
}

json to_json(const MultifreqResult& r) {
  return {{"value", r.value},
          {"mc_stderr", r.mc_stderr ? json(*r.mc_stderr) : json(nullptr)},
          {"method", r.enumerated ? "exact-moments" : "monte-carlo"}};
}

}  // namespace gsbm
