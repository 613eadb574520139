#pragma once

#include "json.hpp"

#include "gsbm/advantage_bounds.hpp"
#include "gsbm/channel_model.hpp"
#include "gsbm/concentration.hpp"
#include "gsbm/exact_oracle.hpp"
#include "gsbm/sampler_io.hpp"
#include "gsbm/sym_tensor.hpp"
#include "gsbm/tensor_core.hpp"

namespace gsbm {

// {"order": m, "dim": d, "entries": [row-major]}
nlohmann::json tensor_to_json(const SymTensor<double>& T);
SymTensor<double> tensor_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ModelAudit& a);
nlohmann::json to_json(const InjectiveNorm& n);
nlohmann::json to_json(const MarginalProfile& p, bool include_tensors = false);
nlohmann::json to_json(const BoundReport& b);
nlohmann::json to_json(const ThresholdVerdict& v);
nlohmann::json to_json(const P2Verdict& v);
nlohmann::json to_json(const ChainReport& c);
nlohmann::json to_json(const Chi2Report& c);
nlohmann::json to_json(const MomentFit& f);
nlohmann::json to_json(const OverlapLemmaReport& r);
nlohmann::json to_json(const MultifreqResult& r);

}  // namespace gsbm
