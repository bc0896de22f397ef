#pragma once

#include <string>

#include "json.hpp"

#include "idvoi/analysis.hpp"
#include "idvoi/homomorphism.hpp"
#include "idvoi/model.hpp"
#include "idvoi/systems.hpp"
#include "idvoi/witness.hpp"

namespace idvoi {

using Json = nlohmann::json;

Json graph_to_json(const IdGraph& g);
IdGraph graph_from_json(const Json& j);

Json hom_to_json(const IdHom& h);
IdHom hom_from_json(const Json& j);

Json model_to_json(const IdModel& m);
IdModel model_from_json(const Json& j);

Json policy_to_json(const Policy& pi);
Policy policy_from_json(const Json& j, const IdModel& m);

Json tree_to_json(const SystemTree& t);
SystemTree tree_from_json(const Json& j, const IdGraph& g);

Json witness_report_to_json(const WitnessReport& r);

/// Graphviz rendering: chance nodes as ellipses, decisions as boxes,
/// utilities as diamonds. Removed links render dashed; tree paths colored.
std::string graph_to_dot(const IdGraph& g,
                         const std::vector<std::pair<NodeId, NodeId>>& removed = {},
                         const SystemTree* tree = nullptr);

}  // namespace idvoi
