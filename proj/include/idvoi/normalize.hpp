#pragma once

#include <map>
#include <string>

#include "idvoi/graph.hpp"
#include "idvoi/homomorphism.hpp"
#include "idvoi/systems.hpp"

namespace idvoi {

/// Origin of a node created by a transformation.
struct Provenance {
    NodeId original;
    std::size_t system = 0;
    std::string path_tag;  // "i", "c", "ic", "o:<collider>", "copy"
};

struct TransformResult {
    IdGraph graph;
    SystemTree tree;
    IdHom hom;  // new graph -> input graph
    std::map<NodeId, Provenance> provenance;
};

/// Transformation 1: one copy per position a node occupies in the tree,
/// shared positions (inherited infolink nodes, utilities, collider obs
/// heads, the root infolink) excepted. Originals are kept, so the input
/// graph stays a subgraph. Output satisfies position uniqueness.
TransformResult transform1_split(const IdGraph& g, const SystemTree& t);

/// Transformation 2: each backdoor info path X <- N ... becomes
/// X -> (X,copy) <- N ... with a single-link obs path (X,copy) -> D.
/// Requires position uniqueness; output also has front-door info paths.
TransformResult transform2_frontdoor(const IdGraph& g, const SystemTree& t);

/// Transformation 3: drops every edge that touches a tree-interior node
/// without being a within-tree link or an edge into a decision. Requires
/// properties (a,b); output is normal form.
TransformResult transform3_prune(const IdGraph& g, const SystemTree& t);

/// Transformation 4: when the root info path is non-directed, adds a copy
/// of the root decision carrying the claim bit; identity otherwise.
/// Requires a normal form tree.
TransformResult transform4_split_root(const IdGraph& g, const SystemTree& t);

struct NormalFormResult {
    IdGraph original;
    IdGraph reduced;        // minimal d-reduction used to pick the paths
    SystemTree full_tree;   // raw tree before the transformations
    TransformResult stage1, stage2, stage3;
    IdHom hom;              // stage3 graph -> original

    const IdGraph& graph() const { return stage3.graph; }
    const SystemTree& tree() const { return stage3.tree; }
};

/// Full pipeline: minimal d-reduction, full tree on x->d, transformations
/// 1-3, composed verified hom back to g. Errors: Insoluble, CriterionFails.
NormalFormResult to_normal_form(const IdGraph& g, const NodeId& x, const NodeId& d);

}  // namespace idvoi
