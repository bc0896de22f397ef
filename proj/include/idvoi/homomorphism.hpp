#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "idvoi/graph.hpp"

namespace idvoi {

/// A node map from `source` to `target` claiming the four homomorphism
/// conditions: (a) preserves node types, (b) preserves links, (c) covers
/// all infolinks, (d) combines only linked decisions.
struct IdHom {
    IdGraph source;
    IdGraph target;
    std::map<NodeId, NodeId> map;
    bool verified = false;

    const NodeId& apply(const NodeId& v) const;
    /// Source nodes mapping to v, sorted.
    std::vector<NodeId> preimage(const NodeId& v) const;

    static IdHom identity(const IdGraph& g);
};

struct HomViolation {
    char condition;  // 'a'..'d'
    std::vector<NodeId> witness;
    std::string detail;
};

struct HomVerdict {
    std::vector<HomViolation> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks all four conditions, reporting every violation with a witness.
/// Sets h.verified on success. Throws PartialMap when the map is not a
/// total function into the target's nodes.
HomVerdict verify(IdHom& h);

/// Composition outer ∘ inner. Requires inner.target == outer.source and
/// both verified; the result is re-verified.
IdHom compose(const IdHom& outer, const IdHom& inner);

/// Node copying and deletion. Each node of g is replaced by the names in
/// copies[node] (missing key: kept as itself; empty set: deleted). Edges:
/// every copy pair of an original edge is connected, and non-utility
/// copies of one node form a transitive tournament in the given order.
/// Returns the new graph and the verified copy -> original hom.
struct CopySpec {
    /// Copy names per original node, in the linear order that directs the
    /// edges among copies of that node.
    std::map<NodeId, std::vector<NodeId>> copies;
};

std::pair<IdGraph, IdHom> copy_delete_transform(const IdGraph& g, const CopySpec& spec);

/// Keeps exactly the edges in `keep`. Every edge into a decision must be
/// kept (error DroppedInfolink). The identity map is returned as a
/// verified hom from the pruned graph to g.
std::pair<IdGraph, IdHom> prune_links(const IdGraph& g,
                                      const std::set<std::pair<NodeId, NodeId>>& keep);

}  // namespace idvoi
