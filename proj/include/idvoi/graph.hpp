#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace idvoi {

using NodeId = std::string;

enum class NodeKind { Chance, Decision, Utility };

std::string kind_name(NodeKind k);
NodeKind kind_from_name(const std::string& s);

/// Influence-diagram graph: a DAG of chance, decision and utility nodes.
/// Utility nodes have no children. Immutable after construction; node and
/// edge iteration is in lexicographic order so every algorithm downstream
/// is reproducible.
class IdGraph {
public:
    IdGraph() = default;

    /// Validates and builds. Throws Error with code CycleDetected,
    /// UtilityHasChild, DanglingEdge or DuplicateNode.
    static IdGraph build(const std::vector<std::pair<NodeId, NodeKind>>& nodes,
                         const std::vector<std::pair<NodeId, NodeId>>& edges);

    const std::map<NodeId, NodeKind>& nodes() const { return kinds_; }
    std::size_t node_count() const { return kinds_.size(); }
    bool has_node(const NodeId& v) const { return kinds_.count(v) != 0; }
    NodeKind kind(const NodeId& v) const;
    bool is_decision(const NodeId& v) const { return kind(v) == NodeKind::Decision; }
    bool is_chance(const NodeId& v) const { return kind(v) == NodeKind::Chance; }
    bool is_utility(const NodeId& v) const { return kind(v) == NodeKind::Utility; }

    bool has_edge(const NodeId& a, const NodeId& b) const;
    /// All edges, sorted.
    std::vector<std::pair<NodeId, NodeId>> edges() const;

    const std::vector<NodeId>& parents(const NodeId& v) const;
    const std::vector<NodeId>& children(const NodeId& v) const;
    std::set<NodeId> family(const NodeId& v) const;
    std::set<NodeId> descendants(const NodeId& v) const;
    std::set<NodeId> ancestors(const NodeId& v) const;

    /// Utility nodes among the descendants of decision d.
    std::set<NodeId> utility_reach(const NodeId& d) const;

    std::vector<NodeId> chance_nodes() const;
    std::vector<NodeId> decision_nodes() const;
    std::vector<NodeId> utility_nodes() const;

    /// Lexicographically least topological order.
    std::vector<NodeId> topo_order() const;

    IdGraph with_edge_removed(const NodeId& a, const NodeId& b) const;
    IdGraph with_edge_added(const NodeId& a, const NodeId& b) const;

    friend bool operator==(const IdGraph& a, const IdGraph& b) {
        return a.kinds_ == b.kinds_ && a.edges_ == b.edges_;
    }
    friend bool operator!=(const IdGraph& a, const IdGraph& b) { return !(a == b); }

private:
    std::map<NodeId, NodeKind> kinds_;
    std::set<std::pair<NodeId, NodeId>> edges_;
    std::map<NodeId, std::vector<NodeId>> parents_;
    std::map<NodeId, std::vector<NodeId>> children_;

    void require_node(const NodeId& v) const;
};

/// The graph with one fresh parentless chance node feeding each decision,
/// used by the solubility check. policy_nodes maps each decision to its
/// added node.
struct MappingExtension {
    IdGraph graph;
    std::map<NodeId, NodeId> policy_nodes;
};

MappingExtension mapping_extension(const IdGraph& g);

/// Fresh name "<base>__<tag>", appending a numeric suffix until it avoids
/// every name in `taken`.
NodeId fresh_name(const std::set<NodeId>& taken, const NodeId& base, const std::string& tag);

}  // namespace idvoi
