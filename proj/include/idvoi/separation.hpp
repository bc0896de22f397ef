#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "idvoi/graph.hpp"

namespace idvoi {

/// One step of a traced path: `forward` means the edge points from this
/// node to the next one.
struct PathStep {
    bool forward;
};

/// A simple path with per-step edge directions. nodes.size() == steps.size()+1.
struct TracedPath {
    std::vector<NodeId> nodes;
    std::vector<PathStep> steps;

    std::size_t length() const { return steps.size(); }
    const NodeId& first() const { return nodes.front(); }
    const NodeId& last() const { return nodes.back(); }
    bool contains(const NodeId& v) const;
    /// True when every step is forward.
    bool is_directed() const;
    /// Renders like "A -> B <- C".
    std::string str() const;

    friend bool operator==(const TracedPath& a, const TracedPath& b);
};

/// Builds a TracedPath from a node sequence, reading each step's direction
/// off the graph. Throws InvalidPath if consecutive nodes are not adjacent
/// or a node repeats.
TracedPath trace_path(const IdGraph& g, const std::vector<NodeId>& nodes);

enum class WalkStep { Forward, Backward, Stay };

/// A node sequence where consecutive nodes are joined by an edge in either
/// direction or are equal (a "stay" step).
struct WalkWithRepetition {
    std::vector<NodeId> nodes;
    std::vector<WalkStep> steps;
};

WalkWithRepetition make_walk(const IdGraph& g, const std::vector<NodeId>& nodes);

/// True iff p is active given z: every collider on p has a descendant in z
/// (itself included) and every non-collider is outside z.
bool is_active_path(const IdGraph& g, const TracedPath& p, const std::set<NodeId>& z);

/// d-separation of node sets by directed reachability. Conditioned members
/// of a or b are dropped first; overlapping residual sets count as connected.
bool d_separated(const IdGraph& g, const std::set<NodeId>& a, const std::set<NodeId>& b,
                 const std::set<NodeId>& z);

/// Deterministic constructive counterpart of d_separated: an active path
/// from a to b given z, or nullopt. BFS over (node, entry direction) states,
/// shortest first with lexicographic tie-breaking.
std::optional<TracedPath> find_active_path(const IdGraph& g, const NodeId& a, const NodeId& b,
                                           const std::set<NodeId>& z);

/// Excises loops from a walk whose colliders all have descendants in z and
/// whose non-colliders are outside z, yielding an active path between the
/// walk's endpoints. Throws HypothesisViolated when the walk does not meet
/// that condition.
TracedPath walk_to_active_path(const IdGraph& g, const WalkWithRepetition& w,
                               const std::set<NodeId>& z);

}  // namespace idvoi
