#include "idvoi/graph.hpp"

#include <algorithm>
#include <deque>

#include "idvoi/errors.hpp"

namespace idvoi {

std::string kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::Chance: return "chance";
        case NodeKind::Decision: return "decision";
        case NodeKind::Utility: return "utility";
    }
    return "chance";
}

NodeKind kind_from_name(const std::string& s) {
    if (s == "chance") return NodeKind::Chance;
    if (s == "decision") return NodeKind::Decision;
    if (s == "utility") return NodeKind::Utility;
    throw Error("BadNodeKind", "unknown node kind '" + s + "'");
}

IdGraph IdGraph::build(const std::vector<std::pair<NodeId, NodeKind>>& nodes,
                       const std::vector<std::pair<NodeId, NodeId>>& edges) {
    IdGraph g;
    for (const auto& [name, kind] : nodes) {
        if (name.empty()) throw Error("DuplicateNode", "empty node name");
        if (!g.kinds_.emplace(name, kind).second)
            throw Error("DuplicateNode", "node '" + name + "' declared twice");
    }
    for (const auto& [a, b] : edges) {
        if (!g.kinds_.count(a) || !g.kinds_.count(b))
            throw Error("DanglingEdge", "edge " + a + " -> " + b + " references undeclared node");
        if (g.kinds_.at(a) == NodeKind::Utility)
            throw Error("UtilityHasChild", "utility node '" + a + "' has outgoing edge to '" + b + "'");
        if (a == b) throw Error("CycleDetected", "self-loop on '" + a + "'");
        g.edges_.insert({a, b});
    }
    for (const auto& [name, kind] : g.kinds_) {
        g.parents_[name];
        g.children_[name];
    }
    for (const auto& [a, b] : g.edges_) {
        g.children_[a].push_back(b);
        g.parents_[b].push_back(a);
    }
    // edges_ is sorted, so adjacency lists come out sorted too
    g.topo_order();  // throws CycleDetected on a cycle
    return g;
}

NodeKind IdGraph::kind(const NodeId& v) const {
    require_node(v);
    return kinds_.at(v);
}

void IdGraph::require_node(const NodeId& v) const {
    if (!kinds_.count(v)) throw Error("UnknownNode", "no node named '" + v + "'");
}

bool IdGraph::has_edge(const NodeId& a, const NodeId& b) const { return edges_.count({a, b}) != 0; }

std::vector<std::pair<NodeId, NodeId>> IdGraph::edges() const {
    return {edges_.begin(), edges_.end()};
}

const std::vector<NodeId>& IdGraph::parents(const NodeId& v) const {
    require_node(v);
    return parents_.at(v);
}

const std::vector<NodeId>& IdGraph::children(const NodeId& v) const {
    require_node(v);
    return children_.at(v);
}

std::set<NodeId> IdGraph::family(const NodeId& v) const {
    const auto& pa = parents(v);
    std::set<NodeId> out(pa.begin(), pa.end());
    out.insert(v);
    return out;
}

std::set<NodeId> IdGraph::descendants(const NodeId& v) const {
    require_node(v);
    std::set<NodeId> out;
    std::deque<NodeId> queue(children_.at(v).begin(), children_.at(v).end());
    while (!queue.empty()) {
        NodeId cur = queue.front();
        queue.pop_front();
        if (!out.insert(cur).second) continue;
        for (const auto& c : children_.at(cur)) queue.push_back(c);
    }
    return out;
}

std::set<NodeId> IdGraph::ancestors(const NodeId& v) const {
    require_node(v);
    std::set<NodeId> out;
    std::deque<NodeId> queue(parents_.at(v).begin(), parents_.at(v).end());
    while (!queue.empty()) {
        NodeId cur = queue.front();
        queue.pop_front();
        if (!out.insert(cur).second) continue;
        for (const auto& p : parents_.at(cur)) queue.push_back(p);
    }
    return out;
}

std::set<NodeId> IdGraph::utility_reach(const NodeId& d) const {
    if (kind(d) != NodeKind::Decision) throw Error("NotADecision", "'" + d + "' is not a decision");
    std::set<NodeId> out;
    for (const auto& v : descendants(d)) {
        if (kinds_.at(v) == NodeKind::Utility) out.insert(v);
    }
    return out;
}

std::vector<NodeId> IdGraph::chance_nodes() const {
    std::vector<NodeId> out;
    for (const auto& [n, k] : kinds_)
        if (k == NodeKind::Chance) out.push_back(n);
    return out;
}

std::vector<NodeId> IdGraph::decision_nodes() const {
    std::vector<NodeId> out;
    for (const auto& [n, k] : kinds_)
        if (k == NodeKind::Decision) out.push_back(n);
    return out;
}

std::vector<NodeId> IdGraph::utility_nodes() const {
    std::vector<NodeId> out;
    for (const auto& [n, k] : kinds_)
        if (k == NodeKind::Utility) out.push_back(n);
    return out;
}

std::vector<NodeId> IdGraph::topo_order() const {
    std::map<NodeId, std::size_t> indegree;
    for (const auto& [n, k] : kinds_) indegree[n] = parents_.at(n).size();
    std::set<NodeId> ready;
    for (const auto& [n, d] : indegree)
        if (d == 0) ready.insert(n);
    std::vector<NodeId> out;
    while (!ready.empty()) {
        NodeId cur = *ready.begin();
        ready.erase(ready.begin());
        out.push_back(cur);
        for (const auto& c : children_.at(cur)) {
            if (--indegree[c] == 0) ready.insert(c);
        }
    }
    if (out.size() != kinds_.size()) throw Error("CycleDetected", "graph has a directed cycle");
    return out;
}

IdGraph IdGraph::with_edge_removed(const NodeId& a, const NodeId& b) const {
    if (!has_edge(a, b)) throw Error("NoSuchEdge", "edge " + a + " -> " + b + " not in graph");
    std::vector<std::pair<NodeId, NodeKind>> ns(kinds_.begin(), kinds_.end());
    std::vector<std::pair<NodeId, NodeId>> es;
    for (const auto& e : edges_)
        if (e != std::make_pair(a, b)) es.push_back(e);
    return build(ns, es);
}

IdGraph IdGraph::with_edge_added(const NodeId& a, const NodeId& b) const {
    std::vector<std::pair<NodeId, NodeKind>> ns(kinds_.begin(), kinds_.end());
    std::vector<std::pair<NodeId, NodeId>> es(edges_.begin(), edges_.end());
    es.push_back({a, b});
    return build(ns, es);
}

NodeId fresh_name(const std::set<NodeId>& taken, const NodeId& base, const std::string& tag) {
    NodeId candidate = base + "__" + tag;
    if (!taken.count(candidate)) return candidate;
    for (int i = 2;; ++i) {
        NodeId numbered = candidate + "_" + std::to_string(i);
        if (!taken.count(numbered)) return numbered;
    }
}

MappingExtension mapping_extension(const IdGraph& g) {
    std::set<NodeId> taken;
    for (const auto& [n, k] : g.nodes()) taken.insert(n);
    std::vector<std::pair<NodeId, NodeKind>> nodes(g.nodes().begin(), g.nodes().end());
    std::vector<std::pair<NodeId, NodeId>> edges = g.edges();
    MappingExtension out;
    for (const auto& d : g.decision_nodes()) {
        NodeId pi = "Pi__" + d;
        if (taken.count(pi)) throw Error("NameCollision", "fresh name '" + pi + "' already in use");
        taken.insert(pi);
        nodes.push_back({pi, NodeKind::Chance});
        edges.push_back({pi, d});
        out.policy_nodes[d] = pi;
    }
    out.graph = IdGraph::build(nodes, edges);
    return out;
}

}  // namespace idvoi
