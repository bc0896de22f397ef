#include "idvoi/separation.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "idvoi/errors.hpp"

namespace idvoi {

bool TracedPath::contains(const NodeId& v) const {
    return std::find(nodes.begin(), nodes.end(), v) != nodes.end();
}

bool TracedPath::is_directed() const {
    for (const auto& s : steps)
        if (!s.forward) return false;
    return true;
}

std::string TracedPath::str() const {
    std::string out = nodes.empty() ? "" : nodes[0];
    for (std::size_t i = 0; i < steps.size(); ++i) {
        out += steps[i].forward ? " -> " : " <- ";
        out += nodes[i + 1];
    }
    return out;
}

bool operator==(const TracedPath& a, const TracedPath& b) {
    if (a.nodes != b.nodes) return false;
    if (a.steps.size() != b.steps.size()) return false;
    for (std::size_t i = 0; i < a.steps.size(); ++i)
        if (a.steps[i].forward != b.steps[i].forward) return false;
    return true;
}

TracedPath trace_path(const IdGraph& g, const std::vector<NodeId>& nodes) {
    if (nodes.empty()) throw Error("InvalidPath", "empty node sequence");
    TracedPath p;
    p.nodes = nodes;
    std::set<NodeId> seen;
    for (const auto& n : nodes) {
        if (!g.has_node(n)) throw Error("InvalidPath", "unknown node '" + n + "'");
        if (!seen.insert(n).second) throw Error("InvalidPath", "node '" + n + "' repeats on path");
    }
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (g.has_edge(nodes[i], nodes[i + 1]))
            p.steps.push_back({true});
        else if (g.has_edge(nodes[i + 1], nodes[i]))
            p.steps.push_back({false});
        else
            throw Error("InvalidPath", "no edge between '" + nodes[i] + "' and '" + nodes[i + 1] + "'");
    }
    return p;
}

WalkWithRepetition make_walk(const IdGraph& g, const std::vector<NodeId>& nodes) {
    if (nodes.empty()) throw Error("InvalidPath", "empty walk");
    WalkWithRepetition w;
    w.nodes = nodes;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (nodes[i] == nodes[i + 1])
            w.steps.push_back(WalkStep::Stay);
        else if (g.has_edge(nodes[i], nodes[i + 1]))
            w.steps.push_back(WalkStep::Forward);
        else if (g.has_edge(nodes[i + 1], nodes[i]))
            w.steps.push_back(WalkStep::Backward);
        else
            throw Error("InvalidPath", "walk step " + nodes[i] + " / " + nodes[i + 1] + " is not an edge");
    }
    return w;
}

namespace {

bool has_descendant_in(const IdGraph& g, const NodeId& v, const std::set<NodeId>& z) {
    if (z.count(v)) return true;
    for (const auto& d : g.descendants(v))
        if (z.count(d)) return true;
    return false;
}

}  // namespace

bool is_active_path(const IdGraph& g, const TracedPath& p, const std::set<NodeId>& z) {
    // revalidate: callers may hand-build paths
    trace_path(g, p.nodes);
    for (std::size_t i = 1; i + 1 < p.nodes.size(); ++i) {
        bool collider = p.steps[i - 1].forward && !p.steps[i].forward;
        if (collider) {
            if (!has_descendant_in(g, p.nodes[i], z)) return false;
        } else {
            if (z.count(p.nodes[i])) return false;
        }
    }
    return true;
}

namespace {

// Reachability states: we enter a node either along an arrow (at its head)
// or against one (at its tail). A collider is an at-head entry followed by
// an at-tail departure on another incoming edge.
enum Entry { AtHead = 0, AtTail = 1 };

struct SearchState {
    NodeId node;
    Entry entry;
};

}  // namespace

std::optional<TracedPath> find_active_path(const IdGraph& g, const NodeId& a, const NodeId& b,
                                           const std::set<NodeId>& z) {
    if (!g.has_node(a) || !g.has_node(b)) throw Error("UnknownNode", "endpoint not in graph");
    if (a == b) return std::nullopt;
    // Precompute "has a descendant in z" for collider activation.
    std::map<NodeId, bool> anc_of_z;
    for (const auto& [n, k] : g.nodes()) anc_of_z[n] = false;
    for (const auto& v : z) {
        if (!g.has_node(v)) throw Error("UnknownNode", "conditioning node '" + v + "' not in graph");
        anc_of_z[v] = true;
        for (const auto& w : g.ancestors(v)) anc_of_z[w] = true;
    }

    std::map<std::pair<NodeId, int>, std::pair<NodeId, int>> pred;  // state -> predecessor state
    std::deque<SearchState> queue;
    auto push = [&](const NodeId& n, Entry e, const NodeId& from, int from_entry) {
        auto key = std::make_pair(n, static_cast<int>(e));
        if (pred.count(key)) return;
        pred[key] = {from, from_entry};
        queue.push_back({n, e});
    };
    // Departures from the source are unconstrained.
    for (const auto& c : g.children(a)) push(c, AtHead, a, -1);
    for (const auto& p : g.parents(a)) push(p, AtTail, a, -1);

    std::optional<std::pair<NodeId, int>> goal;
    while (!queue.empty() && !goal) {
        SearchState cur = queue.front();
        queue.pop_front();
        if (cur.node == b) {
            goal = std::make_pair(cur.node, static_cast<int>(cur.entry));
            break;
        }
        bool conditioned = z.count(cur.node) != 0;
        if (cur.entry == AtHead) {
            // chain: continue to children if unconditioned
            if (!conditioned)
                for (const auto& c : g.children(cur.node)) push(c, AtHead, cur.node, AtHead);
            // collider: bounce to parents if some descendant is conditioned
            if (anc_of_z.at(cur.node))
                for (const auto& p : g.parents(cur.node)) push(p, AtTail, cur.node, AtHead);
        } else {
            if (!conditioned) {
                // fork: down to children; chain: up to parents
                for (const auto& c : g.children(cur.node)) push(c, AtHead, cur.node, AtTail);
                for (const auto& p : g.parents(cur.node)) push(p, AtTail, cur.node, AtTail);
            }
        }
    }
    if (!goal) return std::nullopt;

    // Reconstruct the walk (a node may appear under both entry directions),
    // then excise loops to obtain a genuine path.
    std::vector<NodeId> rev;
    std::pair<NodeId, int> cur = *goal;
    while (true) {
        rev.push_back(cur.first);
        auto prev = pred.at(cur);
        if (prev.second == -1) {
            rev.push_back(prev.first);
            break;
        }
        cur = prev;
    }
    std::reverse(rev.begin(), rev.end());
    WalkWithRepetition w = make_walk(g, rev);
    TracedPath path = walk_to_active_path(g, w, z);
    return path;
}

bool d_separated(const IdGraph& g, const std::set<NodeId>& a, const std::set<NodeId>& b,
                 const std::set<NodeId>& z) {
    std::set<NodeId> a2, b2;
    for (const auto& v : a)
        if (!z.count(v)) a2.insert(v);
    for (const auto& v : b)
        if (!z.count(v)) b2.insert(v);
    for (const auto& v : a2)
        if (b2.count(v)) return false;
    for (const auto& s : a2)
        for (const auto& t : b2)
            if (find_active_path(g, s, t, z)) return false;
    return true;
}

TracedPath walk_to_active_path(const IdGraph& g, const WalkWithRepetition& w,
                               const std::set<NodeId>& z) {
    // Drop stay steps first.
    std::vector<NodeId> seq;
    for (const auto& n : w.nodes) {
        if (!g.has_node(n)) throw Error("InvalidPath", "unknown node '" + n + "' on walk");
        if (seq.empty() || seq.back() != n) seq.push_back(n);
    }
    if (seq.empty()) throw Error("InvalidPath", "empty walk");
    auto forward = [&](const NodeId& x, const NodeId& y) {
        if (g.has_edge(x, y)) return true;
        if (g.has_edge(y, x)) return false;
        throw Error("InvalidPath", "walk step " + x + " / " + y + " is not an edge");
    };
    // Hypothesis check per occurrence on the de-stuttered walk.
    for (std::size_t i = 1; i + 1 < seq.size(); ++i) {
        bool in_fwd = forward(seq[i - 1], seq[i]);
        bool out_fwd = forward(seq[i], seq[i + 1]);
        bool collider = in_fwd && !out_fwd;
        if (collider) {
            if (!has_descendant_in(g, seq[i], z))
                throw Error("HypothesisViolated",
                            "collider '" + seq[i] + "' has no descendant in the conditioning set");
        } else if (z.count(seq[i])) {
            throw Error("HypothesisViolated", "non-collider '" + seq[i] + "' is conditioned on");
        }
    }
    // Excise every N ~~> N segment, keeping the last occurrence of each node.
    std::vector<NodeId> path;
    for (std::size_t i = 0; i < seq.size();) {
        std::size_t last = i;
        for (std::size_t j = i + 1; j < seq.size(); ++j)
            if (seq[j] == seq[i]) last = j;
        path.push_back(seq[i]);
        i = last + 1;
    }
    TracedPath out = trace_path(g, path);
    if (out.nodes.size() >= 2 && !is_active_path(g, out, z))
        throw Error("HypothesisViolated", "excised walk is not active");
    return out;
}

}  // namespace idvoi
