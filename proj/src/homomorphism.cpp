#include "idvoi/homomorphism.hpp"

#include <algorithm>

#include "idvoi/errors.hpp"

namespace idvoi {

const NodeId& IdHom::apply(const NodeId& v) const {
    auto it = map.find(v);
    if (it == map.end()) throw Error("PartialMap", "node '" + v + "' has no image");
    return it->second;
}

std::vector<NodeId> IdHom::preimage(const NodeId& v) const {
    std::vector<NodeId> out;
    for (const auto& [s, t] : map)
        if (t == v) out.push_back(s);
    return out;
}

IdHom IdHom::identity(const IdGraph& g) {
    IdHom h;
    h.source = g;
    h.target = g;
    for (const auto& [n, k] : g.nodes()) h.map[n] = n;
    verify(h);
    return h;
}

HomVerdict verify(IdHom& h) {
    h.verified = false;
    for (const auto& [n, k] : h.source.nodes()) {
        auto it = h.map.find(n);
        if (it == h.map.end()) throw Error("PartialMap", "source node '" + n + "' unmapped");
        if (!h.target.has_node(it->second))
            throw Error("PartialMap", "image '" + it->second + "' of '" + n + "' not in target");
    }
    for (const auto& [n, t] : h.map)
        if (!h.source.has_node(n)) throw Error("PartialMap", "map key '" + n + "' not in source");

    HomVerdict verdict;
    // (a) preserves node types
    for (const auto& [n, k] : h.source.nodes()) {
        if (h.target.kind(h.map.at(n)) != k)
            verdict.violations.push_back(
                {'a', {n}, "kind of '" + n + "' differs from its image '" + h.map.at(n) + "'"});
    }
    // (b) preserves links
    for (const auto& [a, b] : h.source.edges()) {
        const NodeId& ha = h.map.at(a);
        const NodeId& hb = h.map.at(b);
        if (ha != hb && !h.target.has_edge(ha, hb))
            verdict.violations.push_back(
                {'b', {a, b}, "edge " + a + " -> " + b + " has no counterpart " + ha + " -> " + hb});
    }
    // (c) covers all infolinks
    for (const auto& d : h.source.decision_nodes()) {
        const NodeId& hd = h.map.at(d);
        for (const auto& [n, k] : h.source.nodes()) {
            if (h.target.has_edge(h.map.at(n), hd) && !h.source.has_edge(n, d))
                verdict.violations.push_back(
                    {'c', {n, d}, "target edge " + h.map.at(n) + " -> " + hd + " not covered by " + n +
                                      " -> " + d});
        }
    }
    // (d) combines only linked decisions
    auto decisions = h.source.decision_nodes();
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        for (std::size_t j = i + 1; j < decisions.size(); ++j) {
            const NodeId& d1 = decisions[i];
            const NodeId& d2 = decisions[j];
            if (h.map.at(d1) == h.map.at(d2) && !h.source.has_edge(d1, d2) && !h.source.has_edge(d2, d1))
                verdict.violations.push_back(
                    {'d', {d1, d2}, "decisions '" + d1 + "' and '" + d2 + "' merge without a link"});
        }
    }
    h.verified = verdict.ok();
    return verdict;
}

IdHom compose(const IdHom& outer, const IdHom& inner) {
    if (!(inner.target == outer.source))
        throw Error("DomainMismatch", "inner target differs from outer source");
    if (!inner.verified || !outer.verified)
        throw Error("DomainMismatch", "compose requires verified homomorphisms");
    IdHom out;
    out.source = inner.source;
    out.target = outer.target;
    for (const auto& [n, mid] : inner.map) out.map[n] = outer.map.at(mid);
    HomVerdict v = verify(out);
    if (!v.ok()) throw Error("DomainMismatch", "composition failed verification");
    return out;
}

std::pair<IdGraph, IdHom> copy_delete_transform(const IdGraph& g, const CopySpec& spec) {
    // Resolve the copy list of every node; absent means keep verbatim.
    std::map<NodeId, std::vector<NodeId>> copies;
    std::set<NodeId> used;
    for (const auto& [n, k] : g.nodes()) {
        auto it = spec.copies.find(n);
        std::vector<NodeId> cs = it == spec.copies.end() ? std::vector<NodeId>{n} : it->second;
        for (const auto& c : cs) {
            if (!used.insert(c).second)
                throw Error("OverlappingCopySets", "copy name '" + c + "' used twice");
        }
        copies[n] = std::move(cs);
    }
    for (const auto& [n, cs] : spec.copies)
        if (!g.has_node(n)) throw Error("UnknownNode", "copy spec names unknown node '" + n + "'");

    std::vector<std::pair<NodeId, NodeKind>> nodes;
    std::map<NodeId, NodeId> back;
    for (const auto& [orig, cs] : copies) {
        for (const auto& c : cs) {
            nodes.push_back({c, g.kind(orig)});
            back[c] = orig;
        }
    }
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const auto& [a, b] : g.edges())
        for (const auto& ca : copies.at(a))
            for (const auto& cb : copies.at(b)) edges.push_back({ca, cb});
    for (const auto& [orig, cs] : copies) {
        if (g.kind(orig) == NodeKind::Utility) continue;
        for (std::size_t i = 0; i < cs.size(); ++i)
            for (std::size_t j = i + 1; j < cs.size(); ++j) edges.push_back({cs[i], cs[j]});
    }
    IdGraph out = IdGraph::build(nodes, edges);
    IdHom h;
    h.source = out;
    h.target = g;
    h.map = std::move(back);
    HomVerdict v = verify(h);
    if (!v.ok()) throw Error("OverlappingCopySets", "copy transform failed hom verification");
    return {std::move(out), std::move(h)};
}

std::pair<IdGraph, IdHom> prune_links(const IdGraph& g,
                                      const std::set<std::pair<NodeId, NodeId>>& keep) {
    for (const auto& e : keep)
        if (!g.has_edge(e.first, e.second))
            throw Error("NoSuchEdge", "keep set has edge " + e.first + " -> " + e.second + " not in graph");
    for (const auto& [a, b] : g.edges()) {
        if (g.is_decision(b) && !keep.count({a, b}))
            throw Error("DroppedInfolink", "infolink " + a + " -> " + b + " missing from keep set");
    }
    std::vector<std::pair<NodeId, NodeKind>> nodes(g.nodes().begin(), g.nodes().end());
    std::vector<std::pair<NodeId, NodeId>> edges(keep.begin(), keep.end());
    IdGraph out = IdGraph::build(nodes, edges);
    IdHom h;
    h.source = out;
    h.target = g;
    for (const auto& [n, k] : g.nodes()) h.map[n] = n;
    verify(h);
    return {std::move(out), std::move(h)};
}

}  // namespace idvoi
