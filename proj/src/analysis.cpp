#include "idvoi/analysis.hpp"

#include <algorithm>

#include "idvoi/errors.hpp"

namespace idvoi {

namespace {

// R(j,i): placing decision j before decision i is admissible.
struct PairwiseRelation {
    std::vector<NodeId> decisions;
    std::vector<std::vector<bool>> ok;
};

PairwiseRelation pairwise_relation(const IdGraph& g, const MappingExtension& ext) {
    PairwiseRelation r;
    r.decisions = g.decision_nodes();
    const std::size_t n = r.decisions.size();
    r.ok.assign(n, std::vector<bool>(n, true));
    for (std::size_t i = 0; i < n; ++i) {
        std::set<NodeId> reach = ext.graph.utility_reach(r.decisions[i]);
        std::set<NodeId> given = ext.graph.family(r.decisions[i]);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            r.ok[j][i] =
                d_separated(ext.graph, {ext.policy_nodes.at(r.decisions[j])}, reach, given);
        }
    }
    return r;
}

bool order_search(const PairwiseRelation& r, std::vector<std::size_t>& placed,
                  std::vector<bool>& used, std::size_t& best_depth, std::size_t& blocked_j,
                  std::size_t& blocked_i) {
    const std::size_t n = r.decisions.size();
    if (placed.size() == n) return true;
    for (std::size_t cand = 0; cand < n; ++cand) {
        if (used[cand]) continue;
        bool fits = true;
        for (std::size_t j : placed) {
            if (!r.ok[j][cand]) {
                if (placed.size() >= best_depth) {
                    best_depth = placed.size();
                    blocked_j = j;
                    blocked_i = cand;
                }
                fits = false;
                break;
            }
        }
        if (!fits) continue;
        placed.push_back(cand);
        used[cand] = true;
        if (order_search(r, placed, used, best_depth, blocked_j, blocked_i)) return true;
        used[cand] = false;
        placed.pop_back();
    }
    return false;
}

}  // namespace

SolubilityResult is_soluble(const IdGraph& g) {
    SolubilityResult out;
    MappingExtension ext = mapping_extension(g);
    PairwiseRelation r = pairwise_relation(g, ext);
    const std::size_t n = r.decisions.size();
    if (n == 0) {
        out.soluble = true;
        return out;
    }
    std::vector<std::size_t> placed;
    std::vector<bool> used(n, false);
    std::size_t best_depth = 0, bj = 0, bi = 0;
    if (order_search(r, placed, used, best_depth, bj, bi)) {
        out.soluble = true;
        for (std::size_t idx : placed) out.ordering.push_back(r.decisions[idx]);
        return out;
    }
    out.soluble = false;
    const NodeId& pi = ext.policy_nodes.at(r.decisions[bj]);
    SolubilityResult::FailingPair fp;
    fp.policy_node = pi;
    fp.decision = r.decisions[bi];
    std::set<NodeId> given = ext.graph.family(r.decisions[bi]);
    for (const auto& u : ext.graph.utility_reach(r.decisions[bi])) {
        if (auto p = find_active_path(ext.graph, pi, u, given)) {
            fp.witness = *p;
            break;
        }
    }
    out.failing_pair = fp;
    return out;
}

bool requisite(const IdGraph& g, const NodeId& x, const NodeId& d) {
    if (!g.is_decision(d)) throw Error("NotADecision", "'" + d + "' is not a decision");
    if (!g.has_edge(x, d)) throw Error("NoSuchInfolink", "no infolink " + x + " -> " + d);
    std::set<NodeId> given = g.family(d);
    given.erase(x);
    return !d_separated(g, {x}, g.utility_reach(d), given);
}

std::pair<IdGraph, ReductionTrace> minimal_d_reduction(const IdGraph& g) {
    IdGraph cur = g;
    ReductionTrace trace;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [a, b] : cur.edges()) {
            if (!cur.is_decision(b)) continue;
            if (!requisite(cur, a, b)) {
                ReductionTrace::Removal rem;
                rem.from = a;
                rem.to = b;
                rem.utilities = cur.utility_reach(b);
                rem.given = cur.family(b);
                rem.given.erase(a);
                trace.removals.push_back(std::move(rem));
                cur = cur.with_edge_removed(a, b);
                changed = true;
                break;  // rescan from the top so removal order is deterministic
            }
        }
    }
    return {std::move(cur), std::move(trace)};
}

CriterionResult voi_criterion(const IdGraph& g, const NodeId& x, const NodeId& d) {
    if (!g.has_node(x)) throw Error("UnknownNode", "no node named '" + x + "'");
    if (!g.is_decision(d)) throw Error("NotADecision", "'" + d + "' is not a decision");
    if (g.is_decision(x))
        return {CriterionVerdict::NotApplicable, "decision parent: criterion is incomplete for decisions"};
    if (g.is_utility(x)) return {CriterionVerdict::NotApplicable, "utility nodes cannot be observed"};
    IdGraph work = g;
    if (!g.has_edge(x, d)) {
        if (g.descendants(d).count(x))
            return {CriterionVerdict::NotApplicable, "adding " + x + " -> " + d + " would create a cycle"};
        work = g.with_edge_added(x, d);
    }
    if (!is_soluble(work).soluble)
        return {CriterionVerdict::NotApplicable, "graph (with the infolink present) is insoluble"};
    IdGraph reduced = minimal_d_reduction(work).first;
    if (reduced.has_edge(x, d)) return {CriterionVerdict::Positive, ""};
    return {CriterionVerdict::Zero, ""};
}

CriterionResult voc_criterion(const IdGraph& g, const NodeId& x) {
    if (!g.has_node(x)) throw Error("UnknownNode", "no node named '" + x + "'");
    if (!g.is_chance(x)) throw Error("NotAChanceNode", "'" + x + "' is not a chance node");
    if (!is_soluble(g).soluble) return {CriterionVerdict::NotApplicable, "graph is insoluble"};
    IdGraph reduced = minimal_d_reduction(g).first;
    // directed path from x to a utility inside the reduced edge set
    std::set<NodeId> visited;
    std::vector<NodeId> stack{x};
    while (!stack.empty()) {
        NodeId cur = stack.back();
        stack.pop_back();
        if (!visited.insert(cur).second) continue;
        if (reduced.is_utility(cur)) return {CriterionVerdict::Positive, ""};
        for (const auto& c : reduced.children(cur)) stack.push_back(c);
    }
    return {CriterionVerdict::Zero, ""};
}

}  // namespace idvoi
