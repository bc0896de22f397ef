#include "idvoi/systems.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "idvoi/analysis.hpp"
#include "idvoi/errors.hpp"

namespace idvoi {

namespace {

bool is_collider_at(const TracedPath& p, std::size_t i) {
    return i > 0 && i + 1 < p.nodes.size() && p.steps[i - 1].forward && !p.steps[i].forward;
}

bool is_fork_at(const TracedPath& p, std::size_t i) {
    return i > 0 && i + 1 < p.nodes.size() && !p.steps[i - 1].forward && p.steps[i].forward;
}

std::vector<NodeId> colliders_of(const TracedPath& p) {
    std::vector<NodeId> out;
    for (std::size_t i = 1; i + 1 < p.nodes.size(); ++i)
        if (is_collider_at(p, i)) out.push_back(p.nodes[i]);
    return out;
}

}  // namespace

std::set<NodeId> System::nodes() const {
    std::set<NodeId> out(info.nodes.begin(), info.nodes.end());
    out.insert(control.nodes.begin(), control.nodes.end());
    for (const auto& [c, p] : obs) out.insert(p.nodes.begin(), p.nodes.end());
    return out;
}

const TracedPath& SystemTree::path(const PathRef& ref) const {
    const System& s = systems.at(ref.system);
    switch (ref.kind) {
        case PathKind::Info: return s.info;
        case PathKind::Control: return s.control;
        case PathKind::Obs: return s.obs.at(ref.collider);
    }
    throw Error("InvalidTree", "bad path reference");
}

std::vector<std::size_t> SystemTree::children(std::size_t i) const {
    std::vector<std::size_t> out;
    for (const auto& [child, ref] : pred)
        if (ref.system == i && child != i) out.push_back(child);
    return out;
}

std::vector<std::size_t> SystemTree::subtree(std::size_t i) const {
    std::vector<std::size_t> out{i};
    for (std::size_t k = 0; k < out.size(); ++k)
        for (std::size_t c : children(out[k])) out.push_back(c);
    std::sort(out.begin(), out.end());
    return out;
}

SystemElements elements(const System& s) {
    SystemElements out;
    for (const auto& [c, p] : s.obs) {
        out.obs_nodes.insert(p.nodes.size() >= 2 ? p.nodes[p.nodes.size() - 2] : p.nodes.back());
    }
    std::optional<std::size_t> q_pos;
    for (std::size_t i = 1; i + 1 < s.info.nodes.size(); ++i)
        if (is_fork_at(s.info, i)) q_pos = i;
    if (q_pos) {
        out.question = s.info.nodes[*q_pos];
        for (std::size_t i = 0; i <= *q_pos; ++i) out.back.insert(s.info.nodes[i]);
        for (const auto& [c, p] : s.obs) out.back.insert(p.nodes.begin(), p.nodes.end());
        out.back.erase(s.d);
    }
    for (const auto& n : s.nodes())
        if (!out.back.count(n)) out.front.insert(n);
    return out;
}

std::vector<std::string> validate_system(const IdGraph& g, const System& s) {
    std::vector<std::string> problems;
    auto check_path = [&](const TracedPath& p, const std::string& what) -> bool {
        try {
            TracedPath traced = trace_path(g, p.nodes);
            if (!(traced == p)) {
                problems.push_back(what + " has wrong step directions");
                return false;
            }
        } catch (const Error& e) {
            problems.push_back(what + ": " + e.what());
            return false;
        }
        return true;
    };
    if (!g.has_node(s.x) || !g.has_node(s.d) || !g.has_node(s.u)) {
        problems.push_back("system references unknown nodes");
        return problems;
    }
    if (!g.is_decision(s.d)) problems.push_back("'" + s.d + "' is not a decision");
    if (!g.is_utility(s.u)) problems.push_back("'" + s.u + "' is not a utility node");
    if (!g.has_edge(s.x, s.d)) problems.push_back("missing infolink " + s.x + " -> " + s.d);

    if (check_path(s.control, "control path")) {
        if (!s.control.is_directed() || s.control.first() != s.d || s.control.last() != s.u ||
            s.control.length() == 0)
            problems.push_back("control path must run directed from the decision to the utility");
    }
    if (check_path(s.info, "info path")) {
        if (s.info.first() != s.x || s.info.last() != s.u)
            problems.push_back("info path must run from the info node to the system utility");
        std::set<NodeId> given = g.family(s.d);
        given.erase(s.x);
        if (!is_active_path(g, s.info, given))
            problems.push_back("info path is not active given Fa(d) minus the info node");
        std::vector<NodeId> info_colliders = colliders_of(s.info);
        std::set<NodeId> expected(info_colliders.begin(), info_colliders.end());
        std::set<NodeId> got;
        for (const auto& [c, p] : s.obs) got.insert(c);
        if (expected != got) problems.push_back("obs paths do not match the info path colliders");
    }
    for (const auto& [c, p] : s.obs) {
        if (!check_path(p, "obs path from '" + c + "'")) continue;
        if (p.first() != c || p.last() != s.d || !p.is_directed()) {
            problems.push_back("obs path from '" + c + "' must run directed to the decision");
            continue;
        }
        auto shortest = shortest_directed_path(g, c, s.d);
        if (!shortest || shortest->length() != p.length())
            problems.push_back("obs path from '" + c + "' is not minimal length");
    }
    return problems;
}

std::optional<TracedPath> shortest_directed_path(const IdGraph& g, const NodeId& a, const NodeId& b) {
    if (a == b) return trace_path(g, {a});
    std::map<NodeId, NodeId> parent;
    std::deque<NodeId> queue{a};
    parent[a] = a;
    while (!queue.empty()) {
        NodeId cur = queue.front();
        queue.pop_front();
        if (cur == b) break;
        for (const auto& c : g.children(cur)) {
            if (parent.count(c)) continue;
            parent[c] = cur;
            queue.push_back(c);
        }
    }
    if (!parent.count(b)) return std::nullopt;
    std::vector<NodeId> nodes;
    for (NodeId cur = b; cur != a; cur = parent.at(cur)) nodes.push_back(cur);
    nodes.push_back(a);
    std::reverse(nodes.begin(), nodes.end());
    return trace_path(g, nodes);
}

namespace {

// Minimal obs path from collider c to decision d; among equal-length
// candidates, one avoiding x is preferred (x relaying an obs value would
// put a prior where the construction needs a copy).
TracedPath obs_path_for(const IdGraph& g, const NodeId& c, const NodeId& d, const NodeId& x) {
    auto direct = shortest_directed_path(g, c, d);
    if (!direct) throw Error("InvalidPath", "collider '" + c + "' has no directed path to '" + d + "'");
    if (c == x || d == x || !direct->contains(x)) return *direct;
    std::vector<std::pair<NodeId, NodeKind>> nodes;
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const auto& [n, k] : g.nodes())
        if (n != x) nodes.push_back({n, k});
    for (const auto& [p, q] : g.edges())
        if (p != x && q != x) edges.push_back({p, q});
    IdGraph without = IdGraph::build(nodes, edges);
    auto avoid = shortest_directed_path(without, c, d);
    if (avoid && avoid->length() == direct->length()) return trace_path(g, avoid->nodes);
    return *direct;
}

}  // namespace

System construct_system(const IdGraph& gstar, const NodeId& x, const NodeId& d) {
    if (!gstar.has_edge(x, d) || !gstar.is_decision(d) || !requisite(gstar, x, d))
        throw Error("NotRequisite", "infolink " + x + " -> " + d + " is not requisite");
    std::set<NodeId> given = gstar.family(d);
    given.erase(x);
    std::optional<TracedPath> best_info;
    NodeId best_u;
    for (const auto& u : gstar.utility_reach(d)) {
        auto p = find_active_path(gstar, x, u, given);
        if (!p) continue;
        if (!best_info || p->length() < best_info->length() ||
            (p->length() == best_info->length() && p->nodes < best_info->nodes)) {
            best_info = p;
            best_u = u;
        }
    }
    if (!best_info) throw Error("NotRequisite", "no active info path found for " + x + " -> " + d);
    System s;
    s.x = x;
    s.d = d;
    s.u = best_u;
    s.info = *best_info;
    auto control = shortest_directed_path(gstar, d, best_u);
    if (!control) throw Error("NotRequisite", "no directed control path " + d + " -> " + best_u);
    s.control = *control;
    for (const auto& c : colliders_of(s.info)) s.obs[c] = obs_path_for(gstar, c, d, x);
    return s;
}

SystemTree build_full_tree(const IdGraph& gstar, const NodeId& x, const NodeId& d) {
    SystemTree t;
    t.systems.push_back(construct_system(gstar, x, d));
    t.root = 0;
    std::map<std::pair<NodeId, NodeId>, std::size_t> owner;
    owner[{x, d}] = 0;
    for (std::size_t k = 0; k < t.systems.size(); ++k) {
        std::vector<PathRef> refs{{k, PathKind::Info, ""}, {k, PathKind::Control, ""}};
        for (const auto& [c, p] : t.systems[k].obs) refs.push_back({k, PathKind::Obs, c});
        for (const auto& ref : refs) {
            // copy: growing t.systems below invalidates references into it
            const TracedPath p = t.path(ref);
            const NodeId own_decision = t.systems[k].d;
            for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
                if (!p.steps[i].forward || !gstar.is_decision(p.nodes[i + 1])) continue;
                // links into the system's own decision (obs path endings)
                // are served by the system itself
                if (p.nodes[i + 1] == own_decision) continue;
                std::pair<NodeId, NodeId> link{p.nodes[i], p.nodes[i + 1]};
                if (owner.count(link)) continue;
                owner[link] = t.systems.size();
                t.pred[t.systems.size()] = ref;
                t.systems.push_back(construct_system(gstar, link.first, link.second));
            }
        }
    }
    return t;
}

std::vector<std::string> validate_tree(const IdGraph& g, const SystemTree& t) {
    std::vector<std::string> problems;
    if (t.systems.empty()) {
        problems.push_back("tree has no systems");
        return problems;
    }
    if (t.root >= t.systems.size()) problems.push_back("root index out of range");
    for (std::size_t k = 0; k < t.systems.size(); ++k) {
        for (const auto& msg : validate_system(g, t.systems[k]))
            problems.push_back("system " + std::to_string(k) + ": " + msg);
        if (k == t.root) {
            if (t.pred.count(k)) problems.push_back("root must not have a predecessor entry");
            continue;
        }
        auto it = t.pred.find(k);
        if (it == t.pred.end()) {
            problems.push_back("system " + std::to_string(k) + " lacks a predecessor");
            continue;
        }
        if (it->second.system >= t.systems.size() || it->second.system == k) {
            problems.push_back("system " + std::to_string(k) + " has a bad predecessor index");
            continue;
        }
        const TracedPath& pp = t.path(it->second);
        const System& s = t.systems[k];
        bool on_pred = false;
        for (std::size_t i = 0; i + 1 < pp.nodes.size(); ++i)
            if (pp.steps[i].forward && pp.nodes[i] == s.x && pp.nodes[i + 1] == s.d) on_pred = true;
        if (!on_pred)
            problems.push_back("system " + std::to_string(k) + "'s infolink is not on its predecessor path");
    }
    // every system must reach the root through pred
    for (std::size_t k = 0; k < t.systems.size(); ++k) {
        std::set<std::size_t> seen;
        std::size_t cur = k;
        while (cur != t.root) {
            if (!seen.insert(cur).second || !t.pred.count(cur)) {
                problems.push_back("system " + std::to_string(k) + " does not reach the root");
                break;
            }
            cur = t.pred.at(cur).system;
        }
    }
    return problems;
}

namespace {

struct SlotTable {
    // slot = (system, path token, position); per node, the slot ids
    std::map<NodeId, std::vector<std::size_t>> node_slots;
    std::map<std::string, std::size_t> slot_ids;
    std::vector<std::size_t> dsu;

    std::size_t find(std::size_t v) {
        while (dsu[v] != v) v = dsu[v] = dsu[dsu[v]];
        return v;
    }
    void unite(std::size_t a, std::size_t b) { dsu[find(a)] = find(b); }

    static std::string token(const PathRef& ref) {
        switch (ref.kind) {
            case PathKind::Info: return std::to_string(ref.system) + ":i";
            case PathKind::Control: return std::to_string(ref.system) + ":c";
            case PathKind::Obs: return std::to_string(ref.system) + ":o:" + ref.collider;
        }
        return "";
    }

    std::size_t slot(const PathRef& ref, std::size_t pos) {
        std::string key = token(ref) + "@" + std::to_string(pos);
        auto it = slot_ids.find(key);
        if (it != slot_ids.end()) return it->second;
        std::size_t id = dsu.size();
        slot_ids[key] = id;
        dsu.push_back(id);
        return id;
    }
};

std::vector<PathRef> all_path_refs(const SystemTree& t) {
    std::vector<PathRef> refs;
    for (std::size_t k = 0; k < t.systems.size(); ++k) {
        refs.push_back({k, PathKind::Info, ""});
        refs.push_back({k, PathKind::Control, ""});
        for (const auto& [c, p] : t.systems[k].obs) refs.push_back({k, PathKind::Obs, c});
    }
    return refs;
}

std::optional<std::size_t> position_on(const TracedPath& p, const NodeId& n) {
    for (std::size_t i = 0; i < p.nodes.size(); ++i)
        if (p.nodes[i] == n) return i;
    return std::nullopt;
}

bool edge_on_path(const TracedPath& p, const NodeId& a, const NodeId& b) {
    for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
        if ((p.nodes[i] == a && p.nodes[i + 1] == b && p.steps[i].forward) ||
            (p.nodes[i] == b && p.nodes[i + 1] == a && !p.steps[i].forward))
            return true;
    }
    return false;
}

}  // namespace

std::set<NodeId> tree_interior_nodes(const SystemTree& t) {
    std::set<NodeId> out;
    for (const auto& s : t.systems) {
        auto ns = s.nodes();
        out.insert(ns.begin(), ns.end());
    }
    out.erase(t.systems[t.root].x);
    out.erase(t.systems[t.root].d);
    return out;
}

NormalFormVerdict normal_form_check(const IdGraph& g, const SystemTree& t) {
    NormalFormVerdict out;
    std::vector<std::string> tree_problems = validate_tree(g, t);
    if (!tree_problems.empty()) {
        out.witnesses = tree_problems;
        return out;
    }

    // (a) position-in-tree-uniqueness via slot merging
    SlotTable slots;
    for (const auto& ref : all_path_refs(t)) {
        const TracedPath& p = t.path(ref);
        for (std::size_t i = 0; i < p.nodes.size(); ++i)
            slots.node_slots[p.nodes[i]].push_back(slots.slot(ref, i));
    }
    for (std::size_t k = 0; k < t.systems.size(); ++k) {
        const System& s = t.systems[k];
        PathRef iref{k, PathKind::Info, ""}, cref{k, PathKind::Control, ""};
        // collider heads its own obs path
        for (const auto& [c, p] : s.obs) {
            auto pos = position_on(s.info, c);
            if (pos) slots.unite(slots.slot(iref, *pos), slots.slot({k, PathKind::Obs, c}, 0));
        }
        // the system utility ends both the info and the control path
        slots.unite(slots.slot(iref, s.info.nodes.size() - 1),
                    slots.slot(cref, s.control.nodes.size() - 1));
        // the decision starts the control path and ends every obs path
        for (const auto& [c, p] : s.obs)
            slots.unite(slots.slot(cref, 0), slots.slot({k, PathKind::Obs, c}, p.nodes.size() - 1));
        if (k == t.root) {
            // root infolink nodes stay verbatim across the root's own paths
            for (const auto& ref : all_path_refs(t)) {
                if (ref.system != k) continue;
                const TracedPath& p = t.path(ref);
                for (std::size_t i = 0; i < p.nodes.size(); ++i) {
                    if (p.nodes[i] == s.x) slots.unite(slots.slot(iref, 0), slots.slot(ref, i));
                    if (p.nodes[i] == s.d) slots.unite(slots.slot(cref, 0), slots.slot(ref, i));
                }
            }
            continue;
        }
        // non-root: x and d are shared with the predecessor path
        const PathRef& pref = t.pred.at(k);
        const TracedPath& pp = t.path(pref);
        if (auto pos = position_on(pp, s.x)) slots.unite(slots.slot(iref, 0), slots.slot(pref, *pos));
        if (auto pos = position_on(pp, s.d)) slots.unite(slots.slot(cref, 0), slots.slot(pref, *pos));
    }
    out.position_uniqueness = true;
    for (auto& [node, ids] : slots.node_slots) {
        std::set<std::size_t> classes;
        for (std::size_t id : ids) classes.insert(slots.find(id));
        if (classes.size() > 1) {
            out.position_uniqueness = false;
            out.witnesses.push_back("(a) node '" + node + "' occupies " +
                                    std::to_string(classes.size()) + " distinct tree positions");
        }
    }

    // (b) every info path leaves its info node by an outgoing edge
    out.no_backdoor_infopaths = true;
    for (std::size_t k = 0; k < t.systems.size(); ++k) {
        if (!t.systems[k].info.steps.empty() && !t.systems[k].info.steps[0].forward) {
            out.no_backdoor_infopaths = false;
            out.witnesses.push_back("(b) system " + std::to_string(k) + " has a backdoor info path");
        }
    }

    // (c) edges incident to tree-interior nodes are within-tree or into decisions
    out.no_redundant_links = true;
    std::set<NodeId> interior = tree_interior_nodes(t);
    for (const auto& [a, b] : g.edges()) {
        if (g.is_decision(b)) continue;
        if (!interior.count(a) && !interior.count(b)) continue;
        bool within = false;
        for (const auto& ref : all_path_refs(t)) {
            if (edge_on_path(t.path(ref), a, b)) {
                within = true;
                break;
            }
        }
        for (const auto& s : t.systems)
            if (s.x == a && s.d == b) within = true;
        if (!within) {
            out.no_redundant_links = false;
            out.witnesses.push_back("(c) redundant link " + a + " -> " + b);
        }
    }
    return out;
}

bool knowledge_separation_check(const IdGraph& g, const SystemTree& t, std::size_t system) {
    NormalFormVerdict nf = normal_form_check(g, t);
    if (!nf.ok()) throw Error("NotNormalForm", "knowledge check requires a normal form tree");
    const System& s = t.systems.at(system);
    SystemElements el = elements(s);
    std::set<NodeId> obs_desc;
    for (std::size_t k : t.subtree(system)) {
        SystemElements ek = elements(t.systems[k]);
        obs_desc.insert(ek.obs_nodes.begin(), ek.obs_nodes.end());
    }
    std::set<NodeId> sys_nodes = s.nodes();
    std::set<NodeId> in_system, rest;
    for (const auto& p : g.parents(s.d)) {
        if (sys_nodes.count(p) || obs_desc.count(p))
            in_system.insert(p);
        else
            rest.insert(p);
    }
    std::set<NodeId> given = in_system;
    given.insert(obs_desc.begin(), obs_desc.end());
    return d_separated(g, el.back, rest, given);
}

bool no_infolinks_in_back_section(const IdGraph& g, const System& s) {
    SystemElements el = elements(s);
    for (const auto& n : el.back) {
        if (!g.is_decision(n)) continue;
        if (n != s.x) return false;
        if (s.info.steps.empty() || !s.info.steps[0].forward) return false;
        for (const auto& [c, p] : s.obs)
            if (p.contains(n)) return false;
    }
    return true;
}

bool infolinks_in_system_are_descendants(const IdGraph& g, const System& s) {
    std::set<NodeId> desc = g.descendants(s.d);
    std::vector<const TracedPath*> paths{&s.info, &s.control};
    for (const auto& [c, p] : s.obs) paths.push_back(&p);
    for (const TracedPath* p : paths) {
        for (std::size_t i = 0; i + 1 < p->nodes.size(); ++i) {
            if (!p->steps[i].forward || !g.is_decision(p->nodes[i + 1])) continue;
            const NodeId& dprime = p->nodes[i + 1];
            if (dprime == s.d) continue;
            if (!desc.count(dprime)) return false;
            bool control_has_parent = false;
            for (const auto& n : s.control.nodes)
                if (g.has_edge(n, dprime)) control_has_parent = true;
            if (!control_has_parent) return false;
        }
    }
    return true;
}

bool parents_of_ancestor_decisions_are_parents(const IdGraph& g, const System& s) {
    std::set<NodeId> anc = g.ancestors(s.d);
    const auto& pa = g.parents(s.d);
    std::set<NodeId> pa_set(pa.begin(), pa.end());
    for (const auto& n : s.nodes()) {
        for (const auto& dprime : anc) {
            if (!g.is_decision(dprime)) continue;
            if (g.has_edge(n, dprime) && !pa_set.count(n)) return false;
        }
    }
    return true;
}

bool decisions_in_descendant_systems_are_descendants(const IdGraph& g, const SystemTree& t) {
    for (std::size_t i = 0; i < t.systems.size(); ++i) {
        std::set<NodeId> desc = g.descendants(t.systems[i].d);
        for (std::size_t j : t.subtree(i)) {
            if (j == i) continue;
            if (!desc.count(t.systems[j].d)) return false;
        }
    }
    return true;
}

bool infolinks_to_ancestor_decisions_only_from_obsnodes(const IdGraph& g, const SystemTree& t) {
    for (std::size_t i = 0; i < t.systems.size(); ++i) {
        std::set<NodeId> anc_decisions{t.systems[i].d};
        for (const auto& a : g.ancestors(t.systems[i].d))
            if (g.is_decision(a)) anc_decisions.insert(a);
        for (std::size_t j : t.subtree(i)) {
            if (j == i) continue;
            SystemElements ej = elements(t.systems[j]);
            for (const auto& v : t.systems[j].nodes()) {
                for (const auto& dd : anc_decisions) {
                    if (!g.has_edge(v, dd)) continue;
                    if (!ej.obs_nodes.count(v) &&
                        !(v == t.systems[j].x && v == t.systems[i].x))
                        return false;
                }
            }
        }
    }
    return true;
}

bool within_tree_links_between_systems_only_via_x_d(const IdGraph& g, const SystemTree& t) {
    (void)g;
    std::vector<std::set<NodeId>> sys_nodes;
    for (const auto& s : t.systems) sys_nodes.push_back(s.nodes());
    std::set<std::pair<NodeId, NodeId>> links;
    for (const auto& ref : all_path_refs(t)) {
        const TracedPath& p = t.path(ref);
        for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
            if (p.steps[i].forward)
                links.insert({p.nodes[i], p.nodes[i + 1]});
            else
                links.insert({p.nodes[i + 1], p.nodes[i]});
        }
    }
    for (const auto& s : t.systems) links.insert({s.x, s.d});
    std::set<NodeId> endpoints;
    for (const auto& s : t.systems) {
        endpoints.insert(s.x);
        endpoints.insert(s.d);
    }
    for (const auto& [a, b] : links) {
        for (std::size_t i = 0; i < t.systems.size(); ++i) {
            for (std::size_t j = 0; j < t.systems.size(); ++j) {
                if (i == j || !sys_nodes[i].count(a) || !sys_nodes[j].count(b)) continue;
                bool same_system = (sys_nodes[i].count(a) && sys_nodes[i].count(b)) ||
                                   (sys_nodes[j].count(a) && sys_nodes[j].count(b));
                if (!same_system && !endpoints.count(a) && !endpoints.count(b)) return false;
            }
        }
    }
    return true;
}

}  // namespace idvoi
