#include "idvoi/normalize.hpp"

#include <algorithm>
#include <functional>

#include "idvoi/analysis.hpp"
#include "idvoi/errors.hpp"

namespace idvoi {

namespace {

std::string tag_of(const PathRef& ref) {
    switch (ref.kind) {
        case PathKind::Info: return "i";
        case PathKind::Control: return "c";
        case PathKind::Obs: return "o:" + ref.collider;
    }
    return "";
}

std::vector<PathRef> refs_of(const SystemTree& t, std::size_t k) {
    std::vector<PathRef> out{{k, PathKind::Info, ""}, {k, PathKind::Control, ""}};
    for (const auto& [c, p] : t.systems[k].obs) out.push_back({k, PathKind::Obs, c});
    return out;
}

}  // namespace

TransformResult transform1_split(const IdGraph& g, const SystemTree& t) {
    if (!validate_tree(g, t).empty())
        throw Error("InvalidTree", "transformation 1 requires a valid tree");

    // NewNode recursion: a key (node, system, path) resolves to the token
    // that names its copy. Shared infolink nodes resolve through the
    // predecessor path; the root infolink stays verbatim.
    struct Token {
        NodeId node;
        std::size_t system;
        std::string tag;  // empty: keep node verbatim
    };
    std::map<std::string, Token> memo;
    std::function<Token(const NodeId&, std::size_t, const PathRef&)> new_node =
        [&](const NodeId& n, std::size_t k, const PathRef& ref) -> Token {
        std::string key = n + "#" + std::to_string(k) + "#" + tag_of(ref);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        const System& s = t.systems[k];
        Token tok;
        if (k != t.root && (n == s.x || n == s.d)) {
            tok = new_node(n, t.pred.at(k).system, t.pred.at(k));
        } else if (n == s.u) {
            tok = {n, k, "ic"};
        } else if (ref.kind == PathKind::Obs && ref.collider == n) {
            tok = {n, k, "i"};
        } else if (k == t.root && (n == s.x || n == s.d)) {
            tok = {n, k, ""};
        } else {
            tok = {n, k, tag_of(ref)};
        }
        memo[key] = tok;
        return tok;
    };

    // Assign fresh names to tokens in deterministic traversal order.
    std::set<NodeId> taken;
    for (const auto& [n, kk] : g.nodes()) taken.insert(n);
    std::map<std::string, NodeId> token_name;
    std::map<NodeId, Provenance> provenance;
    CopySpec spec;
    auto resolve = [&](const NodeId& n, std::size_t k, const PathRef& ref) -> NodeId {
        Token tok = new_node(n, k, ref);
        if (tok.tag.empty()) return tok.node;  // root infolink node kept verbatim
        std::string tkey = tok.node + "#" + std::to_string(tok.system) + "#" + tok.tag;
        auto it = token_name.find(tkey);
        if (it != token_name.end()) return it->second;
        std::string suffix = "s" + std::to_string(tok.system) + "_" +
                             (tok.tag == "ic" ? "ic"
                              : tok.tag == "i"
                                  ? "i"
                                  : tok.tag == "c" ? "c" : "o_" + tok.tag.substr(2));
        NodeId name = fresh_name(taken, tok.node, suffix);
        taken.insert(name);
        token_name[tkey] = name;
        provenance[name] = {tok.node, tok.system, tok.tag};
        spec.copies[tok.node];  // ensure entry exists; filled below
        return name;
    };

    // Walk systems in index order so names are reproducible.
    for (std::size_t k = 0; k < t.systems.size(); ++k)
        for (const auto& ref : refs_of(t, k))
            for (const auto& n : t.path(ref).nodes) resolve(n, k, ref);

    // Copies(N) = {N} plus its tree copies, originals last in the copy order
    // so tree copies point at originals.
    std::map<NodeId, std::vector<NodeId>> copy_lists;
    for (const auto& [name, prov] : provenance) copy_lists[prov.original].push_back(name);
    for (auto& [orig, list] : copy_lists) {
        std::sort(list.begin(), list.end());
        list.push_back(orig);
        spec.copies[orig] = list;
    }

    TransformResult out;
    auto [graph, hom] = copy_delete_transform(g, spec);
    out.graph = std::move(graph);
    out.hom = std::move(hom);
    out.provenance = std::move(provenance);

    // Rebuild the tree over the copies.
    out.tree.root = t.root;
    out.tree.systems.resize(t.systems.size());
    for (std::size_t k = 0; k < t.systems.size(); ++k) {
        const System& s = t.systems[k];
        System ns;
        PathRef iref{k, PathKind::Info, ""}, cref{k, PathKind::Control, ""};
        std::vector<NodeId> info_nodes, control_nodes;
        for (const auto& n : s.info.nodes) info_nodes.push_back(resolve(n, k, iref));
        for (const auto& n : s.control.nodes) control_nodes.push_back(resolve(n, k, cref));
        ns.info = trace_path(out.graph, info_nodes);
        ns.control = trace_path(out.graph, control_nodes);
        ns.x = ns.info.first();
        ns.d = ns.control.first();
        ns.u = ns.control.last();
        for (const auto& [c, p] : s.obs) {
            PathRef oref{k, PathKind::Obs, c};
            std::vector<NodeId> obs_nodes;
            for (const auto& n : p.nodes) obs_nodes.push_back(resolve(n, k, oref));
            ns.obs[obs_nodes.front()] = trace_path(out.graph, obs_nodes);
        }
        out.tree.systems[k] = std::move(ns);
    }
    for (const auto& [k, ref] : t.pred) {
        PathRef nref = ref;
        if (ref.kind == PathKind::Obs)
            nref.collider = resolve(ref.collider, ref.system, ref);
        out.tree.pred[k] = nref;
    }
    return out;
}

TransformResult transform2_frontdoor(const IdGraph& g, const SystemTree& t) {
    NormalFormVerdict nf = normal_form_check(g, t);
    if (!nf.position_uniqueness)
        throw Error("PropertyAMissing", "transformation 2 requires position uniqueness");

    std::set<NodeId> taken;
    for (const auto& [n, k] : g.nodes()) taken.insert(n);
    CopySpec spec;
    std::map<std::size_t, NodeId> copy_of_system;
    std::map<NodeId, Provenance> provenance;
    for (std::size_t k = 0; k < t.systems.size(); ++k) {
        const System& s = t.systems[k];
        if (s.info.steps.empty() || s.info.steps[0].forward) continue;
        NodeId name = fresh_name(taken, s.x, "s" + std::to_string(k) + "_copy");
        taken.insert(name);
        auto& list = spec.copies[s.x];  // original first: the path needs x -> copy
        if (list.empty()) list.push_back(s.x);
        list.push_back(name);
        copy_of_system[k] = name;
        provenance[name] = {s.x, k, "copy"};
    }

    TransformResult out;
    auto [graph, hom] = copy_delete_transform(g, spec);
    out.graph = std::move(graph);
    out.hom = std::move(hom);
    out.provenance = std::move(provenance);
    out.tree = t;
    for (auto& [k, copy] : copy_of_system) {
        System& s = out.tree.systems[k];
        std::vector<NodeId> info_nodes{s.x, copy};
        info_nodes.insert(info_nodes.end(), s.info.nodes.begin() + 1, s.info.nodes.end());
        s.info = trace_path(out.graph, info_nodes);
        s.obs[copy] = trace_path(out.graph, {copy, s.d});
    }
    return out;
}

TransformResult transform3_prune(const IdGraph& g, const SystemTree& t) {
    NormalFormVerdict nf = normal_form_check(g, t);
    if (!nf.position_uniqueness || !nf.no_backdoor_infopaths)
        throw Error("PropertyABMissing", "transformation 3 requires properties (a) and (b)");

    std::set<NodeId> interior = tree_interior_nodes(t);
    std::set<std::pair<NodeId, NodeId>> within;
    for (std::size_t k = 0; k < t.systems.size(); ++k) {
        for (const auto& ref : refs_of(t, k)) {
            const TracedPath& p = t.path(ref);
            for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
                if (p.steps[i].forward)
                    within.insert({p.nodes[i], p.nodes[i + 1]});
                else
                    within.insert({p.nodes[i + 1], p.nodes[i]});
            }
        }
        within.insert({t.systems[k].x, t.systems[k].d});
    }
    std::set<std::pair<NodeId, NodeId>> keep;
    for (const auto& e : g.edges()) {
        if (within.count(e) || g.is_decision(e.second) ||
            (!interior.count(e.first) && !interior.count(e.second)))
            keep.insert(e);
    }
    TransformResult out;
    auto [graph, hom] = prune_links(g, keep);
    out.graph = std::move(graph);
    out.hom = std::move(hom);
    out.tree = t;
    return out;
}

TransformResult transform4_split_root(const IdGraph& g, const SystemTree& t) {
    NormalFormVerdict nf = normal_form_check(g, t);
    if (!nf.ok()) throw Error("NotNormalForm", "transformation 4 requires a normal form tree");
    const System& root = t.systems[t.root];
    TransformResult out;
    if (root.directed_info()) {
        out.graph = g;
        out.tree = t;
        out.hom = IdHom::identity(g);
        return out;
    }
    std::set<NodeId> taken;
    for (const auto& [n, k] : g.nodes()) taken.insert(n);
    NodeId name = fresh_name(taken, root.d, "copy");
    CopySpec spec;
    spec.copies[root.d] = {root.d, name};
    auto [graph, hom] = copy_delete_transform(g, spec);
    out.graph = std::move(graph);
    out.hom = std::move(hom);
    out.tree = t;
    out.provenance[name] = {root.d, t.root, "copy"};
    return out;
}

NormalFormResult to_normal_form(const IdGraph& g, const NodeId& x, const NodeId& d) {
    SolubilityResult sol = is_soluble(g);
    if (!sol.soluble) throw Error("Insoluble", "graph is not soluble");
    NormalFormResult out;
    out.original = g;
    out.reduced = minimal_d_reduction(g).first;
    if (!out.reduced.has_edge(x, d))
        throw Error("CriterionFails",
                    "infolink " + x + " -> " + d + " is not in the minimal d-reduction");
    out.full_tree = build_full_tree(out.reduced, x, d);
    out.stage1 = transform1_split(g, out.full_tree);
    out.stage2 = transform2_frontdoor(out.stage1.graph, out.stage1.tree);
    out.stage3 = transform3_prune(out.stage2.graph, out.stage2.tree);
    out.hom = compose(out.stage1.hom, compose(out.stage2.hom, out.stage3.hom));
    return out;
}

}  // namespace idvoi
