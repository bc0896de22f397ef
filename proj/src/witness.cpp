#include "idvoi/witness.hpp"

#include <algorithm>
#include <functional>

#include "idvoi/analysis.hpp"
#include "idvoi/errors.hpp"

namespace idvoi {

Task Task::identity(const NodeId& decision, const NodeId& parent, std::size_t domain_size) {
    Task t;
    t.decision = decision;
    t.parent = parent;
    t.fn.resize(domain_size);
    for (std::size_t i = 0; i < domain_size; ++i) t.fn[i] = i;
    return t;
}

Rational umax_of(const IdModel& m0) {
    // The tree payout must beat any gain elsewhere even when a deviating
    // report still wins half the time (a wrong question index leaves the
    // claimed bit a coin flip), hence twice the summed ranges plus one.
    Rational sum;
    for (const auto& [u, table] : m0.utilities) {
        if (table.rows.empty()) continue;
        Rational lo = table.rows[0], hi = table.rows[0];
        for (const auto& v : table.rows) {
            if (v < lo) lo = v;
            if (hi < v) hi = v;
        }
        sum += hi - lo;
    }
    return Rational(1) + Rational(2) * sum;
}

namespace {

struct Occurrence {
    std::size_t system;
    PathRef ref;
    std::size_t pos;
};

std::vector<PathRef> system_refs(const SystemTree& t, std::size_t k) {
    std::vector<PathRef> out{{k, PathKind::Info, ""}, {k, PathKind::Control, ""}};
    for (const auto& [c, p] : t.systems[k].obs) out.push_back({k, PathKind::Obs, c});
    return out;
}

// Preorder over systems: parents before children.
std::vector<std::size_t> preorder(const SystemTree& t) {
    std::vector<std::size_t> out{t.root};
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t c : t.children(out[i])) out.push_back(c);
    return out;
}

std::optional<std::size_t> first_collider_pos(const TracedPath& p) {
    for (std::size_t i = 1; i + 1 < p.nodes.size(); ++i)
        if (p.steps[i - 1].forward && !p.steps[i].forward) return i;
    return std::nullopt;
}

std::vector<NodeId> info_colliders(const TracedPath& p) {
    std::vector<NodeId> out;
    for (std::size_t i = 1; i + 1 < p.nodes.size(); ++i)
        if (p.steps[i - 1].forward && !p.steps[i].forward) out.push_back(p.nodes[i]);
    return out;
}

// What the parameterization must do with one tree-interior chance node.
struct NodeRole {
    enum Kind { CopyFrom, FirstCollider, XorCollider, Fork } kind = CopyFrom;
    NodeId source;          // CopyFrom: the on-path parent
    NodeId x_side, q_side;  // FirstCollider
    std::size_t system = 0;
};

}  // namespace

IdModel parameterize_tree(const IdGraph& g3, const SystemTree& t3, const IdModel& m0,
                          const Task& task, std::size_t bitstring_cap) {
    NormalFormVerdict nf = normal_form_check(g3, t3);
    if (!nf.ok()) throw Error("NotNormalForm", "parameterization requires a normal form tree");
    const System& root = t3.systems[t3.root];
    if (task.decision != root.d || task.parent != root.x)
        throw Error("BaseModelMismatch", "task must target the root infolink");

    std::set<NodeId> interior = tree_interior_nodes(t3);

    // Base-model conformance over the non-tree part.
    for (const auto& [n, k] : g3.nodes()) {
        if (interior.count(n)) continue;
        if (k != NodeKind::Utility && !m0.domains.count(n))
            throw Error("BaseModelMismatch", "base model lacks a domain for '" + n + "'");
        if (k == NodeKind::Chance) {
            if (!m0.cpds.count(n))
                throw Error("BaseModelMismatch", "base model lacks a CPD for '" + n + "'");
            if (m0.graph.parents(n) != g3.parents(n))
                throw Error("BaseModelMismatch", "base model parents of '" + n + "' differ");
        }
        if (k == NodeKind::Utility) {
            if (!m0.utilities.count(n))
                throw Error("BaseModelMismatch", "base model lacks a utility table for '" + n + "'");
            if (m0.graph.parents(n) != g3.parents(n))
                throw Error("BaseModelMismatch", "base model parents of '" + n + "' differ");
        }
    }
    if (task.fn.size() != m0.domains.at(root.x).size())
        throw Error("BaseModelMismatch", "task table does not cover dom(x)");
    for (std::size_t v : task.fn)
        if (v >= m0.domains.at(root.d).size())
            throw Error("BaseModelMismatch", "task value outside the decision's base domain");

    // Regular occurrence of every tree node: the unique position where it is
    // an ordinary path member. Infolink endpoints resolve to their
    // predecessor-path position; the root pair and utilities are special.
    std::map<NodeId, Occurrence> regular;
    std::map<NodeId, std::size_t> utility_system;
    for (std::size_t k = 0; k < t3.systems.size(); ++k) {
        const System& s = t3.systems[k];
        utility_system[s.u] = k;
        for (const auto& ref : system_refs(t3, k)) {
            const TracedPath& p = t3.path(ref);
            for (std::size_t i = 0; i < p.nodes.size(); ++i) {
                const NodeId& n = p.nodes[i];
                if (n == root.x || n == root.d) continue;
                if (n == s.u) continue;
                if (n == s.x && ref.kind == PathKind::Info && i == 0) continue;
                if (n == s.d && ref.kind == PathKind::Control && i == 0) continue;
                if (n == s.d && ref.kind == PathKind::Obs && i + 1 == p.nodes.size()) continue;
                if (ref.kind == PathKind::Obs && ref.collider == n && i == 0) continue;
                if (regular.count(n))
                    throw Error("NotNormalForm", "node '" + n + "' has two regular tree positions");
                regular[n] = {k, ref, i};
            }
        }
    }

    // Slot domains by the per-system recursion; claim bits for decisions of
    // non-directed systems.
    std::map<NodeId, Domain> slot;
    std::set<NodeId> claim;
    slot[root.x] = m0.domains.at(root.x);
    slot[root.d] = m0.domains.at(root.d);
    std::map<NodeId, NodeRole> roles;

    auto bitstring_for = [&](std::size_t base_size) {
        if (base_size > bitstring_cap)
            throw Error("DomainBlowup", "bitstring length " + std::to_string(base_size) +
                                            " exceeds the cap of " + std::to_string(bitstring_cap) +
                                            "; raise the cap to proceed");
        return bitstring_domain(base_size);
    };

    for (std::size_t k : preorder(t3)) {
        const System& s = t3.systems[k];
        if (!s.directed_info()) claim.insert(s.d);
        const Domain& dom_x = slot.at(s.x);
        const Domain& dom_d_base = slot.at(s.d);
        const bool directed = s.directed_info();
        std::optional<std::size_t> c1 = first_collider_pos(s.info);
        if (!directed && !c1)
            throw Error("NotNormalForm", "non-directed info path without a collider");
        const NodeId c1_node = c1 ? s.info.nodes[*c1] : NodeId();
        Domain bits = directed ? Domain() : bitstring_for(dom_d_base.size());
        Domain pair = directed ? Domain() : product_domain({dom_d_base, boolean_domain()});

        auto assign = [&](const NodeId& n, const Domain& d, NodeRole role) {
            role.system = k;
            slot[n] = d;
            roles[n] = role;
        };

        // info path members
        for (std::size_t i = 1; i + 1 < s.info.nodes.size(); ++i) {
            const NodeId& n = s.info.nodes[i];
            if (!regular.count(n) || regular.at(n).system != k) continue;
            const Occurrence& occ = regular.at(n);
            if (occ.ref.kind != PathKind::Info || occ.pos != i) continue;
            bool in_fwd = s.info.steps[i - 1].forward;
            bool out_fwd = s.info.steps[i].forward;
            if (directed) {
                assign(n, dom_x, {NodeRole::CopyFrom, s.info.nodes[i - 1], "", ""});
            } else if (in_fwd && !out_fwd && i == *c1) {
                assign(n, boolean_domain(),
                       {NodeRole::FirstCollider, "", s.info.nodes[i - 1], s.info.nodes[i + 1]});
            } else if (in_fwd && !out_fwd) {
                assign(n, bits, {NodeRole::XorCollider, "", s.info.nodes[i - 1], s.info.nodes[i + 1]});
            } else if (!in_fwd && out_fwd) {
                assign(n, bits, {NodeRole::Fork, "", "", ""});
            } else if (i < *c1) {
                // chain between x and the first collider carries dom(x)
                assign(n, dom_x, {NodeRole::CopyFrom, in_fwd ? s.info.nodes[i - 1] : s.info.nodes[i + 1], "", ""});
            } else {
                assign(n, bits, {NodeRole::CopyFrom, in_fwd ? s.info.nodes[i - 1] : s.info.nodes[i + 1], "", ""});
            }
        }
        // control path members copy the decision value downstream
        for (std::size_t i = 1; i + 1 < s.control.nodes.size(); ++i) {
            const NodeId& n = s.control.nodes[i];
            if (!regular.count(n) || regular.at(n).system != k) continue;
            const Occurrence& occ = regular.at(n);
            if (occ.ref.kind != PathKind::Control || occ.pos != i) continue;
            assign(n, directed ? dom_d_base : pair, {NodeRole::CopyFrom, s.control.nodes[i - 1], "", ""});
        }
        // obs path members: booleans on the first obs path, bitstrings elsewhere
        for (const auto& [c, p] : s.obs) {
            bool first_obs = !directed && c == c1_node;
            for (std::size_t i = 1; i + 1 < p.nodes.size(); ++i) {
                const NodeId& n = p.nodes[i];
                if (!regular.count(n) || regular.at(n).system != k) continue;
                const Occurrence& occ = regular.at(n);
                if (occ.ref.kind != PathKind::Obs || occ.ref.collider != c || occ.pos != i) continue;
                assign(n, first_obs ? boolean_domain() : bits,
                       {NodeRole::CopyFrom, p.nodes[i - 1], "", ""});
            }
        }
    }

    // Assemble the model.
    IdModel m;
    m.graph = g3;
    for (const auto& [n, kind] : g3.nodes()) {
        if (kind == NodeKind::Utility) continue;
        if (interior.count(n) && !slot.count(n))
            throw Error("NotNormalForm", "tree node '" + n + "' received no domain");
        Domain base = interior.count(n) ? slot.at(n) : m0.domains.at(n);
        m.domains[n] = claim.count(n) ? product_domain({base, boolean_domain()}) : base;
    }

    auto full_size = [&](const NodeId& n) { return m.domains.at(n).size(); };
    auto base_size = [&](const NodeId& n) {
        return claim.count(n) ? full_size(n) / 2 : full_size(n);
    };
    auto strip = [&](const NodeId& n, std::size_t v) { return claim.count(n) ? v / 2 : v; };
    // Copy semantics: take the whole value when the types line up, the base
    // part when the source carries an extra claim bit.
    auto copy_value = [&](const NodeId& src, std::size_t v, std::size_t target_size) {
        if (full_size(src) == target_size) return v;
        if (base_size(src) == target_size) return strip(src, v);
        throw Error("BaseModelMismatch", "copy source '" + src + "' does not fit its reader");
    };

    // Context enumeration over a node's g3 parents (lexicographic order,
    // first parent major), exposing per-parent values.
    auto for_each_ctx = [&](const NodeId& n, const std::function<void(const std::map<NodeId, std::size_t>&)>& fn) {
        const auto& parents = g3.parents(n);
        std::size_t total = 1;
        for (const auto& p : parents) total *= full_size(p);
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::map<NodeId, std::size_t> vals;
            std::size_t rem = flat;
            for (std::size_t i = parents.size(); i-- > 0;) {
                vals[parents[i]] = rem % full_size(parents[i]);
                rem /= full_size(parents[i]);
            }
            fn(vals);
        }
    };

    auto point_row = [](std::size_t width, std::size_t at) {
        std::vector<Rational> row(width, Rational(0));
        row.at(at) = Rational(1);
        return row;
    };

    // Base-model rows re-keyed over g3 contexts: the root decision's domain
    // may have grown a claim bit its original children must ignore.
    auto rekey_base_rows = [&](const NodeId& n) {
        const auto& parents = g3.parents(n);
        bool needs_rekey = false;
        for (const auto& p : parents)
            if (claim.count(p)) needs_rekey = true;
        std::vector<std::size_t> out_rows;
        if (!needs_rekey) {
            std::size_t total = 1;
            for (const auto& p : parents) total *= full_size(p);
            for (std::size_t c = 0; c < total; ++c) out_rows.push_back(c);
            return out_rows;
        }
        for_each_ctx(n, [&](const std::map<NodeId, std::size_t>& vals) {
            std::size_t base_ctx = 0;
            for (const auto& p : parents) base_ctx = base_ctx * base_size(p) + strip(p, vals.at(p));
            out_rows.push_back(base_ctx);
        });
        return out_rows;
    };

    for (const auto& n : g3.chance_nodes()) {
        if (!interior.count(n)) {
            const Cpd& src = m0.cpds.at(n);
            Cpd cpd;
            for (std::size_t base_ctx : rekey_base_rows(n))
                cpd.rows.push_back(src.rows.at(base_ctx));
            m.cpds[n] = std::move(cpd);
            continue;
        }
        const NodeRole& role = roles.at(n);
        const System& s = t3.systems[role.system];
        const std::size_t width = full_size(n);
        Cpd cpd;
        switch (role.kind) {
            case NodeRole::Fork: {
                if (!g3.parents(n).empty())
                    throw Error("NotNormalForm", "fork node '" + n + "' has parents after pruning");
                cpd.rows.push_back(
                    std::vector<Rational>(width, Rational(1, static_cast<long long>(width))));
                break;
            }
            case NodeRole::CopyFrom: {
                for_each_ctx(n, [&](const std::map<NodeId, std::size_t>& vals) {
                    cpd.rows.push_back(point_row(width, copy_value(role.source, vals.at(role.source), width)));
                });
                break;
            }
            case NodeRole::FirstCollider: {
                const std::size_t bits_len = slot.at(s.d).size();
                for_each_ctx(n, [&](const std::map<NodeId, std::size_t>& vals) {
                    std::size_t xv = strip(role.x_side, vals.at(role.x_side));
                    std::size_t y = role.system == t3.root ? task.fn.at(xv) : xv;
                    std::size_t q = strip(role.q_side, vals.at(role.q_side));
                    cpd.rows.push_back(point_row(width, bitstring_bit(q, y, bits_len)));
                });
                break;
            }
            case NodeRole::XorCollider: {
                for_each_ctx(n, [&](const std::map<NodeId, std::size_t>& vals) {
                    std::size_t a = strip(role.x_side, vals.at(role.x_side));
                    std::size_t b = strip(role.q_side, vals.at(role.q_side));
                    cpd.rows.push_back(point_row(width, a ^ b));
                });
                break;
            }
        }
        m.cpds[n] = std::move(cpd);
    }

    const Rational umax = umax_of(m0);
    for (const auto& u : g3.utility_nodes()) {
        if (!interior.count(u)) {
            const UtilityTable& src = m0.utilities.at(u);
            UtilityTable table;
            for (std::size_t base_ctx : rekey_base_rows(u))
                table.rows.push_back(src.rows.at(base_ctx));
            m.utilities[u] = std::move(table);
            continue;
        }
        const System& s = t3.systems.at(utility_system.at(u));
        const NodeId penult_info = s.info.nodes[s.info.nodes.size() - 2];
        const NodeId penult_control = s.control.nodes[s.control.nodes.size() - 2];
        const bool directed = s.directed_info();
        const std::size_t bits_len = slot.at(s.d).size();
        UtilityTable table;
        for_each_ctx(u, [&](const std::map<NodeId, std::size_t>& vals) {
            bool pay = false;
            if (directed) {
                std::size_t i = strip(penult_info, vals.at(penult_info));
                std::size_t c = strip(penult_control, vals.at(penult_control));
                std::size_t want = s.d == root.d ? task.fn.at(i) : i;
                pay = c == want;
            } else {
                std::size_t q = strip(penult_info, vals.at(penult_info));
                std::size_t pairv = penult_control == s.d ? vals.at(penult_control)
                                                          : strip(penult_control, vals.at(penult_control));
                std::size_t claim_index = pairv / 2;
                std::size_t claim_bit = pairv % 2;
                pay = bitstring_bit(q, claim_index, bits_len) == claim_bit;
            }
            table.rows.push_back(pay ? umax : Rational(0));
        });
        m.utilities[u] = std::move(table);
    }

    ModelVerdict verdict = validate_model(m);
    if (!verdict.ok())
        throw Error("BaseModelMismatch", "parameterized model invalid: " + verdict.problems.front());
    return m;
}

namespace {

std::size_t strip_by_expectation(const IdModel& m, const NodeId& n, std::size_t v,
                                 std::size_t expected) {
    const std::size_t full = m.domains.at(n).size();
    if (full == expected) return v;
    if (full == 2 * expected) return v / 2;
    throw Error("BaseModelMismatch", "value of '" + n + "' does not fit the expected domain");
}

}  // namespace

bool performs_task(const IdModel& m, const Policy& pi, const System& s, const Task& task,
                   bool split_root) {
    check_policy(m, pi);
    ModelEvaluator ev(m);
    const std::size_t x_pos = ev.index_of(s.x);
    const DecisionRule& rule = pi.at(s.d);
    const bool directed = s.directed_info();
    const bool pair_output = !directed && !split_root;

    std::size_t base_actions;
    if (!pair_output) {
        base_actions = m.domains.at(s.d).size();
    } else {
        if (m.domains.at(s.d).size() % 2 != 0) return false;
        base_actions = m.domains.at(s.d).size() / 2;
    }
    for (std::size_t v : task.fn)
        if (v >= base_actions) throw Error("BaseModelMismatch", "task output outside base domain");

    // Obs nodes in info-path collider order; the first carries one bit, the
    // rest carry bitstrings indexed by the task value.
    std::vector<NodeId> obs_nodes;
    for (const auto& c : info_colliders(s.info)) {
        const TracedPath& p = s.obs.at(c);
        obs_nodes.push_back(p.nodes.size() >= 2 ? p.nodes[p.nodes.size() - 2] : p.nodes.back());
    }

    bool ok = true;
    ev.for_each_outcome(pi, [&](const std::vector<std::size_t>& values, const Rational& prob) {
        if (!ok || prob.is_zero()) return;
        std::size_t xv = strip_by_expectation(m, s.x, values[x_pos], task.fn.size());
        std::size_t y = task.fn[xv];
        std::size_t expected;
        if (!pair_output) {
            expected = y;
        } else {
            std::size_t bit = 0;
            for (std::size_t i = 0; i < obs_nodes.size(); ++i) {
                std::size_t raw = values[ev.index_of(obs_nodes[i])];
                if (i == 0) {
                    bit ^= strip_by_expectation(m, obs_nodes[i], raw, 2);
                } else {
                    std::size_t word =
                        strip_by_expectation(m, obs_nodes[i], raw,
                                             static_cast<std::size_t>(1) << base_actions);
                    bit ^= bitstring_bit(word, y, base_actions);
                }
            }
            expected = y * 2 + bit;
        }
        const auto& row = rule.rows.at(ev.row_index(s.d, values));
        if (row.at(expected) != Rational(1)) ok = false;
    });
    return ok;
}

bool all_tree_tasks_performed(const IdModel& m, const Policy& pi, const SystemTree& t,
                              const Task& root_task, bool split_root) {
    for (std::size_t k = 0; k < t.systems.size(); ++k) {
        const System& s = t.systems[k];
        Task tk = root_task;
        if (k != t.root) {
            std::size_t base_actions = s.directed_info() ? m.domains.at(s.d).size()
                                                         : m.domains.at(s.d).size() / 2;
            tk = Task::identity(s.d, s.x, base_actions);
        }
        if (!performs_task(m, pi, s, tk, k == t.root && split_root)) return false;
    }
    return true;
}

namespace {

// Model adjustment after splitting a non-directed root decision: the claim
// bit moves to the copy node and each child table reads the concatenation.
IdModel adjust_for_root_split(const IdModel& m3, const IdGraph& g4, const NodeId& d,
                              const NodeId& copy, const Domain& d_base) {
    IdModel m4;
    m4.graph = g4;
    for (const auto& [n, dom] : m3.domains) m4.domains[n] = dom;
    m4.domains[d] = d_base;
    m4.domains[copy] = boolean_domain();

    std::set<NodeId> rekeyed(m3.graph.children(d).begin(), m3.graph.children(d).end());
    auto full_size = [&](const NodeId& n) { return m4.domains.at(n).size(); };

    auto rebuild = [&](const NodeId& n, const std::vector<Rational>* util_rows,
                       const Cpd* cpd_rows) {
        const auto& new_parents = g4.parents(n);
        const auto& old_parents = m3.graph.parents(n);
        std::size_t total = 1;
        for (const auto& p : new_parents) total *= full_size(p);
        std::vector<std::vector<Rational>> rows;
        std::vector<Rational> urows;
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::map<NodeId, std::size_t> vals;
            std::size_t rem = flat;
            for (std::size_t i = new_parents.size(); i-- > 0;) {
                vals[new_parents[i]] = rem % full_size(new_parents[i]);
                rem /= full_size(new_parents[i]);
            }
            std::size_t old_ctx = 0;
            for (const auto& p : old_parents) {
                std::size_t sz = p == d ? d_base.size() * 2 : full_size(p);
                std::size_t v = p == d ? vals.at(d) * 2 + vals.at(copy) : vals.at(p);
                old_ctx = old_ctx * sz + v;
            }
            if (util_rows) urows.push_back(util_rows->at(old_ctx));
            if (cpd_rows) rows.push_back(cpd_rows->rows.at(old_ctx));
        }
        if (util_rows) m4.utilities[n] = UtilityTable{std::move(urows)};
        if (cpd_rows) m4.cpds[n] = Cpd{std::move(rows)};
    };

    for (const auto& [n, cpd] : m3.cpds) {
        if (rekeyed.count(n))
            rebuild(n, nullptr, &cpd);
        else
            m4.cpds[n] = cpd;
    }
    for (const auto& [n, table] : m3.utilities) {
        if (rekeyed.count(n))
            rebuild(n, &table.rows, nullptr);
        else
            m4.utilities[n] = table;
    }
    return m4;
}

}  // namespace

TaskifyResult taskify(const IdGraph& g, const IdModel& m, const std::vector<Task>& tasks,
                      std::size_t bitstring_cap) {
    SolubilityResult sol = is_soluble(g);
    if (!sol.soluble) throw Error("Insoluble", "taskify requires a soluble graph");
    std::set<NodeId> tasked;
    for (const auto& t : tasks)
        if (!tasked.insert(t.decision).second)
            throw Error("TaskNotInReduction", "two tasks target decision '" + t.decision + "'");

    // Latest decision first, by the solubility ordering.
    std::map<NodeId, std::size_t> order_pos;
    for (std::size_t i = 0; i < sol.ordering.size(); ++i) order_pos[sol.ordering[i]] = i;
    std::vector<Task> ordered = tasks;
    std::stable_sort(ordered.begin(), ordered.end(), [&](const Task& a, const Task& b) {
        return order_pos.at(a.decision) > order_pos.at(b.decision);
    });

    TaskifyResult out;
    out.graph = g;
    out.model = m;
    out.hom = IdHom::identity(g);
    for (const auto& task : ordered) {
        IdGraph gstar = minimal_d_reduction(out.graph).first;
        if (!gstar.has_edge(task.parent, task.decision))
            throw Error("TaskNotInReduction", "infolink " + task.parent + " -> " + task.decision +
                                                  " is not in the minimal d-reduction");
        NormalFormResult nfr = to_normal_form(out.graph, task.parent, task.decision);
        IdModel m3 = parameterize_tree(nfr.graph(), nfr.tree(), out.model, task, bitstring_cap);
        TransformResult t4 = transform4_split_root(nfr.graph(), nfr.tree());

        TaskStage stage;
        stage.task = task;
        stage.graph = t4.graph;
        stage.tree = t4.tree;
        stage.hom = compose(nfr.hom, t4.hom);
        stage.root_split = !t4.provenance.empty();
        for (const auto& s : nfr.tree().systems) stage.added_utilities.push_back(s.u);

        IdModel m4;
        if (stage.root_split) {
            const NodeId copy = t4.provenance.begin()->first;
            m4 = adjust_for_root_split(m3, t4.graph, task.decision, copy,
                                       out.model.domains.at(task.decision));
        } else {
            m4 = std::move(m3);
            m4.graph = t4.graph;
        }
        out.hom = compose(out.hom, stage.hom);
        out.graph = t4.graph;
        out.model = std::move(m4);
        out.stages.push_back(std::move(stage));
    }
    return out;
}

WitnessReport voi_witness(const IdGraph& g, const NodeId& x, const NodeId& d,
                          const SolverLimits& limits, std::size_t bitstring_cap) {
    CriterionResult crit = voi_criterion(g, x, d);
    if (!crit.positive())
        throw Error("CriterionFails", "voi criterion is not positive for " + x + " -> " + d);
    IdGraph work = g.has_edge(x, d) ? g : g.with_edge_added(x, d);
    NormalFormResult nfr = to_normal_form(work, x, d);
    const IdGraph& g3 = nfr.graph();

    // Trivial base model: uniform boolean x, boolean d, singletons elsewhere.
    std::set<NodeId> interior = tree_interior_nodes(nfr.tree());
    std::vector<std::pair<NodeId, NodeKind>> base_nodes;
    std::vector<std::pair<NodeId, NodeId>> base_edges;
    for (const auto& [n, k] : g3.nodes())
        if (!interior.count(n)) base_nodes.push_back({n, k});
    for (const auto& [a, b] : g3.edges())
        if (!interior.count(a) && !interior.count(b)) base_edges.push_back({a, b});
    IdModel m0;
    m0.graph = IdGraph::build(base_nodes, base_edges);
    for (const auto& [n, k] : m0.graph.nodes()) {
        if (k == NodeKind::Utility) continue;
        m0.domains[n] = (n == x || n == d) ? boolean_domain() : singleton_domain();
    }
    {
        ModelEvaluator ev0(m0);
        for (const auto& n : m0.graph.chance_nodes()) {
            Cpd cpd;
            const std::size_t width = m0.domains.at(n).size();
            for (std::size_t c = 0; c < ev0.context_count(n); ++c) {
                if (n == x)
                    cpd.rows.push_back(std::vector<Rational>(width, Rational(1, 2)));
                else
                    cpd.rows.push_back(std::vector<Rational>{Rational(1)});
            }
            m0.cpds[n] = std::move(cpd);
        }
        for (const auto& u : m0.graph.utility_nodes())
            m0.utilities[u] = UtilityTable{std::vector<Rational>(ev0.context_count(u), Rational(0))};
    }

    Task task = Task::identity(d, x, 2);
    IdModel m3 = parameterize_tree(g3, nfr.tree(), m0, task, bitstring_cap);
    Solution sol3 = solve(m3, limits);
    TransportedModel ported = transport_model(nfr.hom, m3, sol3.policy);

    WitnessReport report;
    report.kind = "voi";
    report.node = x;
    report.decision = d;
    report.original = work;
    report.transformed = g3;
    report.hom = nfr.hom;
    report.model_transformed = m3;
    report.model_original = ported.model;
    report.policy_original = ported.policy;
    report.tree = nfr.tree();
    report.eu_with = solve(ported.model, limits).optimal_eu;
    report.eu_without = solve(remove_infolink(ported.model, x, d), limits).optimal_eu;
    report.value = report.eu_with - report.eu_without;
    report.value_original = report.value;
    return report;
}

WitnessReport voc_witness(const IdGraph& g, const NodeId& x, const SolverLimits& limits,
                          std::size_t bitstring_cap) {
    CriterionResult crit = voc_criterion(g, x);
    if (!crit.positive()) throw Error("CriterionFails", "voc criterion is not positive for " + x);
    IdGraph gstar = minimal_d_reduction(g).first;
    std::optional<TracedPath> best;
    for (const auto& u : gstar.utility_nodes()) {
        auto p = shortest_directed_path(gstar, x, u);
        if (!p) continue;
        if (!best || p->length() < best->length() ||
            (p->length() == best->length() && p->nodes < best->nodes))
            best = p;
    }
    if (!best) throw Error("CriterionFails", "no directed path from " + x + " to a utility in G*");
    const TracedPath& chain = *best;
    std::set<NodeId> on_chain(chain.nodes.begin(), chain.nodes.end());

    const Rational eps(1, 4);
    IdModel m_init;
    m_init.graph = g;
    for (const auto& [n, k] : g.nodes()) {
        if (k == NodeKind::Utility) continue;
        m_init.domains[n] = on_chain.count(n) ? boolean_domain() : singleton_domain();
    }
    ModelEvaluator ev(m_init);
    std::map<NodeId, NodeId> chain_pred;
    for (std::size_t i = 1; i < chain.nodes.size(); ++i) chain_pred[chain.nodes[i]] = chain.nodes[i - 1];
    for (const auto& n : g.chance_nodes()) {
        Cpd cpd;
        const std::size_t width = m_init.domains.at(n).size();
        const auto& parents = g.parents(n);
        std::size_t total = 1;
        for (const auto& p : parents) total *= m_init.domains.at(p).size();
        for (std::size_t flat = 0; flat < total; ++flat) {
            if (n == x) {
                cpd.rows.push_back({Rational(1) - eps, eps});
            } else if (on_chain.count(n)) {
                std::size_t rem = flat, pred_val = 0;
                for (std::size_t i = parents.size(); i-- > 0;) {
                    std::size_t v = rem % m_init.domains.at(parents[i]).size();
                    rem /= m_init.domains.at(parents[i]).size();
                    if (parents[i] == chain_pred.at(n)) pred_val = v;
                }
                std::vector<Rational> row(width, Rational(0));
                row[pred_val] = Rational(1);
                cpd.rows.push_back(std::move(row));
            } else {
                cpd.rows.push_back({Rational(1)});
            }
        }
        m_init.cpds[n] = std::move(cpd);
    }
    for (const auto& u : g.utility_nodes()) {
        UtilityTable table;
        const auto& parents = g.parents(u);
        std::size_t total = 1;
        for (const auto& p : parents) total *= m_init.domains.at(p).size();
        for (std::size_t flat = 0; flat < total; ++flat) {
            if (u != chain.last()) {
                table.rows.push_back(Rational(0));
                continue;
            }
            std::size_t rem = flat, pred_val = 0;
            for (std::size_t i = parents.size(); i-- > 0;) {
                std::size_t v = rem % m_init.domains.at(parents[i]).size();
                rem /= m_init.domains.at(parents[i]).size();
                if (parents[i] == chain_pred.at(u)) pred_val = v;
            }
            table.rows.push_back(Rational(static_cast<long long>(pred_val)));
        }
        m_init.utilities[u] = std::move(table);
    }

    std::vector<Task> tasks;
    for (const auto& n : chain.nodes)
        if (g.is_decision(n)) tasks.push_back(Task::identity(n, chain_pred.at(n), 2));

    TaskifyResult tk = taskify(g, m_init, tasks, bitstring_cap);
    Solution base = solve(tk.model, limits);
    Rational voc_ext = voc(tk.model, x, true, limits);
    TransportedModel ported = transport_model(tk.hom, tk.model, base.policy);

    WitnessReport report;
    report.kind = "voc";
    report.node = x;
    report.original = g;
    report.transformed = tk.graph;
    report.hom = tk.hom;
    report.model_transformed = tk.model;
    report.model_original = ported.model;
    report.policy_original = ported.policy;
    if (!tk.stages.empty()) report.tree = tk.stages.back().tree;
    report.eu_without = base.optimal_eu;
    report.eu_with = base.optimal_eu + voc_ext;
    report.value = voc_ext;
    report.value_original = voc(ported.model, x, true, limits);
    report.epsilon = eps;
    return report;
}

}  // namespace idvoi
