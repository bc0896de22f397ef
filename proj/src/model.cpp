#include "idvoi/model.hpp"

#include <algorithm>
#include <sstream>

#include "idvoi/errors.hpp"

namespace idvoi {

std::size_t Domain::index_of(const std::string& v) const {
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] == v) return i;
    throw Error("UnknownValue", "value '" + v + "' not in domain");
}

Domain boolean_domain() { return Domain{{"0", "1"}}; }

Domain singleton_domain() { return Domain{{"0"}}; }

Domain bitstring_domain(std::size_t length) {
    Domain d;
    const std::size_t n = static_cast<std::size_t>(1) << length;
    d.values.reserve(n);
    for (std::size_t v = 0; v < n; ++v) {
        std::string s(length, '0');
        for (std::size_t j = 0; j < length; ++j)
            if (bitstring_bit(v, j, length)) s[j] = '1';
        d.values.push_back(std::move(s));
    }
    return d;
}

std::size_t bitstring_bit(std::size_t value, std::size_t j, std::size_t length) {
    return (value >> (length - 1 - j)) & 1u;
}

Domain product_domain(const std::vector<Domain>& factors) {
    if (factors.empty()) return singleton_domain();
    if (factors.size() == 1) return factors[0];
    Domain out;
    std::size_t total = 1;
    for (const auto& f : factors) total *= f.size();
    out.values.reserve(total);
    std::vector<std::size_t> idx(factors.size(), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (std::size_t i = factors.size(); i-- > 0;) {
            idx[i] = rem % factors[i].size();
            rem /= factors[i].size();
        }
        std::string v = factors[0].values[idx[0]];
        for (std::size_t i = 1; i < factors.size(); ++i) v += "|" + factors[i].values[idx[i]];
        out.values.push_back(std::move(v));
    }
    return out;
}

bool DecisionRule::deterministic() const {
    for (const auto& row : rows) {
        for (const auto& p : row)
            if (!p.is_zero() && p != Rational(1)) return false;
    }
    return true;
}

ModelVerdict validate_model(const IdModel& m) {
    ModelVerdict out;
    ModelEvaluator ev(m);
    const Rational one(1);
    for (const auto& [n, k] : m.graph.nodes()) {
        if (k == NodeKind::Utility) {
            if (!m.utilities.count(n)) {
                out.problems.push_back("utility node '" + n + "' has no table");
                continue;
            }
            if (m.utilities.at(n).rows.size() != ev.context_count(n))
                out.problems.push_back("utility table of '" + n + "' has wrong row count");
            continue;
        }
        if (!m.domains.count(n)) {
            out.problems.push_back("node '" + n + "' has no domain");
            continue;
        }
        const Domain& dom = m.domains.at(n);
        if (dom.values.empty()) out.problems.push_back("domain of '" + n + "' is empty");
        std::set<std::string> distinct(dom.values.begin(), dom.values.end());
        if (distinct.size() != dom.values.size())
            out.problems.push_back("domain of '" + n + "' has duplicate values");
        if (k == NodeKind::Chance) {
            if (!m.cpds.count(n)) {
                out.problems.push_back("chance node '" + n + "' has no CPD");
                continue;
            }
            const Cpd& cpd = m.cpds.at(n);
            if (cpd.rows.size() != ev.context_count(n)) {
                out.problems.push_back("CPD of '" + n + "' has wrong row count");
                continue;
            }
            for (std::size_t r = 0; r < cpd.rows.size(); ++r) {
                if (cpd.rows[r].size() != dom.size()) {
                    out.problems.push_back("CPD row of '" + n + "' has wrong width");
                    continue;
                }
                Rational sum;
                for (const auto& p : cpd.rows[r]) {
                    if (p.sign() < 0) out.problems.push_back("CPD of '" + n + "' has a negative entry");
                    sum += p;
                }
                if (sum != one)
                    out.problems.push_back("CPD row " + std::to_string(r) + " of '" + n +
                                           "' sums to " + sum.str());
            }
        }
    }
    return out;
}

ModelEvaluator::ModelEvaluator(const IdModel& m) : m_(&m) {
    for (const auto& n : m.graph.topo_order()) {
        if (m.graph.is_utility(n)) continue;
        pos_[n] = order_.size();
        order_.push_back(n);
    }
}

std::size_t ModelEvaluator::index_of(const NodeId& v) const {
    auto it = pos_.find(v);
    if (it == pos_.end()) throw Error("UnknownNode", "'" + v + "' is not a chance or decision node");
    return it->second;
}

std::size_t ModelEvaluator::row_index(const NodeId& node, const std::vector<std::size_t>& values) const {
    std::size_t idx = 0;
    for (const auto& p : m_->graph.parents(node)) idx = idx * m_->domains.at(p).size() + values[pos_.at(p)];
    return idx;
}

std::size_t ModelEvaluator::context_count(const NodeId& node) const {
    std::size_t n = 1;
    for (const auto& p : m_->graph.parents(node)) n *= m_->domains.at(p).size();
    return n;
}

void ModelEvaluator::for_each_outcome(const Policy& pi, const OutcomeFn& fn) const {
    std::vector<std::size_t> values(order_.size(), 0);
    std::function<void(std::size_t, const Rational&)> rec = [&](std::size_t i, const Rational& prob) {
        if (i == order_.size()) {
            fn(values, prob);
            return;
        }
        const NodeId& node = order_[i];
        const std::size_t row = row_index(node, values);
        const std::vector<Rational>* dist = nullptr;
        if (m_->graph.is_chance(node)) {
            dist = &m_->cpds.at(node).rows.at(row);
        } else {
            auto it = pi.find(node);
            if (it == pi.end()) throw Error("PolicyIncomplete", "no rule for decision '" + node + "'");
            dist = &it->second.rows.at(row);
        }
        for (std::size_t v = 0; v < dist->size(); ++v) {
            if ((*dist)[v].is_zero()) continue;
            values[i] = v;
            rec(i + 1, prob * (*dist)[v]);
        }
        values[i] = 0;
    };
    rec(0, Rational(1));
}

Rational ModelEvaluator::total_utility(const std::vector<std::size_t>& values) const {
    Rational sum;
    for (const auto& [u, table] : m_->utilities) sum += table.rows.at(row_index(u, values));
    return sum;
}

Rational ModelEvaluator::expected_total_utility(const Policy& pi) const {
    Rational eu;
    for_each_outcome(pi, [&](const std::vector<std::size_t>& values, const Rational& p) {
        eu += p * total_utility(values);
    });
    return eu;
}

unsigned long long ModelEvaluator::deterministic_policy_count(unsigned long long cap) const {
    unsigned long long total = 1;
    for (const auto& d : m_->graph.decision_nodes()) {
        const unsigned long long k = m_->domains.at(d).size();
        for (std::size_t c = 0; c < context_count(d); ++c) {
            if (total > cap / k) return cap + 1;
            total *= k;
        }
    }
    return total;
}

JointDistribution joint(const IdModel& m, const Policy& pi) {
    check_policy(m, pi);
    ModelEvaluator ev(m);
    JointDistribution out;
    out.order = ev.order();
    ev.for_each_outcome(pi, [&](const std::vector<std::size_t>& values, const Rational& p) {
        out.support.push_back({values, p});
    });
    return out;
}

Rational expected_total_utility(const IdModel& m, const Policy& pi) {
    check_policy(m, pi);
    return ModelEvaluator(m).expected_total_utility(pi);
}

Policy uniform_policy(const IdModel& m) {
    Policy pi;
    ModelEvaluator ev(m);
    for (const auto& d : m.graph.decision_nodes()) {
        const std::size_t k = m.domains.at(d).size();
        DecisionRule rule;
        rule.rows.assign(ev.context_count(d),
                         std::vector<Rational>(k, Rational(1, static_cast<long long>(k))));
        pi[d] = std::move(rule);
    }
    return pi;
}

void check_policy(const IdModel& m, const Policy& pi) {
    ModelEvaluator ev(m);
    for (const auto& d : m.graph.decision_nodes()) {
        auto it = pi.find(d);
        if (it == pi.end()) throw Error("PolicyIncomplete", "no rule for decision '" + d + "'");
        if (it->second.rows.size() != ev.context_count(d))
            throw Error("PolicyIncomplete", "rule for '" + d + "' has wrong context count");
        for (const auto& row : it->second.rows)
            if (row.size() != m.domains.at(d).size())
                throw Error("PolicyIncomplete", "rule row for '" + d + "' has wrong width");
    }
}

IdModel remove_infolink(const IdModel& m, const NodeId& x, const NodeId& d) {
    if (!m.graph.has_edge(x, d)) throw Error("NoSuchEdge", "no edge " + x + " -> " + d);
    if (!m.graph.is_decision(d)) throw Error("NotAnInfolink", "'" + d + "' is not a decision");
    IdModel out = m;
    out.graph = m.graph.with_edge_removed(x, d);
    return out;
}

namespace {

// Shared bookkeeping for porting a model along a homomorphism: per target
// node, its preimage components in source-topological order, with strides
// for component decoding.
struct TransportPlan {
    std::map<NodeId, std::vector<NodeId>> components;
    std::map<NodeId, std::vector<std::size_t>> comp_sizes;

    static TransportPlan make(const IdHom& h, const IdModel& m_src) {
        TransportPlan plan;
        std::map<NodeId, std::size_t> topo_pos;
        std::size_t i = 0;
        for (const auto& n : h.source.topo_order()) topo_pos[n] = i++;
        for (const auto& [t, k] : h.target.nodes()) plan.components[t];
        for (const auto& [s, t] : h.map) plan.components[t].push_back(s);
        for (auto& [t, comps] : plan.components) {
            std::sort(comps.begin(), comps.end(), [&](const NodeId& a, const NodeId& b) {
                return topo_pos.at(a) < topo_pos.at(b);
            });
            if (h.target.kind(t) == NodeKind::Utility) continue;
            for (const auto& c : comps) plan.comp_sizes[t].push_back(m_src.domains.at(c).size());
        }
        return plan;
    }

    // Value index of component `c` of target node `t` inside flat index v.
    std::size_t component_value(const NodeId& t, std::size_t comp, std::size_t v) const {
        const auto& sizes = comp_sizes.at(t);
        for (std::size_t i = sizes.size(); i-- > comp + 1;) v /= sizes[i];
        return v % sizes[comp];
    }
};

// Flat context index over `parents` (lexicographic, first major) given a
// per-parent value chooser.
template <typename GetSize, typename Fn>
void for_each_context(const std::vector<NodeId>& parents, GetSize size_of, Fn fn) {
    std::size_t total = 1;
    for (const auto& p : parents) total *= size_of(p);
    std::vector<std::size_t> vals(parents.size(), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (std::size_t i = parents.size(); i-- > 0;) {
            vals[i] = rem % size_of(parents[i]);
            rem /= size_of(parents[i]);
        }
        fn(flat, vals);
    }
}

// Probability (or rule weight) that source node `s` takes value sv given
// decoded source-parent values.
Rational source_conditional(const IdModel& m_src, const Policy* pi_src, const NodeId& s,
                            std::size_t sv, const std::map<NodeId, std::size_t>& src_values) {
    std::size_t row = 0;
    for (const auto& p : m_src.graph.parents(s)) row = row * m_src.domains.at(p).size() + src_values.at(p);
    if (m_src.graph.is_chance(s)) return m_src.cpds.at(s).rows.at(row).at(sv);
    return pi_src->at(s).rows.at(row).at(sv);
}

}  // namespace

TransportedModel transport_model(const IdHom& h, const IdModel& m_src, const Policy& pi_src) {
    if (!h.verified) throw Error("UnverifiedHom", "transport requires a verified homomorphism");
    check_policy(m_src, pi_src);
    TransportPlan plan = TransportPlan::make(h, m_src);

    TransportedModel out;
    out.model.graph = h.target;
    for (const auto& [t, k] : h.target.nodes()) {
        if (k == NodeKind::Utility) continue;
        std::vector<Domain> factors;
        for (const auto& c : plan.components.at(t)) factors.push_back(m_src.domains.at(c));
        out.model.domains[t] = product_domain(factors);
    }

    auto target_size = [&](const NodeId& n) { return out.model.domains.at(n).size(); };

    for (const auto& [t, k] : h.target.nodes()) {
        const auto& parents = h.target.parents(t);
        const auto& comps = plan.components.at(t);
        if (k == NodeKind::Utility) {
            UtilityTable table;
            for_each_context(parents, target_size, [&](std::size_t, const std::vector<std::size_t>& pv) {
                std::map<NodeId, std::size_t> src_values;
                for (std::size_t i = 0; i < parents.size(); ++i) {
                    const auto& pcomps = plan.components.at(parents[i]);
                    for (std::size_t c = 0; c < pcomps.size(); ++c)
                        src_values[pcomps[c]] = plan.component_value(parents[i], c, pv[i]);
                }
                Rational sum;
                for (const auto& u : comps) {
                    std::size_t row = 0;
                    for (const auto& p : m_src.graph.parents(u))
                        row = row * m_src.domains.at(p).size() + src_values.at(p);
                    sum += m_src.utilities.at(u).rows.at(row);
                }
                table.rows.push_back(sum);
            });
            out.model.utilities[t] = std::move(table);
            continue;
        }
        std::vector<std::vector<Rational>> rows;
        for_each_context(parents, target_size, [&](std::size_t, const std::vector<std::size_t>& pv) {
            std::map<NodeId, std::size_t> src_values;
            for (std::size_t i = 0; i < parents.size(); ++i) {
                const auto& pcomps = plan.components.at(parents[i]);
                for (std::size_t c = 0; c < pcomps.size(); ++c)
                    src_values[pcomps[c]] = plan.component_value(parents[i], c, pv[i]);
            }
            std::vector<Rational> row;
            const std::size_t width = out.model.domains.at(t).size();
            for (std::size_t v = 0; v < width; ++v) {
                Rational p(1);
                std::map<NodeId, std::size_t> local = src_values;
                for (std::size_t c = 0; c < comps.size(); ++c) {
                    std::size_t sv = plan.component_value(t, c, v);
                    p *= source_conditional(m_src, &pi_src, comps[c], sv, local);
                    local[comps[c]] = sv;
                    if (p.is_zero()) break;
                }
                if (comps.empty()) p = v == 0 ? Rational(1) : Rational(0);
                row.push_back(p);
            }
            rows.push_back(std::move(row));
        });
        if (k == NodeKind::Chance)
            out.model.cpds[t] = Cpd{std::move(rows)};
        else
            out.policy[t] = DecisionRule{std::move(rows)};
    }
    return out;
}

Policy transport_policy(const IdHom& h, const IdModel& m_src, const Policy& pi_src,
                        const IdModel& m_target) {
    TransportedModel tm = transport_model(h, m_src, pi_src);
    if (!(tm.model.graph == m_target.graph))
        throw Error("DomainMismatch", "target model does not match the homomorphism target");
    return tm.policy;
}

bool equivalent(const IdModel& m, const Policy& pi, const IdModel& m_src, const Policy& pi_src,
                const IdHom& h) {
    if (!h.verified) throw Error("UnverifiedHom", "equivalence requires a verified homomorphism");
    TransportPlan plan = TransportPlan::make(h, m_src);
    ModelEvaluator src_ev(m_src);
    ModelEvaluator tgt_ev(m);

    // Project the source joint onto target assignments and collect the
    // distribution of each target utility's preimage sum.
    std::map<std::vector<std::size_t>, Rational> projected;
    std::map<NodeId, std::map<Rational, Rational>> src_util_dist;
    const auto& tgt_order = tgt_ev.order();
    src_ev.for_each_outcome(pi_src, [&](const std::vector<std::size_t>& sv, const Rational& p) {
        std::vector<std::size_t> tv(tgt_order.size(), 0);
        for (std::size_t i = 0; i < tgt_order.size(); ++i) {
            std::size_t flat = 0;
            for (const auto& c : plan.components.at(tgt_order[i]))
                flat = flat * m_src.domains.at(c).size() + sv[src_ev.index_of(c)];
            tv[i] = flat;
        }
        projected[tv] += p;
        for (const auto& u : m.graph.utility_nodes()) {
            Rational sum;
            for (const auto& su : plan.components.at(u)) {
                std::size_t row = 0;
                for (const auto& sp : m_src.graph.parents(su))
                    row = row * m_src.domains.at(sp).size() + sv[src_ev.index_of(sp)];
                sum += m_src.utilities.at(su).rows.at(row);
            }
            src_util_dist[u][sum] += p;
        }
    });

    std::map<std::vector<std::size_t>, Rational> target_joint;
    std::map<NodeId, std::map<Rational, Rational>> tgt_util_dist;
    tgt_ev.for_each_outcome(pi, [&](const std::vector<std::size_t>& tv, const Rational& p) {
        target_joint[tv] += p;
        for (const auto& u : m.graph.utility_nodes())
            tgt_util_dist[u][m.utilities.at(u).rows.at(tgt_ev.row_index(u, tv))] += p;
    });

    if (projected != target_joint) return false;
    for (const auto& u : m.graph.utility_nodes())
        if (src_util_dist[u] != tgt_util_dist[u]) return false;
    return true;
}

std::string policy_key(const Policy& pi) {
    std::ostringstream os;
    for (const auto& [d, rule] : pi) {
        os << d << '{';
        for (const auto& row : rule.rows) {
            for (const auto& p : row) os << p.str() << ',';
            os << ';';
        }
        os << '}';
    }
    return os.str();
}

void for_each_deterministic_policy(const IdModel& m,
                                   const std::function<void(const Policy&)>& fn) {
    ModelEvaluator ev(m);
    std::vector<NodeId> decisions = m.graph.decision_nodes();
    std::vector<std::size_t> ctx_counts, dom_sizes, slot_dom;
    for (const auto& d : decisions) {
        ctx_counts.push_back(ev.context_count(d));
        dom_sizes.push_back(m.domains.at(d).size());
        for (std::size_t c = 0; c < ctx_counts.back(); ++c) slot_dom.push_back(dom_sizes.back());
    }
    const std::size_t slots = slot_dom.size();
    std::vector<std::size_t> choice(slots, 0);
    auto build = [&]() {
        Policy pi;
        std::size_t off = 0;
        for (std::size_t i = 0; i < decisions.size(); ++i) {
            DecisionRule rule;
            rule.rows.assign(ctx_counts[i], std::vector<Rational>(dom_sizes[i], Rational(0)));
            for (std::size_t c = 0; c < ctx_counts[i]; ++c) rule.rows[c][choice[off + c]] = Rational(1);
            pi[decisions[i]] = std::move(rule);
            off += ctx_counts[i];
        }
        return pi;
    };
    // Last slot increments fastest, so policies come out in lexicographic
    // order over (decision, context, value).
    while (true) {
        fn(build());
        std::size_t i = slots;
        bool advanced = false;
        while (i-- > 0) {
            if (++choice[i] < slot_dom[i]) {
                advanced = true;
                break;
            }
            choice[i] = 0;
        }
        if (!advanced) return;
    }
}

Policy deterministic_policy_at(const IdModel& m, unsigned long long index) {
    ModelEvaluator ev(m);
    std::vector<NodeId> decisions = m.graph.decision_nodes();
    std::vector<std::size_t> ctx_counts, dom_sizes, slot_dom;
    for (const auto& d : decisions) {
        ctx_counts.push_back(ev.context_count(d));
        dom_sizes.push_back(m.domains.at(d).size());
        for (std::size_t c = 0; c < ctx_counts.back(); ++c) slot_dom.push_back(dom_sizes.back());
    }
    std::vector<std::size_t> choice(slot_dom.size(), 0);
    for (std::size_t i = slot_dom.size(); i-- > 0;) {
        choice[i] = index % slot_dom[i];
        index /= slot_dom[i];
    }
    if (index != 0) throw Error("TooLarge", "policy index out of range");
    Policy pi;
    std::size_t off = 0;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        DecisionRule rule;
        rule.rows.assign(ctx_counts[i], std::vector<Rational>(dom_sizes[i], Rational(0)));
        for (std::size_t c = 0; c < ctx_counts[i]; ++c) rule.rows[c][choice[off + c]] = Rational(1);
        pi[decisions[i]] = std::move(rule);
        off += ctx_counts[i];
    }
    return pi;
}

bool policy_bijection_check(const IdHom& h, const IdModel& m_src, unsigned long long policy_cap) {
    if (!h.verified) throw Error("UnverifiedHom", "bijection check requires a verified homomorphism");
    ModelEvaluator src_ev(m_src);
    TransportedModel ported = transport_model(h, m_src, uniform_policy(m_src));
    ModelEvaluator tgt_ev(ported.model);
    if (src_ev.deterministic_policy_count(policy_cap) > policy_cap ||
        tgt_ev.deterministic_policy_count(policy_cap) > policy_cap)
        throw Error("TooLarge", "policy space exceeds the configured bound");

    std::map<std::string, Rational> image;  // transported policy -> source EU
    bool consistent = true;
    for_each_deterministic_policy(m_src, [&](const Policy& pi) {
        Policy tpi = transport_policy(h, m_src, pi, ported.model);
        Rational eu = src_ev.expected_total_utility(pi);
        auto [it, inserted] = image.emplace(policy_key(tpi), eu);
        if (!inserted && it->second != eu) consistent = false;
    });
    if (!consistent) return false;

    std::size_t target_count = 0;
    bool all_match = true;
    for_each_deterministic_policy(ported.model, [&](const Policy& tpi) {
        ++target_count;
        auto it = image.find(policy_key(tpi));
        if (it == image.end()) {
            all_match = false;
            return;
        }
        if (tgt_ev.expected_total_utility(tpi) != it->second) all_match = false;
    });
    return all_match && image.size() == target_count;
}

}  // namespace idvoi
