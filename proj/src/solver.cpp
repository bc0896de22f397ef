#include "idvoi/solver.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include "idvoi/analysis.hpp"
#include "idvoi/errors.hpp"

namespace idvoi {

namespace {

unsigned worker_count() {
    if (const char* env = std::getenv("IDVOI_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    return 1;
}

struct RangeResult {
    bool any = false;
    Rational best_eu;
    unsigned long long best_index = 0;
    unsigned long long count = 0;
};

// Scans policies [lo, hi) with an incrementally advanced odometer and
// keeps the first maximizer of the range.
RangeResult scan_range(const IdModel& m, unsigned long long lo, unsigned long long hi) {
    ModelEvaluator ev(m);
    std::vector<NodeId> decisions = m.graph.decision_nodes();
    std::vector<std::size_t> slot_dom, slot_ctx;
    std::vector<const NodeId*> slot_decision;
    for (const auto& d : decisions) {
        const std::size_t ctxs = ev.context_count(d);
        const std::size_t width = m.domains.at(d).size();
        for (std::size_t c = 0; c < ctxs; ++c) {
            slot_dom.push_back(width);
            slot_ctx.push_back(c);
            slot_decision.push_back(&d);
        }
    }
    const std::size_t slots = slot_dom.size();
    std::vector<std::size_t> choice(slots, 0);
    unsigned long long rem = lo;
    for (std::size_t i = slots; i-- > 0;) {
        choice[i] = rem % slot_dom[i];
        rem /= slot_dom[i];
    }
    Policy pi = deterministic_policy_at(m, lo);
    RangeResult out;
    for (unsigned long long i = lo; i < hi; ++i) {
        Rational eu = ev.expected_total_utility(pi);
        if (!out.any || eu > out.best_eu) {
            out.any = true;
            out.best_eu = eu;
            out.best_index = i;
            out.count = 1;
        } else if (eu == out.best_eu) {
            ++out.count;
        }
        std::size_t s = slots;
        while (s-- > 0) {
            auto& row = pi[*slot_decision[s]].rows[slot_ctx[s]];
            row[choice[s]] = Rational(0);
            if (++choice[s] < slot_dom[s]) {
                row[choice[s]] = Rational(1);
                break;
            }
            choice[s] = 0;
            row[0] = Rational(1);
        }
    }
    return out;
}

}  // namespace

Solution enumerate_optimal(const IdModel& m, const SolverLimits& limits) {
    ModelEvaluator ev(m);
    const unsigned long long total = ev.deterministic_policy_count(limits.enumeration_bound);
    if (total > limits.enumeration_bound)
        throw Error("TooLarge", "deterministic policy space exceeds the enumeration bound");
    const unsigned workers = std::max(1u, std::min<unsigned>(worker_count(), 32));
    RangeResult merged;
    if (workers == 1 || total < 1024) {
        merged = scan_range(m, 0, total);
    } else {
        std::vector<RangeResult> parts(workers);
        std::vector<std::thread> pool;
        const unsigned long long chunk = (total + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            unsigned long long lo = w * chunk;
            unsigned long long hi = std::min<unsigned long long>(total, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, w, lo, hi] { parts[w] = scan_range(m, lo, hi); });
        }
        for (auto& th : pool) th.join();
        for (const auto& part : parts) {
            if (!part.any) continue;
            if (!merged.any || part.best_eu > merged.best_eu) {
                merged = part;
            } else if (part.best_eu == merged.best_eu) {
                merged.count += part.count;
                merged.best_index = std::min(merged.best_index, part.best_index);
            }
        }
    }
    if (!merged.any) throw Error("PolicyIncomplete", "model has an empty outcome space");
    Solution best;
    best.method = "enumeration";
    best.optimal_eu = merged.best_eu;
    best.policy = deterministic_policy_at(m, merged.best_index);
    best.optimal_count = merged.count;
    return best;
}

namespace {

bool ordering_witnesses_solubility(const IdGraph& g, const std::vector<NodeId>& ordering) {
    std::vector<NodeId> decisions = g.decision_nodes();
    if (ordering.size() != decisions.size()) return false;
    std::set<NodeId> seen;
    for (const auto& d : ordering) {
        if (!g.has_node(d) || !g.is_decision(d)) return false;
        if (!seen.insert(d).second) return false;
    }
    MappingExtension ext = mapping_extension(g);
    for (std::size_t i = 0; i < ordering.size(); ++i) {
        std::set<NodeId> reach = ext.graph.utility_reach(ordering[i]);
        std::set<NodeId> given = ext.graph.family(ordering[i]);
        for (std::size_t j = 0; j < i; ++j) {
            if (!d_separated(ext.graph, {ext.policy_nodes.at(ordering[j])}, reach, given))
                return false;
        }
    }
    return true;
}

}  // namespace

Solution backward_induction(const IdModel& m, const std::vector<NodeId>& ordering,
                            const SolverLimits& limits) {
    (void)limits;
    if (!ordering_witnesses_solubility(m.graph, ordering))
        throw Error("OrderingInvalid", "ordering does not witness solubility of the graph");
    ModelEvaluator ev(m);
    // Start from uniform rules; resolve decisions from the last of the
    // ordering back to the first. Solubility makes each locally optimal rule
    // independent of the still-uniform earlier rules.
    Policy pi = uniform_policy(m);
    for (std::size_t oi = ordering.size(); oi-- > 0;) {
        const NodeId& d = ordering[oi];
        const std::size_t ctxs = ev.context_count(d);
        const std::size_t width = m.domains.at(d).size();
        // weight[ctx][action] = sum of P * total utility over outcomes
        std::vector<std::vector<Rational>> weight(ctxs, std::vector<Rational>(width));
        std::vector<std::vector<bool>> reached(ctxs, std::vector<bool>(width, false));
        const std::size_t dpos = ev.index_of(d);
        ev.for_each_outcome(pi, [&](const std::vector<std::size_t>& values, const Rational& p) {
            const std::size_t ctx = ev.row_index(d, values);
            weight[ctx][values[dpos]] += p * ev.total_utility(values);
            reached[ctx][values[dpos]] = true;
        });
        DecisionRule rule;
        rule.rows.assign(ctxs, std::vector<Rational>(width, Rational(0)));
        for (std::size_t c = 0; c < ctxs; ++c) {
            std::size_t argmax = 0;
            for (std::size_t v = 1; v < width; ++v) {
                if (!reached[c][v]) continue;
                if (!reached[c][argmax] || weight[c][v] > weight[c][argmax]) argmax = v;
            }
            rule.rows[c][argmax] = Rational(1);
        }
        pi[d] = std::move(rule);
    }
    Solution out;
    out.method = "backward-induction";
    out.policy = std::move(pi);
    out.optimal_eu = ev.expected_total_utility(out.policy);
    return out;
}

Solution solve(const IdModel& m, const SolverLimits& limits) {
    ModelEvaluator ev(m);
    unsigned long long count = ev.deterministic_policy_count(limits.enumeration_bound);
    if (count <= limits.enumeration_preference) return enumerate_optimal(m, limits);
    SolubilityResult sol = is_soluble(m.graph);
    if (sol.soluble) return backward_induction(m, sol.ordering, limits);
    return enumerate_optimal(m, limits);
}

Rational voi(const IdModel& m, const NodeId& x, const NodeId& d, const SolverLimits& limits) {
    if (!m.graph.has_edge(x, d) || !m.graph.is_decision(d))
        throw Error("NoSuchInfolink", "no infolink " + x + " -> " + d);
    Rational with = solve(m, limits).optimal_eu;
    Rational without = solve(remove_infolink(m, x, d), limits).optimal_eu;
    return with - without;
}

Rational voc(const IdModel& m, const NodeId& x, bool intervention_reads_parents,
             const SolverLimits& limits) {
    if (!m.graph.has_node(x) || !m.graph.is_chance(x))
        throw Error("NotAChanceNode", "'" + x + "' is not a chance node");
    ModelEvaluator ev(m);
    Rational base = solve(m, limits).optimal_eu;
    const std::size_t width = m.domains.at(x).size();
    const std::size_t ctxs = intervention_reads_parents ? ev.context_count(x) : 1;
    // Deterministic mechanisms dom(Pa(x)) -> dom(x), odometer over contexts.
    std::vector<std::size_t> choice(ctxs, 0);
    Rational best = base;
    while (true) {
        IdModel intervened = m;
        Cpd cpd;
        cpd.rows.assign(ev.context_count(x), std::vector<Rational>(width, Rational(0)));
        for (std::size_t c = 0; c < cpd.rows.size(); ++c)
            cpd.rows[c][choice[intervention_reads_parents ? c : 0]] = Rational(1);
        intervened.cpds[x] = std::move(cpd);
        Rational eu = solve(intervened, limits).optimal_eu;
        if (eu > best) best = eu;
        std::size_t i = ctxs;
        bool advanced = false;
        while (i-- > 0) {
            if (++choice[i] < width) {
                advanced = true;
                break;
            }
            choice[i] = 0;
        }
        if (!advanced) break;
    }
    return best - base;
}

}  // namespace idvoi
