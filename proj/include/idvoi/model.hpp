#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "idvoi/graph.hpp"
#include "idvoi/homomorphism.hpp"
#include "idvoi/rational.hpp"

namespace idvoi {

/// Ordered finite value list. Value strings are only labels; all table
/// arithmetic runs on indices.
struct Domain {
    std::vector<std::string> values;

    std::size_t size() const { return values.size(); }
    std::size_t index_of(const std::string& v) const;

    friend bool operator==(const Domain& a, const Domain& b) { return a.values == b.values; }
    friend bool operator!=(const Domain& a, const Domain& b) { return !(a == b); }
};

Domain boolean_domain();
Domain singleton_domain();
/// All bitstrings of the given length, MSB-first, in counting order; bit j
/// of value index v is its j-th character.
Domain bitstring_domain(std::size_t length);
std::size_t bitstring_bit(std::size_t value, std::size_t j, std::size_t length);
/// Cartesian product, first component major; values joined with '|'.
/// A single factor comes back unwrapped.
Domain product_domain(const std::vector<Domain>& factors);

/// Conditional probability table. rows[context][value]; contexts run over
/// the node's parents in lexicographic parent order, first parent major.
struct Cpd {
    std::vector<std::vector<Rational>> rows;
};

/// Utility table: one exact value per parent context (same context order).
struct UtilityTable {
    std::vector<Rational> rows;
};

/// A quantitative influence diagram: finite domains for chance and decision
/// nodes, exact CPDs for chance nodes, utility tables for utility nodes.
struct IdModel {
    IdGraph graph;
    std::map<NodeId, Domain> domains;
    std::map<NodeId, Cpd> cpds;
    std::map<NodeId, UtilityTable> utilities;
};

struct DecisionRule {
    std::vector<std::vector<Rational>> rows;  // [context][value]
    bool deterministic() const;
};

using Policy = std::map<NodeId, DecisionRule>;

struct ModelVerdict {
    std::vector<std::string> problems;
    bool ok() const { return problems.empty(); }
};

ModelVerdict validate_model(const IdModel& m);

/// Precomputed enumeration plan over a model. Outcome vectors index the
/// chance and decision nodes in topological order; zero-probability
/// branches are skipped during enumeration.
class ModelEvaluator {
public:
    explicit ModelEvaluator(const IdModel& m);

    const IdModel& model() const { return *m_; }
    const std::vector<NodeId>& order() const { return order_; }
    std::size_t index_of(const NodeId& v) const;

    /// Mixed-radix context index of a node's parents under an outcome.
    std::size_t row_index(const NodeId& node, const std::vector<std::size_t>& values) const;
    std::size_t context_count(const NodeId& node) const;

    using OutcomeFn = std::function<void(const std::vector<std::size_t>&, const Rational&)>;
    /// Calls fn for every outcome with positive probability under pi.
    void for_each_outcome(const Policy& pi, const OutcomeFn& fn) const;

    Rational total_utility(const std::vector<std::size_t>& values) const;
    Rational expected_total_utility(const Policy& pi) const;

    /// Number of deterministic policies, saturating at `cap`.
    unsigned long long deterministic_policy_count(unsigned long long cap) const;

private:
    const IdModel* m_;
    std::vector<NodeId> order_;
    std::map<NodeId, std::size_t> pos_;
};

/// Full joint distribution over chance and decision nodes (sparse support).
struct JointDistribution {
    std::vector<NodeId> order;
    std::vector<std::pair<std::vector<std::size_t>, Rational>> support;
};

JointDistribution joint(const IdModel& m, const Policy& pi);
Rational expected_total_utility(const IdModel& m, const Policy& pi);

Policy uniform_policy(const IdModel& m);
/// Throws PolicyIncomplete when a decision lacks a rule or shapes mismatch.
void check_policy(const IdModel& m, const Policy& pi);

/// The model with the infolink x->d removed; tables are untouched, so
/// decision rules for d are keyed by the reduced parent set.
IdModel remove_infolink(const IdModel& m, const NodeId& x, const NodeId& d);

struct TransportedModel {
    IdModel model;
    Policy policy;
};

/// Ports a model and policy from h.source to h.target: each target node's
/// domain is the product of its preimages' domains (source-topological
/// component order), chance and decision tables become joint conditionals,
/// utilities sum over their preimages.
TransportedModel transport_model(const IdHom& h, const IdModel& m_src, const Policy& pi_src);
Policy transport_policy(const IdHom& h, const IdModel& m_src, const Policy& pi_src,
                        const IdModel& m_target);

/// Exact equivalence along h: the target joint equals the source joint
/// under component decoding, and every target utility's value distribution
/// equals the distribution of the summed preimage utilities.
bool equivalent(const IdModel& m, const Policy& pi, const IdModel& m_src, const Policy& pi_src,
                const IdHom& h);

/// Checks that policy transport is a bijection between source deterministic
/// policies (modulo choices in contexts made unreachable by the policy
/// itself) and target deterministic policies, preserving expected utility.
bool policy_bijection_check(const IdHom& h, const IdModel& m_src,
                            unsigned long long policy_cap = 1ull << 16);

/// Visits every deterministic policy in lexicographic order over
/// (decision, context, chosen value).
void for_each_deterministic_policy(const IdModel& m, const std::function<void(const Policy&)>& fn);

/// The index-th deterministic policy in that same order. Workers use this
/// to split the enumeration into index ranges.
Policy deterministic_policy_at(const IdModel& m, unsigned long long index);

/// Canonical serialization of a policy, usable as a map key.
std::string policy_key(const Policy& pi);

}  // namespace idvoi
