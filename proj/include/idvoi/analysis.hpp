#pragma once

#include <optional>
#include <string>
#include <vector>

#include "idvoi/graph.hpp"
#include "idvoi/separation.hpp"

namespace idvoi {

struct SolubilityResult {
    bool soluble = false;
    /// A witnessing decision ordering when soluble.
    std::vector<NodeId> ordering;
    /// When insoluble: a pair (policy node, decision) whose separation
    /// requirement blocked the deepest ordering attempt, plus an active
    /// path witnessing the failure.
    struct FailingPair {
        NodeId policy_node;
        NodeId decision;
        TracedPath witness;
    };
    std::optional<FailingPair> failing_pair;
};

/// Decides solubility by exhaustive ordering search over the precomputed
/// pairwise relation R(j,i) = Pi^j d-separated from U(D^i) given Fa(D^i)
/// in the mapping extension.
SolubilityResult is_soluble(const IdGraph& g);

/// True iff x is d-connected to d's reachable utilities given Fa(d)\{x}.
/// Requires the edge x->d (error NoSuchInfolink).
bool requisite(const IdGraph& g, const NodeId& x, const NodeId& d);

struct ReductionTrace {
    struct Removal {
        NodeId from, to;
        /// The separation certificate at removal time: {from} was separated
        /// from these utilities given this conditioning set.
        std::set<NodeId> utilities;
        std::set<NodeId> given;
    };
    std::vector<Removal> removals;
};

/// Iterated removal of nonrequisite infolinks to the unique fixpoint.
std::pair<IdGraph, ReductionTrace> minimal_d_reduction(const IdGraph& g);

enum class CriterionVerdict { Positive, Zero, NotApplicable };

struct CriterionResult {
    CriterionVerdict verdict;
    std::string reason;  // set when NotApplicable
    bool positive() const { return verdict == CriterionVerdict::Positive; }
};

/// VoI criterion for observing x at decision d: Positive iff x->d survives
/// the minimal d-reduction. If x->d is absent the edge is added first; the
/// augmented graph must be soluble. Decision-valued x is NotApplicable.
CriterionResult voi_criterion(const IdGraph& g, const NodeId& x, const NodeId& d);

/// VoC criterion for chance node x: Positive iff x has a directed path to
/// a utility node inside the minimal d-reduction.
CriterionResult voc_criterion(const IdGraph& g, const NodeId& x);

}  // namespace idvoi
