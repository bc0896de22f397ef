#pragma once

#include <optional>
#include <string>
#include <vector>

#include "idvoi/model.hpp"

namespace idvoi {

struct SolverLimits {
    /// Hard cap on the deterministic policy space for enumeration.
    unsigned long long enumeration_bound = 1ull << 24;
    /// Below this, auto solving prefers enumeration over backward induction.
    unsigned long long enumeration_preference = 1ull << 12;
};

struct Solution {
    Rational optimal_eu;
    Policy policy;
    /// Number of optimal deterministic policies; absent under backward
    /// induction, which does not enumerate.
    std::optional<unsigned long long> optimal_count;
    std::string method;  // "enumeration" | "backward-induction"
};

/// Exhaustive maximization over deterministic policies. Returns the
/// lexicographically least optimizer. Throws TooLarge past the bound.
Solution enumerate_optimal(const IdModel& m, const SolverLimits& limits = {});

/// Leaf-to-root exact solving along a decision ordering that witnesses
/// solubility (error OrderingInvalid otherwise). Each rule is locally
/// optimal; ties break to the least action index.
Solution backward_induction(const IdModel& m, const std::vector<NodeId>& ordering,
                            const SolverLimits& limits = {});

/// Enumeration when the policy space is small, backward induction when the
/// graph is soluble, enumeration up to the hard bound otherwise.
Solution solve(const IdModel& m, const SolverLimits& limits = {});

/// EU*(m) - EU*(m without x->d). Always >= 0.
Rational voi(const IdModel& m, const NodeId& x, const NodeId& d, const SolverLimits& limits = {});

/// Max over deterministic intervention functions on x (and policies) of the
/// attainable EU, minus EU*(m). `intervention_reads_parents` selects whether
/// the intervened mechanism may depend on Pa(x) or must be constant.
Rational voc(const IdModel& m, const NodeId& x, bool intervention_reads_parents = true,
             const SolverLimits& limits = {});

}  // namespace idvoi
