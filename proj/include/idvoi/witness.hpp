#pragma once

#include <string>
#include <vector>

#include "idvoi/model.hpp"
#include "idvoi/normalize.hpp"
#include "idvoi/rational.hpp"
#include "idvoi/solver.hpp"
#include "idvoi/systems.hpp"

namespace idvoi {

/// A deterministic assignment a decision must implement: value index of X
/// (base part) -> value index in the decision's base domain.
struct Task {
    NodeId decision;
    NodeId parent;
    std::vector<std::size_t> fn;

    static Task identity(const NodeId& decision, const NodeId& parent, std::size_t domain_size);
};

/// Parameterizes a normal form tree over a base model m0 that covers the
/// non-tree nodes plus the root infolink pair. Tree domains follow the
/// per-system recursion (copies of dom(X) up to the first collider, one
/// boolean along the first obs path, bitstrings indexed by the decision's
/// base domain elsewhere, decision values along the control path); chance
/// mechanics are copies, an indexed bit at the first collider, XOR at later
/// colliders and uniform bitstrings at forks; each tree utility pays Umax
/// when the control-path report is consistent with the info-path value.
///
/// Throws NotNormalForm, DomainBlowup and BaseModelMismatch.
IdModel parameterize_tree(const IdGraph& g3, const SystemTree& t3, const IdModel& m0,
                          const Task& task, std::size_t bitstring_cap = 8);

/// Tree payout for a base model: one plus twice the summed value ranges of
/// its utilities, so that losing a tree utility always outweighs any gain
/// on the base ones, even when a deviating report still wins half the time.
Rational umax_of(const IdModel& m0);

/// Whether pi makes the system's decision implement `task` in every
/// positive-probability context: directly for directed info paths, and as
/// the pair (task value, recovered question bit) otherwise. `split_root`
/// marks models adjusted after the root split, where the claim bit lives
/// in the copy decision and the root reports the bare task value.
bool performs_task(const IdModel& m, const Policy& pi, const System& s, const Task& task,
                   bool split_root = false);

/// performs_task over every system of the tree: `root_task` at the root,
/// identity tasks below.
bool all_tree_tasks_performed(const IdModel& m, const Policy& pi, const SystemTree& t,
                              const Task& root_task, bool split_root = false);

struct TaskStage {
    Task task;
    IdGraph graph;       // stage output graph
    SystemTree tree;     // normal form tree on the stage graph
    IdHom hom;           // stage output -> stage input
    bool root_split = false;
    std::vector<NodeId> added_utilities;
};

struct TaskifyResult {
    IdGraph graph;
    IdModel model;
    IdHom hom;  // graph -> original
    std::vector<TaskStage> stages;
};

/// Iterated single-task extension, latest decision first. The result is a
/// homomorphic extension of m: the original graph is a subgraph on which
/// the model is unchanged, optimal policies perform every task, and the
/// added utility nodes are constant at Umax under optimal play.
TaskifyResult taskify(const IdGraph& g, const IdModel& m, const std::vector<Task>& tasks,
                      std::size_t bitstring_cap = 8);

struct WitnessReport {
    std::string kind;  // "voi" | "voc"
    NodeId node;
    NodeId decision;  // voi only
    IdGraph original;
    IdGraph transformed;
    IdHom hom;  // transformed -> original
    IdModel model_transformed;
    IdModel model_original;  // transported
    Policy policy_original;
    /// voi: optimal EU with and without the infolink on the original-graph
    /// model. voc: best intervened EU and base EU on the extension.
    Rational eu_with, eu_without;
    Rational value;           // certified value on the named model
    Rational value_original;  // recomputed on the transported model
    Rational epsilon;         // voc only
    /// voi: the normal-form tree; voc: the final stage's tree.
    SystemTree tree;
};

/// Builds and certifies a model with positive VoI for x at d. Requires
/// voi_criterion(g,x,d) = Positive (error CriterionFails).
WitnessReport voi_witness(const IdGraph& g, const NodeId& x, const NodeId& d,
                          const SolverLimits& limits = {}, std::size_t bitstring_cap = 8);

/// Builds and certifies a model with positive VoC for x: Bernoulli(eps=1/4)
/// source, a copy chain along a surviving directed path to utility, and
/// identity tasks for the decisions on it. Requires voc_criterion(g,x) =
/// Positive (error CriterionFails).
WitnessReport voc_witness(const IdGraph& g, const NodeId& x, const SolverLimits& limits = {},
                          std::size_t bitstring_cap = 8);

}  // namespace idvoi
