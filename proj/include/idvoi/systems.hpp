#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "idvoi/graph.hpp"
#include "idvoi/separation.hpp"

namespace idvoi {

/// A system bundles the paths that make observing x valuable at decision d:
/// an info path x ~~ u active given Fa(d)\{x}, a directed control path
/// d ~> u to the same utility, and a minimal directed obs path to d from
/// every collider on the info path.
struct System {
    NodeId x, d, u;
    TracedPath info;
    TracedPath control;
    std::map<NodeId, TracedPath> obs;  // keyed by the collider heading the path

    bool directed_info() const { return info.is_directed(); }
    /// Nodes appearing on any path of the system.
    std::set<NodeId> nodes() const;
};

enum class PathKind { Info, Control, Obs };

struct PathRef {
    std::size_t system = 0;
    PathKind kind = PathKind::Info;
    NodeId collider;  // only for Obs

    friend bool operator==(const PathRef& a, const PathRef& b) {
        return a.system == b.system && a.kind == b.kind && a.collider == b.collider;
    }
};

/// Systems indexed from the root (index 0 by construction); every non-root
/// system's infolink lies on its predecessor path.
struct SystemTree {
    std::vector<System> systems;
    std::size_t root = 0;
    std::map<std::size_t, PathRef> pred;  // non-root index -> predecessor path

    const TracedPath& path(const PathRef& ref) const;
    /// Children of system i, ascending.
    std::vector<std::size_t> children(std::size_t i) const;
    /// i and all systems below it.
    std::vector<std::size_t> subtree(std::size_t i) const;
};

struct SystemElements {
    std::set<NodeId> obs_nodes;        // penultimate node of each obs path
    std::optional<NodeId> question;    // closest-to-u fork on the info path
    std::set<NodeId> back;             // x ~~ question segment plus obs paths, minus d
    std::set<NodeId> front;
};

SystemElements elements(const System& s);

/// Checks the four system invariants; empty result means valid.
std::vector<std::string> validate_system(const IdGraph& g, const System& s);

/// Tree-level validation: systems valid, pred table total and acyclic with
/// a single self-predecessor root, and each infolink on its predecessor path.
std::vector<std::string> validate_tree(const IdGraph& g, const SystemTree& t);

/// Builds the deterministic system for a requisite infolink x->d: shortest
/// (then lexicographic) active info path to a reachable utility, shortest
/// directed control path to the same utility, BFS obs paths.
System construct_system(const IdGraph& gstar, const NodeId& x, const NodeId& d);

/// Grows systems until every infolink traversed by a path of some system
/// has one, rooted at x->d. gstar must be a minimal d-reduction so every
/// traversed infolink is requisite.
SystemTree build_full_tree(const IdGraph& gstar, const NodeId& x, const NodeId& d);

struct NormalFormVerdict {
    bool position_uniqueness = false;  // (a)
    bool no_backdoor_infopaths = false;  // (b)
    bool no_redundant_links = false;  // (c)
    std::vector<std::string> witnesses;
    bool ok() const { return position_uniqueness && no_backdoor_infopaths && no_redundant_links; }
};

/// The three normal-form properties. (a) allows the standard shared
/// positions: colliders heading their obs path, the system utility on both
/// of its paths, and infolink nodes shared with child systems. (c) permits
/// edges into decisions and edges not incident to any tree-interior node
/// (tree nodes other than the root infolink pair).
NormalFormVerdict normal_form_check(const IdGraph& g, const SystemTree& t);

/// Tree nodes other than the root system's x and d.
std::set<NodeId> tree_interior_nodes(const SystemTree& t);

/// d-separation of the back section from the out-of-system parents of the
/// system's decision, given its in-system parents and the obs nodes of the
/// system and its descendants. Requires a normal-form tree.
bool knowledge_separation_check(const IdGraph& g, const SystemTree& t, std::size_t system);

/// Named structural properties of systems and trees in soluble graphs,
/// asserted by the test suites.
bool no_infolinks_in_back_section(const IdGraph& g, const System& s);
bool infolinks_in_system_are_descendants(const IdGraph& g, const System& s);
bool parents_of_ancestor_decisions_are_parents(const IdGraph& g, const System& s);
bool decisions_in_descendant_systems_are_descendants(const IdGraph& g, const SystemTree& t);
bool infolinks_to_ancestor_decisions_only_from_obsnodes(const IdGraph& g, const SystemTree& t);
bool within_tree_links_between_systems_only_via_x_d(const IdGraph& g, const SystemTree& t);

/// Shortest directed path from a to b, lexicographic tie-break; nullopt if
/// unreachable.
std::optional<TracedPath> shortest_directed_path(const IdGraph& g, const NodeId& a, const NodeId& b);

}  // namespace idvoi
