#include "idvoi/json_io.hpp"

#include <sstream>

#include "idvoi/errors.hpp"

namespace idvoi {

namespace {

// Parent-assignment key: "()" for no parents, else comma-joined values in
// lexicographic parent order.
std::string context_key(const IdModel& m, const IdGraph& g, const NodeId& node, std::size_t flat) {
    const auto& parents = g.parents(node);
    if (parents.empty()) return "()";
    std::vector<std::string> parts(parents.size());
    for (std::size_t i = parents.size(); i-- > 0;) {
        const Domain& dom = m.domains.at(parents[i]);
        parts[i] = dom.values[flat % dom.size()];
        flat /= dom.size();
    }
    std::string out = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) out += "," + parts[i];
    return out;
}

std::size_t context_from_key(const IdModel& m, const IdGraph& g, const NodeId& node,
                             const std::string& key) {
    const auto& parents = g.parents(node);
    if (parents.empty()) {
        if (key != "()") throw Error("BadModelJson", "expected '()' context for '" + node + "'");
        return 0;
    }
    std::vector<std::string> parts;
    std::stringstream ss(key);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    if (parts.size() != parents.size())
        throw Error("BadModelJson", "context '" + key + "' has wrong arity for '" + node + "'");
    std::size_t flat = 0;
    for (std::size_t i = 0; i < parents.size(); ++i) {
        const Domain& dom = m.domains.at(parents[i]);
        flat = flat * dom.size() + dom.index_of(parts[i]);
    }
    return flat;
}

std::size_t context_count_in(const IdModel& m, const IdGraph& g, const NodeId& node) {
    std::size_t n = 1;
    for (const auto& p : g.parents(node)) n *= m.domains.at(p).size();
    return n;
}

}  // namespace

Json graph_to_json(const IdGraph& g) {
    Json nodes = Json::array();
    for (const auto& [n, k] : g.nodes()) nodes.push_back({{"id", n}, {"kind", kind_name(k)}});
    Json edges = Json::array();
    for (const auto& [a, b] : g.edges()) edges.push_back(Json::array({a, b}));
    return {{"nodes", nodes}, {"edges", edges}};
}

IdGraph graph_from_json(const Json& j) {
    std::vector<std::pair<NodeId, NodeKind>> nodes;
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const auto& n : j.at("nodes"))
        nodes.push_back({n.at("id").get<std::string>(), kind_from_name(n.at("kind").get<std::string>())});
    for (const auto& e : j.at("edges"))
        edges.push_back({e.at(0).get<std::string>(), e.at(1).get<std::string>()});
    return IdGraph::build(nodes, edges);
}

Json hom_to_json(const IdHom& h) {
    Json map = Json::object();
    for (const auto& [s, t] : h.map) map[s] = t;
    return {{"source", graph_to_json(h.source)}, {"target", graph_to_json(h.target)}, {"map", map}};
}

IdHom hom_from_json(const Json& j) {
    IdHom h;
    h.source = graph_from_json(j.at("source"));
    h.target = graph_from_json(j.at("target"));
    for (const auto& [k, v] : j.at("map").items()) h.map[k] = v.get<std::string>();
    return h;
}

Json model_to_json(const IdModel& m) {
    Json out;
    out["graph"] = graph_to_json(m.graph);
    Json domains = Json::object();
    for (const auto& [n, dom] : m.domains) domains[n] = dom.values;
    out["domains"] = domains;
    Json cpds = Json::object();
    for (const auto& [n, cpd] : m.cpds) {
        Json table = Json::object();
        for (std::size_t c = 0; c < cpd.rows.size(); ++c) {
            Json row = Json::object();
            const Domain& dom = m.domains.at(n);
            for (std::size_t v = 0; v < cpd.rows[c].size(); ++v)
                row[dom.values[v]] = cpd.rows[c][v].str();
            table[context_key(m, m.graph, n, c)] = row;
        }
        cpds[n] = table;
    }
    out["cpds"] = cpds;
    Json utils = Json::object();
    for (const auto& [n, table] : m.utilities) {
        Json rows = Json::object();
        for (std::size_t c = 0; c < table.rows.size(); ++c)
            rows[context_key(m, m.graph, n, c)] = table.rows[c].str();
        utils[n] = rows;
    }
    out["utilities"] = utils;
    return out;
}

IdModel model_from_json(const Json& j) {
    IdModel m;
    m.graph = graph_from_json(j.at("graph"));
    for (const auto& [n, values] : j.at("domains").items()) {
        Domain dom;
        for (const auto& v : values) dom.values.push_back(v.get<std::string>());
        m.domains[n] = dom;
    }
    for (const auto& [n, table] : j.at("cpds").items()) {
        Cpd cpd;
        cpd.rows.assign(context_count_in(m, m.graph, n),
                        std::vector<Rational>(m.domains.at(n).size(), Rational(0)));
        for (const auto& [key, row] : table.items()) {
            std::size_t c = context_from_key(m, m.graph, n, key);
            for (const auto& [val, p] : row.items())
                cpd.rows[c][m.domains.at(n).index_of(val)] = Rational::parse(p.get<std::string>());
        }
        m.cpds[n] = std::move(cpd);
    }
    for (const auto& [n, rows] : j.at("utilities").items()) {
        UtilityTable table;
        table.rows.assign(context_count_in(m, m.graph, n), Rational(0));
        for (const auto& [key, v] : rows.items())
            table.rows[context_from_key(m, m.graph, n, key)] = Rational::parse(v.get<std::string>());
        m.utilities[n] = std::move(table);
    }
    return m;
}

Json policy_to_json(const Policy& pi) {
    Json out = Json::object();
    for (const auto& [d, rule] : pi) {
        Json rows = Json::array();
        for (const auto& row : rule.rows) {
            Json r = Json::array();
            for (const auto& p : row) r.push_back(p.str());
            rows.push_back(r);
        }
        out[d] = rows;
    }
    return out;
}

Policy policy_from_json(const Json& j, const IdModel& m) {
    Policy pi;
    for (const auto& [d, rows] : j.items()) {
        DecisionRule rule;
        for (const auto& row : rows) {
            std::vector<Rational> r;
            for (const auto& p : row) r.push_back(Rational::parse(p.get<std::string>()));
            rule.rows.push_back(std::move(r));
        }
        pi[d] = std::move(rule);
    }
    check_policy(m, pi);
    return pi;
}

namespace {

Json path_to_json(const TracedPath& p) {
    Json nodes = Json::array();
    for (const auto& n : p.nodes) nodes.push_back(n);
    Json steps = Json::array();
    for (const auto& s : p.steps) steps.push_back(s.forward ? "fwd" : "bwd");
    return {{"nodes", nodes}, {"steps", steps}};
}

TracedPath path_from_json(const Json& j, const IdGraph& g) {
    std::vector<NodeId> nodes;
    for (const auto& n : j.at("nodes")) nodes.push_back(n.get<std::string>());
    return trace_path(g, nodes);
}

std::string kind_tag(PathKind k) {
    switch (k) {
        case PathKind::Info: return "info";
        case PathKind::Control: return "control";
        case PathKind::Obs: return "obs";
    }
    return "info";
}

PathKind kind_from_tag(const std::string& s) {
    if (s == "info") return PathKind::Info;
    if (s == "control") return PathKind::Control;
    if (s == "obs") return PathKind::Obs;
    throw Error("BadTreeJson", "unknown path kind '" + s + "'");
}

}  // namespace

Json tree_to_json(const SystemTree& t) {
    Json systems = Json::array();
    for (const auto& s : t.systems) {
        Json obs = Json::object();
        for (const auto& [c, p] : s.obs) obs[c] = path_to_json(p);
        systems.push_back({{"x", s.x},
                           {"d", s.d},
                           {"u", s.u},
                           {"info", path_to_json(s.info)},
                           {"control", path_to_json(s.control)},
                           {"obs", obs}});
    }
    Json pred = Json::object();
    for (const auto& [k, ref] : t.pred) {
        Json r = {{"system", ref.system}, {"path", kind_tag(ref.kind)}};
        if (ref.kind == PathKind::Obs) r["collider"] = ref.collider;
        pred[std::to_string(k)] = r;
    }
    return {{"systems", systems}, {"root", t.root}, {"pred", pred}};
}

SystemTree tree_from_json(const Json& j, const IdGraph& g) {
    SystemTree t;
    t.root = j.at("root").get<std::size_t>();
    for (const auto& s : j.at("systems")) {
        System sys;
        sys.x = s.at("x").get<std::string>();
        sys.d = s.at("d").get<std::string>();
        sys.u = s.at("u").get<std::string>();
        sys.info = path_from_json(s.at("info"), g);
        sys.control = path_from_json(s.at("control"), g);
        for (const auto& [c, p] : s.at("obs").items()) sys.obs[c] = path_from_json(p, g);
        t.systems.push_back(std::move(sys));
    }
    for (const auto& [k, r] : j.at("pred").items()) {
        PathRef ref;
        ref.system = r.at("system").get<std::size_t>();
        ref.kind = kind_from_tag(r.at("path").get<std::string>());
        if (ref.kind == PathKind::Obs) ref.collider = r.at("collider").get<std::string>();
        t.pred[std::stoul(k)] = ref;
    }
    return t;
}

Json witness_report_to_json(const WitnessReport& r) {
    Json out;
    out["kind"] = r.kind;
    out["node"] = r.node;
    if (!r.decision.empty()) out["decision"] = r.decision;
    out["original_graph"] = graph_to_json(r.original);
    out["transformed_graph"] = graph_to_json(r.transformed);
    out["hom"] = hom_to_json(r.hom);
    out["model_transformed"] = model_to_json(r.model_transformed);
    out["model_original"] = model_to_json(r.model_original);
    out["policy_original"] = policy_to_json(r.policy_original);
    if (!r.tree.systems.empty()) out["tree"] = tree_to_json(r.tree);
    if (r.kind == "voi") {
        out["eu_with_link"] = r.eu_with.str();
        out["eu_without_link"] = r.eu_without.str();
        out["voi"] = r.value.str();
        out["voi_decimal"] = r.value.to_double();
    } else {
        out["eu_intervened"] = r.eu_with.str();
        out["eu_base"] = r.eu_without.str();
        out["voc"] = r.value.str();
        out["voc_decimal"] = r.value.to_double();
        out["epsilon"] = r.epsilon.str();
    }
    out["value_on_original_model"] = r.value_original.str();
    return out;
}

std::string graph_to_dot(const IdGraph& g, const std::vector<std::pair<NodeId, NodeId>>& removed,
                         const SystemTree* tree) {
    static const char* palette[] = {"red", "blue", "darkgreen", "orange", "purple", "brown"};
    std::map<std::pair<NodeId, NodeId>, std::string> color;
    if (tree) {
        for (std::size_t k = 0; k < tree->systems.size(); ++k) {
            const System& s = tree->systems[k];
            std::vector<const TracedPath*> paths{&s.info, &s.control};
            for (const auto& [c, p] : s.obs) paths.push_back(&p);
            for (const TracedPath* p : paths) {
                for (std::size_t i = 0; i + 1 < p->nodes.size(); ++i) {
                    auto e = p->steps[i].forward ? std::make_pair(p->nodes[i], p->nodes[i + 1])
                                                 : std::make_pair(p->nodes[i + 1], p->nodes[i]);
                    color.emplace(e, palette[k % 6]);
                }
            }
        }
    }
    std::ostringstream os;
    os << "digraph id {\n";
    for (const auto& [n, k] : g.nodes()) {
        const char* shape = k == NodeKind::Chance ? "ellipse" : k == NodeKind::Decision ? "box" : "diamond";
        os << "  \"" << n << "\" [shape=" << shape << "];\n";
    }
    for (const auto& e : g.edges()) {
        os << "  \"" << e.first << "\" -> \"" << e.second << "\"";
        auto it = color.find(e);
        if (it != color.end()) os << " [color=" << it->second << "]";
        os << ";\n";
    }
    for (const auto& e : removed)
        os << "  \"" << e.first << "\" -> \"" << e.second << "\" [style=dashed];\n";
    os << "}\n";
    return os.str();
}

}  // namespace idvoi
