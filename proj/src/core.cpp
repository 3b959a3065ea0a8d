#include "trr/core.hpp"

#include "trr/errors.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace trr {

std::string_view to_string(VertexKind kind) {
    switch (kind) {
        case VertexKind::article: return "article";
        case VertexKind::entity: return "entity";
        case VertexKind::stock: return "stock";
    }
    return "entity";
}

VertexKind vertex_kind_from_string(std::string_view s) {
    if (s == "article") return VertexKind::article;
    if (s == "entity") return VertexKind::entity;
    if (s == "stock") return VertexKind::stock;
    throw InputError("unknown vertex kind '" + std::string(s) + "'");
}

void Portfolio::validate() const {
    if (members.empty()) throw InputError("portfolio '" + name + "' has no members");
    std::set<std::string> tickers, names;
    for (const auto& m : members) {
        if (m.ticker.empty()) throw InputError("portfolio '" + name + "' has a member without ticker");
        if (!tickers.insert(m.ticker).second)
            throw InputError("portfolio '" + name + "' repeats ticker " + m.ticker);
        if (!m.name.empty() && !names.insert(m.name).second)
            throw InputError("portfolio '" + name + "' repeats member name " + m.name);
    }
}

const Stock* Portfolio::find_ticker(std::string_view ticker) const {
    for (const auto& m : members)
        if (m.ticker == ticker) return &m;
    return nullptr;
}

std::string normalize_entity(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (unsigned char c : raw) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    auto strip = [](unsigned char c) { return std::ispunct(c) || std::isspace(c); };
    std::size_t b = 0, e = out.size();
    while (b < e && strip(static_cast<unsigned char>(out[b]))) ++b;
    while (e > b && strip(static_cast<unsigned char>(out[e - 1]))) --e;
    out = out.substr(b, e - b);
    if (out.empty()) throw InputError("entity '" + std::string(raw) + "' is empty after normalization");
    return out;
}

bool ImpactGraph::add_vertex(const Vertex& v) {
    if (v.key.empty()) throw PreconditionError("vertex key must be non-empty");
    return vertices_.insert(v).second;
}

bool ImpactGraph::add_edge(const ImpactEdge& e) {
    if (e.from == e.to) throw PreconditionError("self-impact on '" + e.from.key + "'");
    if (!contains(e.from) || !contains(e.to))
        throw PreconditionError("edge endpoint missing: " + e.from.key + " -> " + e.to.key);
    return edges_.insert(e).second;
}

bool ImpactGraph::connect(const Vertex& from, const Vertex& to, const Day& day) {
    if (from == to) throw PreconditionError("self-impact on '" + from.key + "'");
    add_vertex(from);
    add_vertex(to);
    return edges_.insert(ImpactEdge{from, to, day}).second;
}

void ImpactGraph::merge(const ImpactGraph& other) {
    vertices_.insert(other.vertices_.begin(), other.vertices_.end());
    edges_.insert(other.edges_.begin(), other.edges_.end());
}

std::map<Vertex, std::vector<const ImpactEdge*>> ImpactGraph::out_edges() const {
    std::map<Vertex, std::vector<const ImpactEdge*>> out;
    // edges_ is ordered by (from, to, day) so each list comes out sorted.
    for (const auto& e : edges_) out[e.from].push_back(&e);
    return out;
}

std::size_t ImpactGraph::in_degree(const Vertex& v) const {
    return static_cast<std::size_t>(
        std::count_if(edges_.begin(), edges_.end(), [&](const ImpactEdge& e) { return e.to == v; }));
}

std::vector<Vertex> ImpactGraph::vertices_of(VertexKind kind) const {
    std::vector<Vertex> out;
    for (const auto& v : vertices_)
        if (v.kind == kind) out.push_back(v);
    return out;
}

bool ImpactChain::contains(const Vertex& v) const {
    return std::find(path.begin(), path.end(), v) != path.end();
}

void ImpactChain::validate() const {
    if (path.size() < 2) throw PreconditionError("chain needs at least two vertices");
    if (edge_days.size() + 1 != path.size()) throw PreconditionError("chain edge_days length mismatch");
    if (path.front().kind != VertexKind::article) throw PreconditionError("chain must start at an article");
    std::set<Vertex> seen(path.begin(), path.end());
    if (seen.size() != path.size()) throw PreconditionError("chain revisits a vertex");
}

bool chain_less(const ImpactChain& a, const ImpactChain& b) {
    const auto n = std::min(a.path.size(), b.path.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a.path[i].key != b.path[i].key) return a.path[i].key < b.path[i].key;
    if (a.path.size() != b.path.size()) return a.path.size() < b.path.size();
    for (std::size_t i = 0; i < n; ++i)
        if (a.path[i].kind != b.path[i].kind) return a.path[i].kind < b.path[i].kind;
    return a.edge_days < b.edge_days;
}

ImpactGraph merge_vertex(ImpactGraph graph, const Vertex& v) {
    graph.add_vertex(v);
    return graph;
}

namespace {

// Depth-first walk over simple paths starting at every article vertex.
// on_path is called with every path of length >= 2 along with whether it can
// still be extended.
void walk_simple_paths(const ImpactGraph& graph,
                       const std::function<void(const ImpactChain&, bool extendable)>& on_path,
                       const std::function<bool(const Vertex&)>& stop_at) {
    const auto adjacency = graph.out_edges();
    ImpactChain current;
    std::set<Vertex> on_stack;

    std::function<void(const Vertex&)> dfs = [&](const Vertex& v) {
        bool extendable = false;
        if (current.path.size() == 1 || !stop_at(v)) {
            if (auto it = adjacency.find(v); it != adjacency.end()) {
                for (const ImpactEdge* e : it->second) {
                    if (on_stack.count(e->to)) continue;
                    extendable = true;
                    current.path.push_back(e->to);
                    current.edge_days.push_back(e->day);
                    on_stack.insert(e->to);
                    dfs(e->to);
                    on_stack.erase(e->to);
                    current.path.pop_back();
                    current.edge_days.pop_back();
                }
            }
        }
        if (current.path.size() >= 2) on_path(current, extendable);
    };

    for (const auto& v : graph.vertices()) {
        if (v.kind != VertexKind::article) continue;
        current.path = {v};
        current.edge_days.clear();
        on_stack = {v};
        dfs(v);
    }
}

std::vector<ImpactChain> chains_to(const ImpactGraph& graph,
                                   const std::function<bool(const Vertex&)>& is_target) {
    std::vector<ImpactChain> out;
    walk_simple_paths(
        graph,
        [&](const ImpactChain& c, bool) {
            if (is_target(c.path.back())) out.push_back(c);
        },
        [](const Vertex&) { return false; });
    std::sort(out.begin(), out.end(), chain_less);
    return out;
}

}  // namespace

std::vector<ImpactChain> enumerate_chains(const ImpactGraph& graph, const Portfolio& portfolio) {
    std::set<std::string> tickers;
    for (const auto& m : portfolio.members) tickers.insert(m.ticker);
    return chains_to(graph, [&](const Vertex& v) {
        return v.kind == VertexKind::stock && tickers.count(v.key) != 0;
    });
}

std::vector<ImpactChain> enumerate_chains(const ImpactGraph& graph) {
    return chains_to(graph, [](const Vertex& v) { return v.kind == VertexKind::stock; });
}

std::vector<ImpactChain> enumerate_partial_chains(const ImpactGraph& graph) {
    std::vector<ImpactChain> out;
    walk_simple_paths(
        graph,
        [&](const ImpactChain& c, bool extendable) {
            if (!extendable && !c.ends_at_stock()) out.push_back(c);
        },
        [](const Vertex& v) { return v.kind == VertexKind::stock; });
    std::sort(out.begin(), out.end(), chain_less);
    return out;
}

ImpactGraph chains_to_subgraph(const std::vector<ImpactChain>& chains) {
    ImpactGraph g;
    for (const auto& c : chains) {
        for (const auto& v : c.path) g.add_vertex(v);
        for (std::size_t i = 0; i + 1 < c.path.size(); ++i)
            g.add_edge(ImpactEdge{c.path[i], c.path[i + 1], c.edge_days.at(i)});
    }
    return g;
}

}  // namespace trr
