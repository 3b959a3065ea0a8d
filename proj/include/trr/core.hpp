#pragma once

#include "trr/day.hpp"

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace trr {

struct Stock {
    std::string ticker;
    std::string name;
    std::string category;  // country or sector
    std::vector<std::string> aliases;
};

enum class PortfolioMode { stock, economy };

struct Portfolio {
    std::string name;
    std::vector<Stock> members;
    PortfolioMode mode = PortfolioMode::stock;

    // Throws InputError unless there is at least one member and tickers/names are distinct.
    void validate() const;
    const Stock* find_ticker(std::string_view ticker) const;
};

struct NewsArticle {
    std::string id;
    Day date;
    std::string headline;
    std::string body;
};

enum class VertexKind { article, entity, stock };

std::string_view to_string(VertexKind kind);
VertexKind vertex_kind_from_string(std::string_view s);

struct Vertex {
    VertexKind kind = VertexKind::entity;
    std::string key;

    static Vertex article(std::string id) { return {VertexKind::article, std::move(id)}; }
    static Vertex entity(std::string key) { return {VertexKind::entity, std::move(key)}; }
    static Vertex stock(std::string ticker) { return {VertexKind::stock, std::move(ticker)}; }

    friend auto operator<=>(const Vertex&, const Vertex&) = default;
    friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct ImpactEdge {
    Vertex from;
    Vertex to;
    Day day;

    friend auto operator<=>(const ImpactEdge&, const ImpactEdge&) = default;
    friend bool operator==(const ImpactEdge&, const ImpactEdge&) = default;
};

// Directed impact graph. Vertices are unique by (kind, key); edges are unique by
// (from, to, day), so the same pair may be linked once per day. Iteration order
// is lexicographic, which keeps everything downstream deterministic.
class ImpactGraph {
public:
    // Returns true if the vertex was new.
    bool add_vertex(const Vertex& v);
    // Endpoints must already exist and differ. Returns true if the edge was new.
    bool add_edge(const ImpactEdge& e);
    // Adds both endpoints if needed, then the edge.
    bool connect(const Vertex& from, const Vertex& to, const Day& day);
    // Set union.
    void merge(const ImpactGraph& other);

    bool contains(const Vertex& v) const { return vertices_.count(v) != 0; }
    bool contains(const ImpactEdge& e) const { return edges_.count(e) != 0; }
    bool empty() const { return vertices_.empty(); }
    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const std::set<Vertex>& vertices() const { return vertices_; }
    const std::set<ImpactEdge>& edges() const { return edges_; }

    // Outgoing edges per vertex, sorted by (to, day). Vertices without any are absent.
    std::map<Vertex, std::vector<const ImpactEdge*>> out_edges() const;
    std::size_t in_degree(const Vertex& v) const;
    std::vector<Vertex> vertices_of(VertexKind kind) const;

    friend bool operator==(const ImpactGraph&, const ImpactGraph&) = default;

private:
    std::set<Vertex> vertices_;
    std::set<ImpactEdge> edges_;
};

// One article-to-stock path. Partial chains (article to a dead end) share the type;
// see ends_at_stock().
struct ImpactChain {
    std::vector<Vertex> path;
    std::vector<Day> edge_days;

    bool ends_at_stock() const { return !path.empty() && path.back().kind == VertexKind::stock; }
    bool contains(const Vertex& v) const;
    // Throws PreconditionError on a malformed chain.
    void validate() const;

    friend bool operator==(const ImpactChain&, const ImpactChain&) = default;
};

// Lexicographic by path keys, then kinds, then edge days.
bool chain_less(const ImpactChain& a, const ImpactChain& b);

inline constexpr std::string_view kImpactsRelation = "impacts";

struct RelationalTuple {
    Day t;
    Vertex subject;
    std::string relation{kImpactsRelation};
    Vertex object;
    // Shortest distance of the subject from any article vertex.
    int level = 0;

    friend bool operator==(const RelationalTuple&, const RelationalTuple&) = default;
};

// Lowercase, collapse whitespace, trim, strip surrounding punctuation.
// Throws InputError if nothing is left.
std::string normalize_entity(std::string_view raw);

ImpactGraph merge_vertex(ImpactGraph graph, const Vertex& v);

// Every simple path from an article vertex to a stock vertex of the portfolio.
// Parallel edges on different days yield distinct chains.
std::vector<ImpactChain> enumerate_chains(const ImpactGraph& graph, const Portfolio& portfolio);
// Same, targeting every stock vertex present in the graph.
std::vector<ImpactChain> enumerate_chains(const ImpactGraph& graph);
// Maximal simple paths from an article that cannot be extended and do not end at a stock.
std::vector<ImpactChain> enumerate_partial_chains(const ImpactGraph& graph);

ImpactGraph chains_to_subgraph(const std::vector<ImpactChain>& chains);

}  // namespace trr
