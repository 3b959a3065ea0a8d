#include "support.hpp"

#include "trr/brainstorm.hpp"
#include "trr/config.hpp"
#include "trr/errors.hpp"

#include <gtest/gtest.h>

#include <queue>

using namespace trr;
using namespace trr::testing;

namespace {

NewsArticle article(std::string id, std::string headline, Day day = kD1) {
    return {std::move(id), day, std::move(headline), "body"};
}

// Shortest distance (in edges) from any article to each vertex.
std::map<Vertex, std::size_t> bfs_levels(const ImpactGraph& g) {
    std::map<Vertex, std::size_t> level;
    std::queue<Vertex> q;
    for (const auto& v : g.vertices_of(VertexKind::article)) {
        level[v] = 0;
        q.push(v);
    }
    const auto adj = g.out_edges();
    while (!q.empty()) {
        const auto v = q.front();
        q.pop();
        auto it = adj.find(v);
        if (it == adj.end()) continue;
        for (const ImpactEdge* e : it->second)
            if (!level.count(e->to)) {
                level[e->to] = level[v] + 1;
                q.push(e->to);
            }
    }
    return level;
}

}  // namespace

TEST(StockAliasMatch, MatchesTickerNameAndAliases) {
    const auto p = load_portfolio("country_neutral");
    EXPECT_EQ(stock_alias_match("apple inc.", p)->ticker, "AAPL");
    EXPECT_EQ(stock_alias_match("apple", p)->ticker, "AAPL");
    EXPECT_EQ(stock_alias_match("toyota", p)->name, "Toyota Motor Corporation");
    EXPECT_EQ(stock_alias_match("tm", p)->ticker, "TM");
    EXPECT_FALSE(stock_alias_match("mortgage industry", p).has_value());
}

TEST(StockAliasMatch, FirstMemberInPortfolioOrderWins) {
    Portfolio p;
    p.members = {{"AAA", "First", "", {"shared"}}, {"BBB", "Second", "", {"shared"}}};
    EXPECT_EQ(stock_alias_match("shared", p)->ticker, "AAA");
}

TEST(ExpandDay, ReachesStockWithinIterations) {
    World world;
    world.next = {{"Mortgage lender fails", {"Mortgage industry"}}, {"mortgage industry", {"Apple"}}};
    FnBackend backend(world);
    ExpansionConfig cfg;
    const auto out = expand_day({article("x1", "Mortgage lender fails")}, two_stock_portfolio(), cfg, backend);
    EXPECT_EQ(out.graph.vertex_count(), 3u);
    EXPECT_EQ(out.graph.edge_count(), 2u);
    EXPECT_TRUE(out.graph.contains(ImpactEdge{Vertex::entity("mortgage industry"), Vertex::stock("AAPL"), kD1}));
    EXPECT_EQ(out.iterations_used, 2u);
    EXPECT_EQ(backend.calls(), 2u);  // stocks are never expanded
    EXPECT_TRUE(out.parse_failures.empty());
}

TEST(ExpandDay, IterationCapStopsExpansion) {
    World world;
    world.next = {{"Mortgage lender fails", {"Mortgage industry"}}, {"mortgage industry", {"Apple"}}};
    FnBackend backend(world);
    ExpansionConfig cfg;
    cfg.max_iterations = 1;
    const auto out = expand_day({article("x1", "Mortgage lender fails")}, two_stock_portfolio(), cfg, backend);
    EXPECT_EQ(out.graph.vertex_count(), 2u);
    EXPECT_EQ(out.graph.edge_count(), 1u);
    EXPECT_EQ(backend.calls(), 1u);
}

TEST(ExpandDay, RepeatedEntitiesMergeAndExpandOnce) {
    World world;
    world.next = {{"Lender A fails", {"Mortgage industry"}},
                  {"Lender B fails", {"Mortgage Industry."}},
                  {"mortgage industry", {"Toyota"}}};
    FnBackend backend(world);
    const auto out = expand_day({article("x1", "Lender A fails"), article("x2", "Lender B fails")},
                                two_stock_portfolio(), {}, backend);
    EXPECT_EQ(out.graph.in_degree(Vertex::entity("mortgage industry")), 2u);
    EXPECT_EQ(out.graph.vertices_of(VertexKind::entity).size(), 1u);
    EXPECT_EQ(backend.calls(), 3u);
}

TEST(ExpandDay, KCapsChildren) {
    World world;
    world.next = {{"Big news", {"a", "b", "c", "d", "e"}}};
    FnBackend backend(world);
    ExpansionConfig cfg;
    cfg.k = 2;
    cfg.max_iterations = 1;
    const auto out = expand_day({article("x1", "Big news")}, two_stock_portfolio(), cfg, backend);
    EXPECT_EQ(out.graph.edge_count(), 2u);
}

TEST(ExpandDay, ParseFailureContributesNoChildren) {
    World world;
    world.next = {{"Big news", {"oil", "gas"}}, {"oil", {"Apple"}}};  // "gas" gets an unparseable reply
    FnBackend backend(world);
    const auto out = expand_day({article("x1", "Big news")}, two_stock_portfolio(), {}, backend);
    ASSERT_EQ(out.parse_failures.size(), 1u);
    EXPECT_EQ(out.parse_failures[0], "gas");
    EXPECT_TRUE(out.graph.contains(Vertex::stock("AAPL")));
    EXPECT_EQ(out.transcript.size(), 3u);
    std::size_t with_error = 0;
    for (const auto& t : out.transcript) with_error += !t.error.empty();
    EXPECT_EQ(with_error, 1u);
}

TEST(ExpandDay, TransportErrorPropagates) {
    FnBackend backend([](const ChatRequest&) -> std::string { throw TransportError("down", 503); });
    EXPECT_THROW(expand_day({article("x1", "Big news")}, two_stock_portfolio(), {}, backend), TransportError);
}

TEST(ExpandDay, RejectsMixedDays) {
    FnBackend backend(World{});
    EXPECT_THROW(expand_day({article("x1", "a", kD1), article("x2", "b", kD2)}, two_stock_portfolio(), {}, backend),
                 PreconditionError);
}

TEST(ExpandDay, SelfReferenceIsSkipped) {
    World world;
    world.next = {{"Big news", {"oil"}}, {"oil", {"oil", "Apple"}}};
    FnBackend backend(world);
    const auto out = expand_day({article("x1", "Big news")}, two_stock_portfolio(), {}, backend);
    EXPECT_EQ(out.graph.edge_count(), 2u);
}

TEST(ExpandDay, PromptsCarryProvenance) {
    World world;
    world.next = {{"Big news", {"oil"}}, {"oil", {"airlines"}}, {"airlines", {"Toyota"}}};
    FnBackend backend(world);
    expand_day({article("x1", "Big news")}, two_stock_portfolio(), {}, backend);
    ASSERT_EQ(backend.prompts().size(), 3u);
    EXPECT_TRUE(contains(backend.prompts()[2], "Big news -> oil -> airlines"));
}

TEST(ExpandDay, ConcurrentWorkersGiveSameGraph) {
    World world;
    for (int i = 0; i < 6; ++i) world.next["News " + std::to_string(i)] = {"e" + std::to_string(i % 3), "Apple"};
    for (int i = 0; i < 3; ++i) world.next["e" + std::to_string(i)] = {"Toyota", "e" + std::to_string((i + 1) % 3)};
    std::vector<NewsArticle> arts;
    for (int i = 0; i < 6; ++i) arts.push_back(article("x" + std::to_string(i), "News " + std::to_string(i)));
    FnBackend serial_backend(world), parallel_backend(world);
    ExpansionConfig serial, parallel;
    parallel.workers = 4;
    const auto a = expand_day(arts, two_stock_portfolio(), serial, serial_backend);
    const auto b = expand_day(arts, two_stock_portfolio(), parallel, parallel_backend);
    EXPECT_EQ(a.graph, b.graph);
    ASSERT_EQ(a.transcript.size(), b.transcript.size());
    for (std::size_t i = 0; i < a.transcript.size(); ++i)
        EXPECT_EQ(a.transcript[i].prompt_digest, b.transcript[i].prompt_digest);
}

// Random scripted worlds: structural invariants of the daily graph.
TEST(ExpandDay, StructuralInvariantsOnRandomWorlds) {
    std::mt19937 rng(42);
    const std::vector<std::string> names{"oil", "banks", "housing", "credit", "autos", "chips", "Apple", "Toyota"};
    for (int trial = 0; trial < 200; ++trial) {
        World world;
        std::uniform_int_distribution<std::size_t> pick(0, names.size() - 1), count(0, 3);
        for (const auto& n : names)
            for (std::size_t i = count(rng); i > 0; --i) world.next[normalize_entity(n)].push_back(names[pick(rng)]);
        std::vector<NewsArticle> arts;
        for (int a = 0; a < 3; ++a) {
            const auto h = "Headline " + std::to_string(a);
            for (std::size_t i = count(rng) + 1; i > 0; --i) world.next[h].push_back(names[pick(rng)]);
            arts.push_back(article("x" + std::to_string(a), h));
        }
        ExpansionConfig cfg;
        cfg.max_iterations = 1 + static_cast<std::size_t>(trial % 4);
        FnBackend backend(world);
        const auto out = expand_day(arts, two_stock_portfolio(), cfg, backend);
        const auto levels = bfs_levels(out.graph);
        for (const auto& v : out.graph.vertices()) {
            ASSERT_TRUE(levels.count(v)) << "unreachable " << v.key;
            EXPECT_LE(levels.at(v), cfg.max_iterations);
        }
        for (const auto& e : out.graph.edges()) {
            EXPECT_NE(e.from.kind, VertexKind::stock);
            EXPECT_EQ(e.day, kD1);
        }
        FnBackend again(world);
        EXPECT_EQ(expand_day(arts, two_stock_portfolio(), cfg, again).graph, out.graph);
    }
}

TEST(ExpandDay, TreeShapedRepliesBoundDepth) {
    // When every reply names fresh entities, the longest path has at most I + 1 vertices.
    World world;
    world.next = {{"Root", {"a1", "a2"}}, {"a1", {"b1"}}, {"a2", {"b2"}}, {"b1", {"c1"}}, {"b2", {"c2"}},
                  {"c1", {"d1"}}, {"c2", {"d2"}}, {"d1", {"e1"}}, {"d2", {"e2"}}};
    for (std::size_t iters = 1; iters <= 5; ++iters) {
        FnBackend backend(world);
        ExpansionConfig cfg;
        cfg.max_iterations = iters;
        const auto g = expand_day({article("x", "Root")}, two_stock_portfolio(), cfg, backend).graph;
        std::size_t longest = 0;
        for (const auto& c : enumerate_partial_chains(g)) longest = std::max(longest, c.path.size());
        EXPECT_LE(longest, iters + 1);
    }
}
