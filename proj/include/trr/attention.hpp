#pragma once

#include "trr/core.hpp"
#include "trr/memory.hpp"

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace trr {

struct RankConfig {
    std::size_t q = 6;
    double damping = 0.85;
    double tolerance = 1e-8;
    std::size_t max_iter = 200;

    void validate() const;
};

struct RankTable {
    std::map<Vertex, double> scores;
    std::size_t iterations_used = 0;
    bool converged = false;
    // Largest |sum(scores) - 1| seen over all iterates.
    double max_mass_drift = 0.0;

    double score(const Vertex& v) const;
};

// Weight of the link b -> v given its newest edge.
using EdgeWeight = std::function<double(const ImpactEdge& newest)>;

// Retention-weighted PageRank by power iteration:
//   PR(v) = (1-d)/n + d * ( sum_{b -> v} PR(b)/L_b * R(b,v) + U/n )
// L_b counts distinct successors of b; U is the mass not passed along edges
// (dangling vertices plus the decayed share 1 - R), spread uniformly.
RankTable rank(const ImpactGraph& graph, const EdgeWeight& weight, const RankConfig& cfg);
RankTable rank(const ImpactGraph& graph, const DecayConfig& decay, const Day& today,
               const TradingCalendar& calendar, const RankConfig& cfg);

// Top-q entity vertices by score, ties by key. Articles and stocks are not eligible.
std::vector<std::string> select_top_q(const RankTable& table, const ImpactGraph& graph, std::size_t q);

// Sub-graph of every article-to-stock chain that passes through a selected entity.
ImpactGraph filter_chains(const ImpactGraph& graph, const std::set<std::string>& top,
                          const Portfolio& portfolio);

}  // namespace trr
