#pragma once

#include "trr/core.hpp"
#include "trr/llm.hpp"

#include <optional>
#include <string>
#include <vector>

namespace trr {

struct ExpansionConfig {
    std::size_t k = 3;               // entities requested per expansion
    std::size_t max_iterations = 4;  // I
    std::size_t body_char_cap = 2000;
    std::size_t workers = 1;  // concurrent backend calls per iteration
    std::string model_name;
    double temperature = 0.0;

    void validate() const;
};

// Result of expanding one day's articles.
struct DailyExpansion {
    ImpactGraph graph;
    std::vector<TranscriptEntry> transcript;
    // Vertex keys whose reply did not parse; they contributed no children.
    std::vector<std::string> parse_failures;
    std::size_t iterations_used = 0;
};

// Matches a normalized entity against tickers, member names and aliases (all
// normalized). The first member in portfolio order wins.
std::optional<Stock> stock_alias_match(const std::string& entity_key, const Portfolio& portfolio);

// Breadth-first expansion of the day's articles into the daily impact graph.
// TransportError propagates (the caller aborts the day); parse errors are
// recorded and the vertex contributes no children.
DailyExpansion expand_day(const std::vector<NewsArticle>& articles, const Portfolio& portfolio,
                          const ExpansionConfig& cfg, ChatBackend& backend);

}  // namespace trr
