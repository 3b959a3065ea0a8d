#pragma once

#include "trr/attention.hpp"
#include "trr/core.hpp"
#include "trr/llm.hpp"

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace trr {

// Lossless JSON form: {"vertices": [{kind, key}], "edges": [{from, to, day}]}.
nlohmann::json graph_to_json(const ImpactGraph& g);
// Throws FormatError on structural problems.
ImpactGraph graph_from_json(const nlohmann::json& j);

struct DotOptions {
    std::size_t labeled_vertices = 5;  // only the top-n by in-degree carry a label
    double base_size = 0.3;
    double size_per_in_edge = 0.15;
    const ArticleLabels* article_labels = nullptr;
};

// Graphviz rendering with vertex size proportional to in-degree.
std::string to_dot(const ImpactGraph& g, const DotOptions& options = {});

// Per-day archive written by runs: {day, daily, temporal, trr, top_entities, scores}.
nlohmann::json day_archive_json(const Day& day, const ImpactGraph& daily, const ImpactGraph& temporal,
                                const ImpactGraph& trr, const std::vector<std::string>& top,
                                const RankTable& ranking);

// Loads one graph ("daily", "temporal" or "trr") from a day archive, or a bare
// graph file.
ImpactGraph load_graph_file(const std::filesystem::path& path, const std::string& which = "trr");

}  // namespace trr
