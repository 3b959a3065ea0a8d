#include "trr/graph_io.hpp"

#include "trr/errors.hpp"
#include "trr/util.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace trr {

namespace {

nlohmann::json vertex_json(const Vertex& v) {
    return {{"kind", std::string(to_string(v.kind))}, {"key", v.key}};
}

Vertex vertex_from(const nlohmann::json& j) {
    return {vertex_kind_from_string(j.at("kind").get<std::string>()), j.at("key").get<std::string>()};
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    return out;
}

}  // namespace

nlohmann::json graph_to_json(const ImpactGraph& g) {
    nlohmann::json j;
    j["vertices"] = nlohmann::json::array();
    for (const auto& v : g.vertices()) j["vertices"].push_back(vertex_json(v));
    j["edges"] = nlohmann::json::array();
    for (const auto& e : g.edges())
        j["edges"].push_back({{"from", vertex_json(e.from)}, {"to", vertex_json(e.to)}, {"day", e.day.iso()}});
    return j;
}

ImpactGraph graph_from_json(const nlohmann::json& j) {
    try {
        ImpactGraph g;
        for (const auto& v : j.at("vertices")) g.add_vertex(vertex_from(v));
        for (const auto& e : j.at("edges"))
            g.add_edge(ImpactEdge{vertex_from(e.at("from")), vertex_from(e.at("to")),
                                  Day::parse(e.at("day").get<std::string>())});
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("graph JSON: ") + e.what());
    } catch (const InputError& e) {
        throw FormatError(std::string("graph JSON: ") + e.what());
    } catch (const PreconditionError& e) {
        throw FormatError(std::string("graph JSON: ") + e.what());
    }
}

std::string to_dot(const ImpactGraph& g, const DotOptions& options) {
    std::map<Vertex, std::size_t> in_degree;
    for (const auto& v : g.vertices()) in_degree[v] = 0;
    for (const auto& e : g.edges()) ++in_degree[e.to];

    std::vector<std::pair<std::size_t, Vertex>> ranked;
    for (const auto& [v, d] : in_degree) ranked.emplace_back(d, v);
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::set<Vertex> labeled;
    for (std::size_t i = 0; i < ranked.size() && i < options.labeled_vertices; ++i) labeled.insert(ranked[i].second);

    std::map<Vertex, std::string> ids;
    std::size_t next_id = 0;
    for (const auto& v : g.vertices()) ids[v] = "n" + std::to_string(next_id++);

    auto label_of = [&](const Vertex& v) {
        if (v.kind == VertexKind::article && options.article_labels) {
            if (auto it = options.article_labels->find(v.key); it != options.article_labels->end()) return it->second;
        }
        return v.key;
    };

    std::ostringstream os;
    os << "digraph impact_graph {\n";
    os << "  rankdir=LR;\n";
    os << "  node [shape=circle, style=filled, fixedsize=true];\n";
    for (const auto& v : g.vertices()) {
        const double size = options.base_size + options.size_per_in_edge * static_cast<double>(in_degree[v]);
        const char* color = v.kind == VertexKind::article ? "lightgray"
                            : v.kind == VertexKind::stock ? "lightcoral"
                                                          : "lightblue";
        os << "  " << ids[v] << " [label=\"" << (labeled.count(v) ? dot_escape(label_of(v)) : "")
           << "\", kind=\"" << to_string(v.kind) << "\", key=\"" << dot_escape(v.key)
           << "\", indegree=" << in_degree[v] << ", width=" << format_double(size)
           << ", height=" << format_double(size) << ", fillcolor=" << color << "];\n";
    }
    for (const auto& e : g.edges())
        os << "  " << ids[e.from] << " -> " << ids[e.to] << " [label=\"" << e.day.iso() << "\"];\n";
    os << "}\n";
    return os.str();
}

nlohmann::json day_archive_json(const Day& day, const ImpactGraph& daily, const ImpactGraph& temporal,
                                const ImpactGraph& trr, const std::vector<std::string>& top,
                                const RankTable& ranking) {
    nlohmann::json j;
    j["day"] = day.iso();
    j["daily"] = graph_to_json(daily);
    j["temporal"] = graph_to_json(temporal);
    j["trr"] = graph_to_json(trr);
    j["top_entities"] = top;
    j["scores"] = nlohmann::json::array();
    for (const auto& [v, s] : ranking.scores) {
        auto vj = vertex_json(v);
        vj["score"] = s;
        j["scores"].push_back(std::move(vj));
    }
    j["rank_iterations"] = ranking.iterations_used;
    j["rank_converged"] = ranking.converged;
    return j;
}

ImpactGraph load_graph_file(const std::filesystem::path& path, const std::string& which) {
    std::ifstream in(path);
    if (!in) throw FormatError("graph archive not found: " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    if (j.contains("vertices")) return graph_from_json(j);
    if (!j.contains(which)) throw FormatError(path.string() + ": archive has no '" + which + "' graph");
    return graph_from_json(j.at(which));
}

}  // namespace trr
