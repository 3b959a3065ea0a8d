#include "trr/brainstorm.hpp"

#include "trr/errors.hpp"
#include "trr/util.hpp"

#include <map>

namespace trr {

void ExpansionConfig::validate() const {
    if (k < 1) throw InputError("k must be >= 1");
    if (max_iterations < 1) throw InputError("max_iterations must be >= 1");
}

std::optional<Stock> stock_alias_match(const std::string& entity_key, const Portfolio& portfolio) {
    const std::string key = normalize_entity(entity_key);
    auto same = [&](const std::string& s) {
        if (s.empty()) return false;
        try {
            return normalize_entity(s) == key;
        } catch (const InputError&) {
            return false;
        }
    };
    for (const auto& m : portfolio.members) {
        if (same(m.ticker) || same(m.name)) return m;
        for (const auto& a : m.aliases)
            if (same(a)) return m;
    }
    return std::nullopt;
}

DailyExpansion expand_day(const std::vector<NewsArticle>& articles, const Portfolio& portfolio,
                          const ExpansionConfig& cfg, ChatBackend& backend) {
    cfg.validate();
    DailyExpansion out;
    if (articles.empty()) return out;
    const Day day = articles.front().date;
    for (const auto& a : articles)
        if (a.date != day) throw PreconditionError("expand_day: articles span more than one day");

    std::map<Vertex, BrainstormSource> sources;
    std::vector<Vertex> frontier;
    for (const auto& a : articles) {
        auto v = Vertex::article(a.id);
        if (!out.graph.add_vertex(v)) continue;
        sources[v] = BrainstormSource{v, day, a.headline, a.body, {a.headline}};
        frontier.push_back(v);
    }

    PromptOptions prompt_options;
    prompt_options.model_name = cfg.model_name;
    prompt_options.temperature = cfg.temperature;
    prompt_options.body_char_cap = cfg.body_char_cap;

    while (!frontier.empty() && out.iterations_used < cfg.max_iterations) {
        ++out.iterations_used;
        std::vector<ChatRequest> requests;
        requests.reserve(frontier.size());
        for (const auto& v : frontier)
            requests.push_back(build_brainstorm_prompt(sources.at(v), portfolio, cfg.k, prompt_options));

        auto replies = parallel_map<std::string>(frontier.size(), cfg.workers, [&](std::size_t i) {
            return complete(backend, requests[i]);
        });

        std::vector<Vertex> next;
        for (std::size_t i = 0; i < frontier.size(); ++i) {
            const Vertex& src = frontier[i];
            TranscriptEntry entry{day.iso(), "brainstorm", 0, request_digest(requests[i]),
                                  render_messages(requests[i]), replies[i], ""};
            BrainstormReply reply;
            try {
                reply = parse_brainstorm(replies[i], cfg.k);
            } catch (const ParseError& e) {
                entry.error = e.what();
                out.parse_failures.push_back(src.key);
                out.transcript.push_back(std::move(entry));
                continue;
            }
            out.transcript.push_back(std::move(entry));

            for (const auto& item : reply.items) {
                Vertex target = Vertex::entity(item.entity);
                if (auto stock = stock_alias_match(item.entity, portfolio)) target = Vertex::stock(stock->ticker);
                if (target == src) continue;
                const bool is_new = out.graph.add_vertex(target);
                out.graph.add_edge(ImpactEdge{src, target, day});
                if (is_new && target.kind == VertexKind::entity) {
                    auto provenance = sources.at(src).provenance;
                    provenance.push_back(target.key);
                    sources[target] = BrainstormSource{target, day, {}, {}, std::move(provenance)};
                    next.push_back(target);
                }
            }
        }
        frontier = std::move(next);
    }
    return out;
}

}  // namespace trr
