#include "trr/reason.hpp"

#include "trr/errors.hpp"
#include "trr/util.hpp"

#include <algorithm>
#include <climits>
#include <deque>
#include <map>
#include <regex>

namespace trr {

double DayPrediction::score() const {
    if (probability) return *probability;
    return verdict == Verdict::crash ? 1.0 : 0.0;
}

std::vector<RelationalTuple> to_tuples(const ImpactGraph& g) {
    std::map<Vertex, int> level;
    std::deque<Vertex> queue;
    for (const auto& v : g.vertices())
        if (v.kind == VertexKind::article) {
            level[v] = 0;
            queue.push_back(v);
        }
    const auto adjacency = g.out_edges();
    while (!queue.empty()) {
        const Vertex v = queue.front();
        queue.pop_front();
        auto it = adjacency.find(v);
        if (it == adjacency.end()) continue;
        for (const ImpactEdge* e : it->second) {
            if (level.count(e->to)) continue;
            level[e->to] = level[v] + 1;
            queue.push_back(e->to);
        }
    }
    std::vector<RelationalTuple> out;
    out.reserve(g.edge_count());
    for (const auto& e : g.edges()) {
        auto it = level.find(e.from);
        RelationalTuple t;
        t.t = e.day;
        t.subject = e.from;
        t.object = e.to;
        t.level = it == level.end() ? INT_MAX : it->second;
        out.push_back(std::move(t));
    }
    std::sort(out.begin(), out.end(), [](const RelationalTuple& a, const RelationalTuple& b) {
        return std::tie(a.level, a.t, a.subject, a.object) < std::tie(b.level, b.t, b.subject, b.object);
    });
    return out;
}

DayPrediction score_reply(const Day& day, int repeat, const std::string& raw, PredictionMode mode) {
    DayPrediction p;
    p.day = day;
    p.repeat = repeat;
    p.transcript_ref = day.iso() + "#" + std::to_string(repeat);
    try {
        auto reply = parse_prediction(raw, mode);
        p.verdict = reply.verdict;
        p.probability = reply.probability;
        p.clamped = reply.clamped;
    } catch (const ParseError&) {
        p.parse_failed = true;
        if (mode == PredictionMode::binary)
            p.verdict = Verdict::no_crash;
        else
            p.probability = 0.0;
    }
    return p;
}

DayOutcome predict_day(const Day& day, const ImpactGraph& g, const Portfolio& portfolio, PredictionMode mode,
                       ChatBackend& backend, const ReasonOptions& options,
                       std::span<const double> ted_context, const ArticleLabels* labels) {
    if (options.repeats < 1) throw PreconditionError("predict_day: repeats must be >= 1");
    DayOutcome out;
    if (g.edge_count() == 0) {
        for (std::size_t r = 0; r < options.repeats; ++r) {
            DayPrediction p;
            p.day = day;
            p.repeat = static_cast<int>(r);
            p.empty_graph = true;
            if (mode == PredictionMode::binary)
                p.verdict = Verdict::no_crash;
            else
                p.probability = 0.0;
            out.predictions.push_back(p);
        }
        return out;
    }
    const auto request = build_reason_prompt(portfolio, to_tuples(g), mode, ted_context, labels, options.prompt);
    const auto digest = request_digest(request);
    const auto prompt_text = render_messages(request);
    auto replies = parallel_map<std::string>(options.repeats, options.workers,
                                             [&](std::size_t) { return complete(backend, request); });
    for (std::size_t r = 0; r < options.repeats; ++r) {
        auto p = score_reply(day, static_cast<int>(r), replies[r], mode);
        out.transcript.push_back(TranscriptEntry{day.iso(), "reason", static_cast<int>(r), digest, prompt_text,
                                                 replies[r], p.parse_failed ? "unparseable prediction" : ""});
        out.predictions.push_back(std::move(p));
    }
    return out;
}

std::size_t count_out_of_window_years(const std::string& text, int first_year, int last_year) {
    static const std::regex year(R"(\b(19|20)\d{2}\b)");
    std::size_t n = 0;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), year); it != std::sregex_iterator(); ++it) {
        const int y = std::stoi(it->str());
        if (y < first_year || y > last_year) ++n;
    }
    return n;
}

}  // namespace trr
