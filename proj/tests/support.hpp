#pragma once

#include "trr/config.hpp"
#include "trr/core.hpp"
#include "trr/errors.hpp"
#include "trr/llm.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <vector>

namespace trr::testing {

inline const Day kD1{2007, 2, 20};
inline const Day kD2{2007, 2, 21};
inline const Day kD3{2007, 2, 22};

inline std::filesystem::path synthetic_dir() { return std::filesystem::path(TRR_SOURCE_DIR) / "data" / "synthetic"; }

// Run configuration over the bundled synthetic window and its scripted fixtures.
inline RunConfig synthetic_config(TaskMode mode = TaskMode::crash) {
    RunConfig cfg;
    const auto dir = synthetic_dir();
    cfg.corpus = (dir / "corpus.jsonl").string();
    cfg.prices = (dir / "prices.csv").string();
    cfg.ted = (dir / "ted.csv").string();
    cfg.backend = "scripted:" + (dir / "fixtures.jsonl").string();
    cfg.mode = mode;
    cfg.portfolio = mode == TaskMode::crash ? "country_neutral" : "economies";
    return cfg;
}

inline Portfolio two_stock_portfolio() {
    Portfolio p;
    p.name = "pair";
    p.members = {{"AAPL", "Apple Inc.", "U.S.", {"Apple"}}, {"TM", "Toyota Motor Corporation", "Japan", {"Toyota"}}};
    return p;
}

// Random graph with up to `max_vertices` vertices of mixed kinds. Edges are
// drawn per ordered pair, sometimes twice with different days.
inline ImpactGraph random_graph(std::mt19937& rng, std::size_t max_vertices, double edge_p = 0.35) {
    std::uniform_int_distribution<std::size_t> size_dist(2, max_vertices);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = size_dist(rng);
    std::vector<Vertex> vs;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = u(rng);
        const auto key = "v" + std::to_string(i);
        if (i == 0 || r < 0.2)
            vs.push_back(Vertex::article(key));
        else if (r < 0.45)
            vs.push_back(Vertex::stock(key));
        else
            vs.push_back(Vertex::entity(key));
    }
    ImpactGraph g;
    for (const auto& v : vs) g.add_vertex(v);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b || u(rng) >= edge_p) continue;
            g.add_edge({vs[a], vs[b], u(rng) < 0.5 ? kD1 : kD2});
            if (u(rng) < 0.15) g.add_edge({vs[a], vs[b], kD3});
        }
    return g;
}

// Backend answering through a function and counting calls.
class FnBackend final : public ChatBackend {
public:
    using Fn = std::function<std::string(const ChatRequest&)>;
    explicit FnBackend(Fn fn) : fn_(std::move(fn)) {}

    std::string complete(const ChatRequest& request) override {
        {
            std::lock_guard lock(mu_);
            ++calls_;
            prompts_.push_back(request.messages.back().text);
        }
        return fn_(request);
    }
    std::string describe() const override { return "fn"; }

    std::size_t calls() const { return calls_; }
    const std::vector<std::string>& prompts() const { return prompts_; }

private:
    Fn fn_;
    std::mutex mu_;
    std::size_t calls_ = 0;
    std::vector<std::string> prompts_;
};

inline std::string prompt_field(const std::string& text, const std::string& marker) {
    const auto at = text.find(marker);
    if (at == std::string::npos) return {};
    const auto start = at + marker.size();
    return text.substr(start, text.find('\n', start) - start);
}

inline bool contains(const std::string& text, const std::string& needle) {
    return text.find(needle) != std::string::npos;
}

// Scripted graph world for pipeline tests: brainstorm replies come from an
// adjacency table keyed by headline or entity key, predictions from `verdict`.
struct World {
    std::map<std::string, std::vector<std::string>> next;
    std::function<std::string(const std::string& prompt)> verdict = [](const std::string&) {
        return std::string("Prediction: No");
    };

    std::string operator()(const ChatRequest& req) const {
        const std::string& user = req.messages.back().text;
        if (contains(user, "Answer with at most")) {
            auto key = prompt_field(user, "\nHeadline: ");
            if (key.empty()) key = prompt_field(user, "\nEntity: ");
            auto it = next.find(key);
            if (it == next.end() || it->second.empty()) return "nothing further";
            std::string out;
            for (std::size_t i = 0; i < it->second.size(); ++i)
                out += std::to_string(i + 1) + ". " + it->second[i] + " | effect\n";
            return out;
        }
        return verdict(user);
    }
};

// Three days sharing "mortgage industry", so later days recall earlier chains.
// "energy costs" appears on the second day only.
struct MemoryWorld {
    Corpus corpus;
    World world;
    LabelSeries labels;
};

inline MemoryWorld memory_world() {
    MemoryWorld m;
    m.corpus[kD1] = {{"m1", kD1, "Lender fails", ""}};
    m.corpus[kD2] = {{"m2", kD2, "Rates rise", ""}};
    m.corpus[kD3] = {{"m3", kD3, "Housing slows", ""}};
    m.world.next = {{"Lender fails", {"Mortgage industry"}},
                    {"Rates rise", {"Mortgage industry", "Energy costs"}},
                    {"Housing slows", {"Mortgage industry"}},
                    {"mortgage industry", {"Apple"}},
                    {"energy costs", {"Toyota"}}};
    m.labels = {LabelKind::crash, {{kD2, 0}, {kD3, 1}, {Day(2007, 2, 23), 0}}};
    return m;
}

// Scripted replies where a fixture exists, `fallback` otherwise.
class FallbackBackend final : public ChatBackend {
public:
    FallbackBackend(ChatBackend& inner, std::string fallback) : inner_(inner), fallback_(std::move(fallback)) {}

    std::string complete(const ChatRequest& request) override {
        try {
            return inner_.complete(request);
        } catch (const FixtureMissError&) {
            return fallback_;
        }
    }
    std::string describe() const override { return "fallback(" + inner_.describe() + ")"; }

private:
    ChatBackend& inner_;
    std::string fallback_;
};

}  // namespace trr::testing
