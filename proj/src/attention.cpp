#include "trr/attention.hpp"

#include "trr/errors.hpp"

#include <algorithm>
#include <cmath>

namespace trr {

void RankConfig::validate() const {
    if (q < 1) throw InputError("q must be >= 1");
    if (!(damping > 0.0 && damping < 1.0)) throw InputError("damping must lie in (0, 1)");
    if (!(tolerance > 0.0)) throw InputError("tolerance must be > 0");
    if (max_iter < 1) throw InputError("max_iter must be >= 1");
}

double RankTable::score(const Vertex& v) const {
    auto it = scores.find(v);
    return it == scores.end() ? 0.0 : it->second;
}

RankTable rank(const ImpactGraph& graph, const EdgeWeight& weight, const RankConfig& cfg) {
    cfg.validate();
    if (graph.empty()) throw PreconditionError("rank: graph is empty");

    const std::vector<Vertex> order(graph.vertices().begin(), graph.vertices().end());
    const std::size_t n = order.size();
    std::map<Vertex, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index.emplace(order[i], i);

    // Collapse parallel edges to one link per pair, keeping the newest.
    struct Link {
        std::size_t from, to;
        double weight;
    };
    std::vector<Link> links;
    std::vector<std::size_t> out_degree(n, 0);
    for (const auto& [from, edges] : graph.out_edges()) {
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const bool last_for_target = i + 1 == edges.size() || edges[i + 1]->to != edges[i]->to;
            if (!last_for_target) continue;
            const double r = weight(*edges[i]);
            if (!(r >= 0.0 && r <= 1.0)) throw PreconditionError("rank: edge weight outside [0, 1]");
            links.push_back({index.at(from), index.at(edges[i]->to), r});
            ++out_degree[index.at(from)];
        }
    }

    const double d = cfg.damping;
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> pr(n, inv_n), next(n);
    RankTable table;

    for (std::size_t iter = 0; iter < cfg.max_iter; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        double passed = 0.0;
        for (const auto& l : links) {
            const double share = pr[l.from] / static_cast<double>(out_degree[l.from]) * l.weight;
            next[l.to] += share;
            passed += share;
        }
        double total = 0.0;
        for (double p : pr) total += p;
        const double undistributed = total - passed;
        double change = 0.0, mass = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            next[v] = (1.0 - d) * inv_n + d * (next[v] + undistributed * inv_n);
            change += std::abs(next[v] - pr[v]);
            mass += next[v];
        }
        pr.swap(next);
        table.iterations_used = iter + 1;
        table.max_mass_drift = std::max(table.max_mass_drift, std::abs(mass - 1.0));
        if (change < cfg.tolerance) {
            table.converged = true;
            break;
        }
    }
    for (std::size_t v = 0; v < n; ++v) table.scores.emplace(order[v], pr[v]);
    return table;
}

RankTable rank(const ImpactGraph& graph, const DecayConfig& decay, const Day& today,
               const TradingCalendar& calendar, const RankConfig& cfg) {
    decay.validate();
    return rank(
        graph, [&](const ImpactEdge& e) { return retention(decay, e, today, calendar); }, cfg);
}

std::vector<std::string> select_top_q(const RankTable& table, const ImpactGraph& graph, std::size_t q) {
    std::vector<std::pair<double, std::string>> pool;
    for (const auto& v : graph.vertices())
        if (v.kind == VertexKind::entity) pool.emplace_back(table.score(v), v.key);
    std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < pool.size() && i < q; ++i) out.push_back(pool[i].second);
    return out;
}

ImpactGraph filter_chains(const ImpactGraph& graph, const std::set<std::string>& top,
                          const Portfolio& portfolio) {
    std::vector<ImpactChain> kept;
    for (auto& chain : enumerate_chains(graph, portfolio)) {
        const bool touches = std::any_of(chain.path.begin(), chain.path.end(), [&](const Vertex& v) {
            return v.kind == VertexKind::entity && top.count(v.key) != 0;
        });
        if (touches) kept.push_back(std::move(chain));
    }
    return chains_to_subgraph(kept);
}

}  // namespace trr
