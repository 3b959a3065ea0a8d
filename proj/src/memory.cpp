#include "trr/memory.hpp"

#include "trr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace trr {

void DecayConfig::validate() const {
    if (!(lambda > 0.0)) throw InputError("lambda must be > 0");
}

TradingCalendar::TradingCalendar(std::vector<Day> days) : days_(std::move(days)) {
    std::sort(days_.begin(), days_.end());
    days_.erase(std::unique(days_.begin(), days_.end()), days_.end());
}

long TradingCalendar::steps_between(const Day& from, const Day& to) const {
    if (to < from) throw PreconditionError("steps_between: 'from' is after 'to'");
    if (days_.empty()) return from.days_until(to);
    auto lo = std::upper_bound(days_.begin(), days_.end(), from);
    auto hi = std::upper_bound(days_.begin(), days_.end(), to);
    return static_cast<long>(hi - lo);
}

double retention(const DecayConfig& cfg, long age) {
    if (age < 0) throw PreconditionError("retention: negative age");
    if (!cfg.enabled) return 1.0;
    return std::exp(-static_cast<double>(age) / cfg.lambda);
}

double retention(const DecayConfig& cfg, const ImpactEdge& edge, const Day& today,
                 const TradingCalendar& calendar) {
    if (today < edge.day)
        throw PreconditionError("retention: edge dated " + edge.day.iso() + " is after " + today.iso());
    const long age = cfg.unit == AgeUnit::calendar_days ? edge.day.days_until(today)
                                                         : calendar.steps_between(edge.day, today);
    return retention(cfg, age);
}

MemoryBank::MemoryBank(std::size_t per_entity_cap) : cap_(per_entity_cap) {
    if (cap_ == 0) throw InputError("memory per-entity cap must be >= 1");
}

ImpactGraph MemoryBank::retrieve(const ImpactGraph& daily_graph) const {
    ImpactGraph out = daily_graph;
    for (const auto& v : daily_graph.vertices()) {
        if (v.kind != VertexKind::entity) continue;
        auto it = entries_.find(v.key);
        if (it == entries_.end()) continue;
        for (const auto& chain : it->second) {
            for (const auto& pv : chain.path) out.add_vertex(pv);
            for (std::size_t i = 0; i + 1 < chain.path.size(); ++i)
                out.add_edge(ImpactEdge{chain.path[i], chain.path[i + 1], chain.edge_days[i]});
        }
    }
    return out;
}

void MemoryBank::store(const ImpactGraph& daily_graph, const Day& day) {
    if (current_day_ && !(*current_day_ < day))
        throw PreconditionError("memory already stored for " + current_day_->iso() + "; cannot store " +
                                day.iso());
    for (const auto& e : daily_graph.edges())
        if (day < e.day) throw PreconditionError("memory store: edge dated after " + day.iso());

    auto chains = enumerate_chains(daily_graph);
    auto partial = enumerate_partial_chains(daily_graph);
    chains.insert(chains.end(), partial.begin(), partial.end());
    for (const auto& chain : chains) {
        std::set<std::string> keys;
        for (const auto& v : chain.path)
            if (v.kind == VertexKind::entity) keys.insert(v.key);
        for (const auto& key : keys) {
            auto& list = entries_[key];
            list.push_back(chain);
            while (list.size() > cap_) list.pop_front();
        }
    }
    current_day_ = day;
}

std::size_t MemoryBank::size() const {
    std::size_t n = 0;
    for (const auto& [_, list] : entries_) n += list.size();
    return n;
}

namespace {

nlohmann::json vertex_json(const Vertex& v) {
    return {{"kind", std::string(to_string(v.kind))}, {"key", v.key}};
}

}  // namespace

std::string MemoryBank::to_json_string() const {
    nlohmann::json j;
    j["format_version"] = kMemoryFormatVersion;
    j["current_day"] = current_day_ ? nlohmann::json(current_day_->iso()) : nlohmann::json(nullptr);
    j["per_entity_cap"] = cap_;
    auto& entries = j["entries"] = nlohmann::json::object();
    for (const auto& [key, list] : entries_) {
        auto arr = nlohmann::json::array();
        for (const auto& c : list) {
            nlohmann::json cj;
            cj["path"] = nlohmann::json::array();
            for (const auto& v : c.path) cj["path"].push_back(vertex_json(v));
            cj["edge_days"] = nlohmann::json::array();
            for (const auto& d : c.edge_days) cj["edge_days"].push_back(d.iso());
            arr.push_back(std::move(cj));
        }
        entries[key] = std::move(arr);
    }
    return j.dump(1);
}

MemoryBank MemoryBank::from_json_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("memory snapshot is not valid JSON (truncated?): ") + e.what());
    }
    try {
        const int version = j.at("format_version").get<int>();
        if (version > kMemoryFormatVersion)
            throw FormatError("memory snapshot format_version " + std::to_string(version) +
                              " is newer than supported version " + std::to_string(kMemoryFormatVersion));
        if (version < 1) throw FormatError("memory snapshot has invalid format_version " + std::to_string(version));
        MemoryBank bank(j.at("per_entity_cap").get<std::size_t>());
        if (!j.at("current_day").is_null()) bank.current_day_ = Day::parse(j.at("current_day").get<std::string>());
        for (const auto& [key, arr] : j.at("entries").items()) {
            auto& list = bank.entries_[key];
            for (const auto& cj : arr) {
                ImpactChain c;
                for (const auto& vj : cj.at("path"))
                    c.path.push_back({vertex_kind_from_string(vj.at("kind").get<std::string>()),
                                      vj.at("key").get<std::string>()});
                for (const auto& dj : cj.at("edge_days")) c.edge_days.push_back(Day::parse(dj.get<std::string>()));
                c.validate();
                if (!c.contains(Vertex::entity(key)))
                    throw FormatError("memory snapshot chain under '" + key + "' does not contain it");
                list.push_back(std::move(c));
            }
        }
        return bank;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("memory snapshot has unexpected structure: ") + e.what());
    } catch (const InputError& e) {
        throw FormatError(std::string("memory snapshot has invalid content: ") + e.what());
    } catch (const PreconditionError& e) {
        throw FormatError(std::string("memory snapshot has invalid chain: ") + e.what());
    }
}

void MemoryBank::snapshot(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write memory snapshot " + path.string());
    out << to_json_string() << "\n";
}

MemoryBank MemoryBank::restore(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read memory snapshot " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_string(ss.str());
}

}  // namespace trr
