#pragma once

#include "trr/core.hpp"

#include <deque>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace trr {

// How the age of an impact is counted.
enum class AgeUnit { trading_days, calendar_days };

struct DecayConfig {
    double lambda = 1.0;
    bool enabled = true;
    AgeUnit unit = AgeUnit::trading_days;

    void validate() const;
};

// Ordered list of the pipeline's trading days. Ages in trading days are the
// number of calendar entries in (from, to].
class TradingCalendar {
public:
    TradingCalendar() = default;
    explicit TradingCalendar(std::vector<Day> days);

    long steps_between(const Day& from, const Day& to) const;
    const std::vector<Day>& days() const { return days_; }

private:
    std::vector<Day> days_;
};

// exp(-age / lambda); 1 when decay is disabled.
double retention(const DecayConfig& cfg, long age);
// Throws PreconditionError if the edge is dated after `today`.
double retention(const DecayConfig& cfg, const ImpactEdge& edge, const Day& today,
                 const TradingCalendar& calendar);

inline constexpr int kMemoryFormatVersion = 1;

// Per-entity archive of past impact chains (complete and partial).
class MemoryBank {
public:
    explicit MemoryBank(std::size_t per_entity_cap = 200);

    // Union of the daily graph with every stored chain keyed by one of its entity vertices.
    ImpactGraph retrieve(const ImpactGraph& daily_graph) const;

    // Appends every chain of the day's graph under each entity it passes through.
    // Days must strictly increase; a second store for the same day throws.
    void store(const ImpactGraph& daily_graph, const Day& day);

    const std::optional<Day>& current_day() const { return current_day_; }
    const std::map<std::string, std::deque<ImpactChain>>& entries() const { return entries_; }
    std::size_t per_entity_cap() const { return cap_; }
    // Total number of (entity, chain) entries.
    std::size_t size() const;

    void snapshot(const std::filesystem::path& path) const;
    static MemoryBank restore(const std::filesystem::path& path);

    std::string to_json_string() const;
    static MemoryBank from_json_string(const std::string& text);

    friend bool operator==(const MemoryBank&, const MemoryBank&) = default;

private:
    std::map<std::string, std::deque<ImpactChain>> entries_;
    std::optional<Day> current_day_;
    std::size_t cap_;
};

}  // namespace trr
