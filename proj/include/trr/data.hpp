#pragma once

#include "trr/core.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace trr {

// Articles grouped by day, days ascending, articles in file order.
using Corpus = std::map<Day, std::vector<NewsArticle>>;

// Line-delimited JSON {id?, date, headline, body?}. Missing ids become "<date>#<n>".
Corpus load_corpus(const std::filesystem::path& path);
Corpus parse_corpus(std::istream& in, const std::string& origin = "corpus");

struct DayValue {
    Day day;
    double value = 0.0;

    friend bool operator==(const DayValue&, const DayValue&) = default;
};

using ValueSeries = std::vector<DayValue>;

struct PriceSeries {
    std::string ticker;
    ValueSeries rows;  // close prices

    void validate() const;
};

// CSV with header date,ticker,close.
std::map<std::string, PriceSeries> load_prices(const std::filesystem::path& path);

struct TedSeries {
    ValueSeries rows;  // spread in percentage points
};

// CSV with header date,spread.
TedSeries load_ted(const std::filesystem::path& path);

// close_t / close_{t-1} - 1, attached to day t.
ValueSeries daily_returns(const PriceSeries& prices);

// Equal-weight mean over the tickers that have a return that day.
ValueSeries portfolio_returns(const std::map<std::string, ValueSeries>& per_stock);

enum class LabelKind { crash, crisis };

struct LabelRow {
    Day day;
    int label = 0;

    friend bool operator==(const LabelRow&, const LabelRow&) = default;
};

struct LabelSeries {
    LabelKind kind = LabelKind::crash;
    std::vector<LabelRow> rows;

    friend bool operator==(const LabelSeries&, const LabelSeries&) = default;
};

inline constexpr double kDefaultCrashThreshold = -0.02;
inline constexpr double kDefaultCrisisThreshold = 0.48;

// 1 iff return <= threshold.
LabelSeries crash_labels(const ValueSeries& returns, double threshold = kDefaultCrashThreshold);
// 1 iff spread > threshold.
LabelSeries crisis_labels(const TedSeries& ted, double threshold = kDefaultCrisisThreshold);

// Empirical percentile (0-100) of the returns, linear interpolation between order statistics.
double percentile_threshold(const ValueSeries& returns, double percentile);

struct AlignedLabel {
    Day prediction_day;
    Day label_day;
    int label = 0;
};

struct Alignment {
    std::vector<AlignedLabel> pairs;
    std::vector<Day> dropped;  // prediction days with no later label
};

// Pairs every prediction day with the first labelled day strictly after it.
Alignment align_next_day(const LabelSeries& labels, const std::vector<Day>& prediction_days);

// The last `n` TED values dated on or before `day`, oldest first.
std::vector<double> ted_context(const TedSeries& ted, const Day& day, std::size_t n = 5);

}  // namespace trr
