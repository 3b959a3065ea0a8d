#pragma once

#include "trr/core.hpp"
#include "trr/llm.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trr {

struct DayPrediction {
    Day day;
    int repeat = 0;
    std::optional<Verdict> verdict;
    std::optional<double> probability;
    bool parse_failed = false;  // defaults (no_crash / 0.0) were substituted
    bool empty_graph = false;   // no backend call was made
    bool clamped = false;
    std::string transcript_ref;

    // 1/0 for verdicts, the probability otherwise.
    double score() const;
};

struct DayOutcome {
    std::vector<DayPrediction> predictions;  // indexed by repeat
    std::vector<TranscriptEntry> transcript;
};

// One tuple per edge, ordered by (subject level, date, subject, object).
std::vector<RelationalTuple> to_tuples(const ImpactGraph& g);

struct ReasonOptions {
    std::size_t repeats = 5;
    std::size_t workers = 1;
    PromptOptions prompt;
};

// Builds the prompt once and queries the backend `repeats` times. An empty graph
// short-circuits to the negative class without calling the backend.
DayOutcome predict_day(const Day& day, const ImpactGraph& g, const Portfolio& portfolio, PredictionMode mode,
                       ChatBackend& backend, const ReasonOptions& options,
                       std::span<const double> ted_context = {}, const ArticleLabels* labels = nullptr);

// Parses each raw reply the same way predict_day does.
DayPrediction score_reply(const Day& day, int repeat, const std::string& raw, PredictionMode mode);

// Four-digit years (1900-2099) mentioned in text outside [first_year, last_year].
std::size_t count_out_of_window_years(const std::string& text, int first_year, int last_year);

}  // namespace trr
