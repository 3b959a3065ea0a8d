#pragma once

#include "trr/attention.hpp"
#include "trr/brainstorm.hpp"
#include "trr/data.hpp"
#include "trr/memory.hpp"
#include "trr/reason.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace trr {

struct ScoredDay {
    Day day;
    double score = 0.0;
    int label = 0;
    bool parse_failed = false;
    bool empty_graph = false;
};

// Mann-Whitney form of the area under the ROC curve: the fraction of
// (positive, negative) pairs ranked correctly, ties counting one half.
// Throws UndefinedMetricError unless both classes are present.
double auroc(std::span<const ScoredDay> scored);
double auroc(std::span<const double> scores, std::span<const int> labels);

enum class Ablation { full, no_temporal, no_decay };

std::string_view to_string(Ablation a);
Ablation ablation_from_string(std::string_view s);
BaselineVariant baseline_from_string(std::string_view s);

struct PipelineConfig {
    ExpansionConfig expansion;
    DecayConfig decay;
    RankConfig rank;
    ReasonOptions reason;
    PredictionMode mode = PredictionMode::binary;
    Ablation ablation = Ablation::full;
    std::optional<BaselineVariant> baseline;
    std::size_t memory_cap = 200;
    std::size_t ted_context_days = 5;
    // A run fails when more than this fraction of days abort.
    double max_abort_fraction = 0.2;

    void validate() const;
};

// Inputs for one evaluation window. Labels are consulted only after every
// prediction of the window exists.
struct ExperimentInputs {
    Corpus corpus;
    Portfolio portfolio;
    LabelSeries labels;
    std::optional<TedSeries> ted;  // probability mode context
};

struct DayRecord {
    Day day;
    bool aborted = false;
    std::string abort_reason;
    ImpactGraph daily;
    ImpactGraph temporal;
    ImpactGraph trr;
    std::vector<std::string> top_entities;
    RankTable ranking;
    std::vector<DayPrediction> predictions;
    std::vector<TranscriptEntry> transcript;
    std::size_t brainstorm_parse_failures = 0;
    std::size_t year_mentions = 0;
};

// Hooks for auditing the order in which a run touches things.
class RunObserver {
public:
    virtual ~RunObserver() = default;
    virtual void on_day_predicted(const Day&) {}
    virtual void on_label_read(const Day&) {}
};

struct RunSummary {
    std::string variant;
    PredictionMode mode = PredictionMode::binary;
    nlohmann::json params() const;
    // One entry per repeat; empty when the labels of the window are single-class.
    std::vector<std::optional<double>> aurocs;
    std::optional<double> mean;
    std::optional<double> stddev;  // population
    std::size_t days_predicted = 0;
    std::size_t days_scored = 0;
    std::size_t days_aborted = 0;
    std::size_t days_unlabeled = 0;
    std::size_t parse_failed = 0;
    std::size_t empty_graph = 0;
    std::size_t clamped = 0;
    std::size_t brainstorm_parse_failures = 0;
    std::size_t rank_not_converged = 0;
    std::size_t year_mentions = 0;
    PipelineConfig config;

    nlohmann::json to_json() const;
};

struct ScoredRecord {
    Day prediction_day;
    Day label_day;
    int label = 0;
    std::vector<double> scores;  // per repeat
    bool parse_failed = false;
    bool empty_graph = false;
};

struct RunResult {
    RunSummary summary;
    std::vector<DayRecord> days;
    std::vector<ScoredRecord> scored;
};

// Runs the day loop (brainstorm -> memory -> attention -> reasoning -> store, or
// the headline baseline) over the whole corpus. Takes no labels.
std::vector<DayRecord> predict_window(const Corpus& corpus, const Portfolio& portfolio, const PipelineConfig& cfg,
                                      ChatBackend& backend, const TedSeries* ted = nullptr,
                                      RunObserver* observer = nullptr, MemoryBank* bank = nullptr);

// Aligns predictions to next-day labels and computes per-repeat AUROC.
RunResult score_window(std::vector<DayRecord> days, const LabelSeries& labels, const PipelineConfig& cfg,
                       RunObserver* observer = nullptr);

RunResult run_experiment(const ExperimentInputs& inputs, const PipelineConfig& cfg, ChatBackend& backend,
                         RunObserver* observer = nullptr, MemoryBank* bank = nullptr);
RunResult run_ablation(Ablation variant, const ExperimentInputs& inputs, PipelineConfig cfg, ChatBackend& backend);
RunResult run_baseline(BaselineVariant variant, const ExperimentInputs& inputs, PipelineConfig cfg,
                       ChatBackend& backend);

enum class SweepParam { lambda, q };

struct SweepRow {
    double value = 0.0;
    RunSummary summary;
};

std::vector<SweepRow> sweep(SweepParam param, const std::vector<double>& values, const ExperimentInputs& inputs,
                            const PipelineConfig& cfg, ChatBackend& backend);
std::string sweep_csv(SweepParam param, const std::vector<SweepRow>& rows);

}  // namespace trr
