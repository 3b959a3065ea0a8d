#pragma once

#include "trr/eval.hpp"

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace trr {

enum class TaskMode { crash, macro };

// Everything a CLI invocation needs. Defaults follow the reference settings
// (lambda 1, q 6, 5 repeats, temperature 0).
struct RunConfig {
    std::string corpus;
    std::string prices;
    std::string ted;
    std::string portfolio;
    std::string backend;
    std::string model;
    std::string token_env;
    double lambda = 1.0;
    std::size_t q = 6;
    std::size_t k = 3;
    std::size_t max_iter = 4;
    double damping = 0.85;
    std::size_t repeats = 5;
    double temperature = 0.0;
    TaskMode mode = TaskMode::crash;
    std::string ablate = "full";
    std::string baseline;  // empty, io or cot
    std::string out = "runs";
    std::string run_id;  // defaults to a UTC timestamp
    std::optional<double> percentile;
    double crash_threshold = kDefaultCrashThreshold;
    double crisis_threshold = kDefaultCrisisThreshold;
    std::size_t workers = 1;
    std::size_t memory_cap = 200;
    std::string age_unit = "trading";

    // Throws InputError naming the offending field.
    void validate() const;
    PipelineConfig pipeline() const;
};

// Applies a JSON config document onto `cfg`. String values may reference
// environment variables as ${NAME}.
void apply_config_json(RunConfig& cfg, const nlohmann::json& doc);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);
std::string interpolate_env(const std::string& value);

Portfolio portfolio_from_json(const nlohmann::json& j);
// A path to a JSON fixture, or the name of a bundled one (data/portfolios/<name>.json).
Portfolio load_portfolio(const std::string& name_or_path);
std::filesystem::path data_dir();

// Builds the inputs of a run: corpus, portfolio, labels and (macro) TED series.
ExperimentInputs load_inputs(const RunConfig& cfg);

// Equal-weight next-day crash labels for the portfolio's tickers.
LabelSeries portfolio_crash_labels(const std::map<std::string, PriceSeries>& prices, const Portfolio& portfolio,
                                   double threshold, std::optional<double> percentile);

}  // namespace trr
