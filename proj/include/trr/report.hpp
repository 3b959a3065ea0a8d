#pragma once

#include "trr/eval.hpp"

#include <filesystem>
#include <string>

namespace trr {

std::string summary_json_text(const RunSummary& summary);
// run,auroc (empty auroc when undefined).
std::string results_csv(const RunSummary& summary);
std::string transcripts_jsonl(const RunResult& result);
// One line per day: prediction, label and flags.
std::string records_jsonl(const RunResult& result);

// day,probability,label with the probability averaged over repeats.
std::string indicator_csv(const RunResult& result);
std::string indicator_svg(const RunResult& result);

// Writes summary.json, results.csv, transcripts.jsonl, records.jsonl and
// graphs/<day>.json under dir (created if needed).
void write_run_artifacts(const std::filesystem::path& dir, const RunResult& result);

// UTC timestamp like 20240131T235959Z.
std::string default_run_id();

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace trr
