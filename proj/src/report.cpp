#include "trr/report.hpp"

#include "trr/errors.hpp"
#include "trr/graph_io.hpp"
#include "trr/util.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace trr {

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
    if (!out) throw InputError("write failed for " + path.string());
}

std::string summary_json_text(const RunSummary& summary) { return summary.to_json().dump(2) + "\n"; }

std::string results_csv(const RunSummary& summary) {
    std::ostringstream os;
    os << "run,auroc\n";
    for (std::size_t i = 0; i < summary.aurocs.size(); ++i)
        os << (i + 1) << "," << (summary.aurocs[i] ? format_double(*summary.aurocs[i]) : "") << "\n";
    return os.str();
}

std::string transcripts_jsonl(const RunResult& result) {
    std::string out;
    for (const auto& d : result.days)
        for (const auto& t : d.transcript) out += t.to_json().dump() + "\n";
    return out;
}

std::string records_jsonl(const RunResult& result) {
    std::map<Day, const ScoredRecord*> scored;
    for (const auto& s : result.scored) scored[s.prediction_day] = &s;
    std::string out;
    for (const auto& d : result.days) {
        nlohmann::json j;
        j["day"] = d.day.iso();
        j["aborted"] = d.aborted;
        if (d.aborted) j["abort_reason"] = d.abort_reason;
        j["top_entities"] = d.top_entities;
        j["trr_edges"] = d.trr.edge_count();
        j["predictions"] = nlohmann::json::array();
        for (const auto& p : d.predictions) {
            nlohmann::json pj;
            pj["repeat"] = p.repeat;
            pj["score"] = p.score();
            if (p.verdict) pj["verdict"] = *p.verdict == Verdict::crash ? "crash" : "no_crash";
            if (p.probability) pj["probability"] = *p.probability;
            pj["parse_failed"] = p.parse_failed;
            pj["empty_graph"] = p.empty_graph;
            pj["clamped"] = p.clamped;
            pj["transcript_ref"] = p.transcript_ref;
            j["predictions"].push_back(std::move(pj));
        }
        if (auto it = scored.find(d.day); it != scored.end()) {
            j["label_day"] = it->second->label_day.iso();
            j["label"] = it->second->label;
        } else {
            j["label"] = nullptr;
        }
        j["brainstorm_parse_failures"] = d.brainstorm_parse_failures;
        j["out_of_window_year_mentions"] = d.year_mentions;
        out += j.dump() + "\n";
    }
    return out;
}

namespace {

double mean_score(const ScoredRecord& r) {
    if (r.scores.empty()) return 0.0;
    return std::accumulate(r.scores.begin(), r.scores.end(), 0.0) / static_cast<double>(r.scores.size());
}

}  // namespace

std::string indicator_csv(const RunResult& result) {
    std::ostringstream os;
    os << "day,probability,label\n";
    for (const auto& r : result.scored)
        os << r.prediction_day.iso() << "," << format_double(mean_score(r)) << "," << r.label << "\n";
    return os.str();
}

std::string indicator_svg(const RunResult& result) {
    constexpr double width = 800, height = 300, margin = 40;
    const auto& rows = result.scored;
    const double span = rows.size() > 1 ? static_cast<double>(rows.size() - 1) : 1.0;
    auto x = [&](std::size_t i) { return margin + (width - 2 * margin) * static_cast<double>(i) / span; };
    auto y = [&](double v) { return height - margin - (height - 2 * margin) * v; };

    std::ostringstream indicator, label;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        indicator << (i ? " " : "") << format_double(x(i)) << "," << format_double(y(mean_score(rows[i])));
        label << (i ? " " : "") << format_double(x(i)) << "," << format_double(y(rows[i].label));
    }
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    os << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "  <line x1=\"" << margin << "\" y1=\"" << y(0) << "\" x2=\"" << width - margin << "\" y2=\"" << y(0)
       << "\" stroke=\"black\"/>\n";
    os << "  <line x1=\"" << margin << "\" y1=\"" << y(0) << "\" x2=\"" << margin << "\" y2=\"" << y(1)
       << "\" stroke=\"black\"/>\n";
    os << "  <polyline fill=\"none\" stroke=\"red\" stroke-width=\"2\" points=\"" << label.str() << "\"/>\n";
    os << "  <polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"" << indicator.str()
       << "\"/>\n";
    if (!rows.empty()) {
        os << "  <text x=\"" << margin << "\" y=\"" << height - 10 << "\" font-size=\"12\">"
           << rows.front().prediction_day.iso() << "</text>\n";
        os << "  <text x=\"" << width - margin - 70 << "\" y=\"" << height - 10 << "\" font-size=\"12\">"
           << rows.back().prediction_day.iso() << "</text>\n";
    }
    os << "  <text x=\"" << margin << "\" y=\"20\" font-size=\"12\">crisis probability (blue) vs label (red)</text>\n";
    os << "</svg>\n";
    return os.str();
}

void write_run_artifacts(const std::filesystem::path& dir, const RunResult& result) {
    std::filesystem::create_directories(dir / "graphs");
    write_text(dir / "summary.json", summary_json_text(result.summary));
    write_text(dir / "results.csv", results_csv(result.summary));
    write_text(dir / "transcripts.jsonl", transcripts_jsonl(result));
    write_text(dir / "records.jsonl", records_jsonl(result));
    for (const auto& d : result.days) {
        auto j = day_archive_json(d.day, d.daily, d.temporal, d.trr, d.top_entities, d.ranking);
        write_text(dir / "graphs" / (d.day.iso() + ".json"), j.dump(1) + "\n");
    }
}

std::string default_run_id() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

}  // namespace trr
