#include "trr/eval.hpp"

#include "trr/errors.hpp"
#include "trr/util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace trr {

double auroc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw PreconditionError("auroc: scores/labels length mismatch");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of (1-based, tie-averaged) ranks over positives. Ranks are kept doubled
    // so every quantity stays an exact integer.
    double doubled_rank_sum = 0.0;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double doubled_avg = static_cast<double>(i + 1 + j);  // 2 * mean of ranks i+1..j
        for (std::size_t t = i; t < j; ++t) {
            if (labels[order[t]] == 1) {
                doubled_rank_sum += doubled_avg;
                ++positives;
            } else if (labels[order[t]] != 0) {
                throw PreconditionError("auroc: labels must be 0 or 1");
            }
        }
        i = j;
    }
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0) throw UndefinedMetricError("auroc needs both positive and negative labels");
    const double p = static_cast<double>(positives);
    const double u = doubled_rank_sum / 2.0 - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(negatives));
}

double auroc(std::span<const ScoredDay> scored) {
    std::vector<double> s;
    std::vector<int> l;
    for (const auto& d : scored) {
        if (!(d.score >= 0.0 && d.score <= 1.0)) throw PreconditionError("auroc: score outside [0, 1]");
        s.push_back(d.score);
        l.push_back(d.label);
    }
    return auroc(s, l);
}

std::string_view to_string(Ablation a) {
    switch (a) {
        case Ablation::full: return "full";
        case Ablation::no_temporal: return "no_temporal";
        case Ablation::no_decay: return "no_decay";
    }
    return "full";
}

Ablation ablation_from_string(std::string_view s) {
    if (s == "full") return Ablation::full;
    if (s == "no_temporal") return Ablation::no_temporal;
    if (s == "no_decay") return Ablation::no_decay;
    throw InputError("unknown ablation '" + std::string(s) + "' (full, no_temporal, no_decay)");
}

BaselineVariant baseline_from_string(std::string_view s) {
    if (s == "io") return BaselineVariant::io;
    if (s == "cot") return BaselineVariant::cot;
    throw InputError("unknown baseline '" + std::string(s) + "' (io, cot)");
}

void PipelineConfig::validate() const {
    expansion.validate();
    decay.validate();
    rank.validate();
    if (reason.repeats < 1) throw InputError("repeats must be >= 1");
    if (memory_cap < 1) throw InputError("memory cap must be >= 1");
    if (!(max_abort_fraction >= 0.0 && max_abort_fraction <= 1.0))
        throw InputError("max_abort_fraction must lie in [0, 1]");
}

std::vector<DayRecord> predict_window(const Corpus& corpus, const Portfolio& portfolio, const PipelineConfig& cfg,
                                      ChatBackend& backend, const TedSeries* ted, RunObserver* observer,
                                      MemoryBank* bank_in) {
    cfg.validate();
    portfolio.validate();
    MemoryBank local_bank(cfg.memory_cap);
    MemoryBank& bank = bank_in ? *bank_in : local_bank;

    std::vector<Day> days;
    ArticleLabels headlines;
    for (const auto& [day, articles] : corpus) {
        days.push_back(day);
        for (const auto& a : articles) headlines[a.id] = a.headline;
    }
    const TradingCalendar calendar(days);
    const int first_year = days.empty() ? 0 : days.front().year();
    const int last_year = days.empty() ? 0 : days.back().year();

    DecayConfig decay = cfg.decay;
    if (cfg.ablation == Ablation::no_decay) decay.enabled = false;

    std::vector<DayRecord> records;
    std::size_t aborted = 0;
    for (const auto& [day, articles] : corpus) {
        DayRecord rec;
        rec.day = day;
        bool stored = false;
        bool have_daily = false;
        try {
            std::vector<double> context;
            if (cfg.mode == PredictionMode::probability && ted) context = ted_context(*ted, day, cfg.ted_context_days);

            if (cfg.baseline) {
                std::vector<std::string> lines;
                for (const auto& a : articles) lines.push_back(a.headline);
                const auto request = build_baseline_prompt(lines, portfolio, *cfg.baseline, cfg.mode, cfg.reason.prompt);
                const auto digest = request_digest(request);
                const auto prompt = render_messages(request);
                auto replies = parallel_map<std::string>(cfg.reason.repeats, cfg.reason.workers,
                                                         [&](std::size_t) { return complete(backend, request); });
                for (std::size_t r = 0; r < replies.size(); ++r) {
                    auto p = score_reply(day, static_cast<int>(r), replies[r], cfg.mode);
                    rec.transcript.push_back({day.iso(), "baseline", static_cast<int>(r), digest, prompt, replies[r],
                                              p.parse_failed ? "unparseable prediction" : ""});
                    rec.predictions.push_back(std::move(p));
                }
            } else {
                auto expansion = expand_day(articles, portfolio, cfg.expansion, backend);
                rec.daily = std::move(expansion.graph);
                rec.transcript = std::move(expansion.transcript);
                rec.brainstorm_parse_failures = expansion.parse_failures.size();
                have_daily = true;

                rec.temporal = cfg.ablation == Ablation::no_temporal ? rec.daily : bank.retrieve(rec.daily);
                if (!rec.temporal.empty()) {
                    rec.ranking = rank(rec.temporal, decay, day, calendar, cfg.rank);
                    rec.top_entities = select_top_q(rec.ranking, rec.temporal, cfg.rank.q);
                    rec.trr = filter_chains(rec.temporal,
                                            std::set<std::string>(rec.top_entities.begin(), rec.top_entities.end()),
                                            portfolio);
                }
                auto outcome = predict_day(day, rec.trr, portfolio, cfg.mode, backend, cfg.reason, context, &headlines);
                rec.predictions = std::move(outcome.predictions);
                rec.transcript.insert(rec.transcript.end(), outcome.transcript.begin(), outcome.transcript.end());
                bank.store(rec.daily, day);
                stored = true;
            }
        } catch (const TransportError& e) {
            rec.aborted = true;
            rec.abort_reason = e.what();
            rec.predictions.clear();
            ++aborted;
            if (have_daily && !stored) bank.store(rec.daily, day);
        }
        for (const auto& t : rec.transcript)
            if (t.stage != "brainstorm") rec.year_mentions += count_out_of_window_years(t.raw_response, first_year, last_year);
        if (observer) observer->on_day_predicted(day);
        records.push_back(std::move(rec));
    }
    if (!records.empty() &&
        static_cast<double>(aborted) > cfg.max_abort_fraction * static_cast<double>(records.size())) {
        throw RunFailedError(std::to_string(aborted) + " of " + std::to_string(records.size()) +
                             " days aborted (limit " + format_double(cfg.max_abort_fraction * 100.0) + "%)");
    }
    return records;
}

RunResult score_window(std::vector<DayRecord> days, const LabelSeries& labels, const PipelineConfig& cfg,
                       RunObserver* observer) {
    RunResult result;
    RunSummary& s = result.summary;
    s.config = cfg;
    s.mode = cfg.mode;
    s.variant = cfg.baseline ? std::string(to_string(*cfg.baseline)) : std::string(to_string(cfg.ablation));

    std::vector<Day> predicted;
    std::map<Day, const DayRecord*> by_day;
    for (const auto& d : days) {
        s.brainstorm_parse_failures += d.brainstorm_parse_failures;
        s.year_mentions += d.year_mentions;
        if (!d.ranking.scores.empty() && !d.ranking.converged) ++s.rank_not_converged;
        if (d.aborted) {
            ++s.days_aborted;
            continue;
        }
        predicted.push_back(d.day);
        by_day[d.day] = &d;
        for (const auto& p : d.predictions) {
            s.parse_failed += p.parse_failed;
            s.empty_graph += p.empty_graph;
            s.clamped += p.clamped;
        }
    }
    s.days_predicted = predicted.size();

    const auto alignment = align_next_day(labels, predicted);
    s.days_unlabeled = alignment.dropped.size();
    for (const auto& pair : alignment.pairs) {
        if (observer) observer->on_label_read(pair.label_day);
        const DayRecord& rec = *by_day.at(pair.prediction_day);
        ScoredRecord sr{pair.prediction_day, pair.label_day, pair.label, {}, false, false};
        for (const auto& p : rec.predictions) {
            sr.scores.push_back(p.score());
            sr.parse_failed = sr.parse_failed || p.parse_failed;
            sr.empty_graph = sr.empty_graph || p.empty_graph;
        }
        result.scored.push_back(std::move(sr));
    }
    s.days_scored = result.scored.size();

    std::vector<double> defined;
    for (std::size_t r = 0; r < cfg.reason.repeats; ++r) {
        std::vector<ScoredDay> series;
        for (const auto& sr : result.scored)
            series.push_back({sr.prediction_day, sr.scores.at(r), sr.label, sr.parse_failed, sr.empty_graph});
        try {
            const double a = auroc(series);
            s.aurocs.emplace_back(a);
            defined.push_back(a);
        } catch (const UndefinedMetricError&) {
            s.aurocs.emplace_back(std::nullopt);
        }
    }
    if (!defined.empty()) {
        const double mean = std::accumulate(defined.begin(), defined.end(), 0.0) / static_cast<double>(defined.size());
        double var = 0.0;
        for (double a : defined) var += (a - mean) * (a - mean);
        s.mean = mean;
        s.stddev = std::sqrt(var / static_cast<double>(defined.size()));
    }
    result.days = std::move(days);
    return result;
}

RunResult run_experiment(const ExperimentInputs& inputs, const PipelineConfig& cfg, ChatBackend& backend,
                         RunObserver* observer, MemoryBank* bank) {
    auto days = predict_window(inputs.corpus, inputs.portfolio, cfg, backend,
                               inputs.ted ? &*inputs.ted : nullptr, observer, bank);
    return score_window(std::move(days), inputs.labels, cfg, observer);
}

RunResult run_ablation(Ablation variant, const ExperimentInputs& inputs, PipelineConfig cfg, ChatBackend& backend) {
    cfg.ablation = variant;
    cfg.baseline.reset();
    return run_experiment(inputs, cfg, backend);
}

RunResult run_baseline(BaselineVariant variant, const ExperimentInputs& inputs, PipelineConfig cfg,
                       ChatBackend& backend) {
    cfg.baseline = variant;
    return run_experiment(inputs, cfg, backend);
}

std::vector<SweepRow> sweep(SweepParam param, const std::vector<double>& values, const ExperimentInputs& inputs,
                            const PipelineConfig& cfg, ChatBackend& backend) {
    if (values.empty()) throw InputError("sweep needs at least one value");
    std::vector<SweepRow> rows;
    for (double v : values) {
        PipelineConfig c = cfg;
        if (param == SweepParam::lambda) {
            c.decay.lambda = v;
        } else {
            if (v < 1.0 || v != std::floor(v)) throw InputError("q sweep values must be positive integers");
            c.rank.q = static_cast<std::size_t>(v);
        }
        rows.push_back({v, run_experiment(inputs, c, backend).summary});
    }
    return rows;
}

std::string sweep_csv(SweepParam param, const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    const std::size_t repeats = rows.empty() ? 0 : rows.front().summary.aurocs.size();
    os << "param,value,auroc_mean,auroc_std";
    for (std::size_t r = 0; r < repeats; ++r) os << ",run_" << (r + 1);
    os << "\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (const auto& row : rows) {
        os << (param == SweepParam::lambda ? "lambda" : "q") << "," << format_double(row.value) << ","
           << opt(row.summary.mean) << "," << opt(row.summary.stddev);
        for (const auto& a : row.summary.aurocs) os << "," << opt(a);
        os << "\n";
    }
    return os.str();
}

nlohmann::json RunSummary::params() const {
    nlohmann::json p;
    p["lambda"] = config.decay.lambda;
    p["decay_enabled"] = config.decay.enabled && config.ablation != Ablation::no_decay;
    p["age_unit"] = config.decay.unit == AgeUnit::trading_days ? "trading_days" : "calendar_days";
    p["q"] = config.rank.q;
    p["damping"] = config.rank.damping;
    p["tolerance"] = config.rank.tolerance;
    p["max_rank_iterations"] = config.rank.max_iter;
    p["k"] = config.expansion.k;
    p["max_iterations"] = config.expansion.max_iterations;
    p["body_char_cap"] = config.expansion.body_char_cap;
    p["repeats"] = config.reason.repeats;
    p["temperature"] = config.reason.prompt.temperature;
    p["memory_cap"] = config.memory_cap;
    return p;
}

nlohmann::json RunSummary::to_json() const {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    nlohmann::json j;
    j["variant"] = variant;
    j["mode"] = mode == PredictionMode::binary ? "crash" : "macro";
    j["params"] = params();
    j["auroc_runs"] = nlohmann::json::array();
    for (const auto& a : aurocs) j["auroc_runs"].push_back(opt(a));
    j["auroc_mean"] = opt(mean);
    j["auroc_std"] = opt(stddev);
    j["days"] = {{"predicted", days_predicted},
                 {"scored", days_scored},
                 {"aborted", days_aborted},
                 {"unlabeled", days_unlabeled}};
    j["flags"] = {{"parse_failed", parse_failed},
                  {"empty_graph", empty_graph},
                  {"clamped", clamped},
                  {"brainstorm_parse_failures", brainstorm_parse_failures},
                  {"rank_not_converged", rank_not_converged},
                  {"out_of_window_year_mentions", year_mentions}};
    return j;
}

}  // namespace trr
