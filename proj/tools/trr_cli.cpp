// Command-line front end: run, macro, sweep and export-graph.

#include "trr/config.hpp"
#include "trr/errors.hpp"
#include "trr/eval.hpp"
#include "trr/graph_io.hpp"
#include "trr/report.hpp"
#include "trr/util.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <functional>
#include <iostream>
#include <sstream>

namespace {

using namespace trr;

// Binds the shared run flags. Each flag writes into `flags`; after parsing,
// only flags that were actually given override the config file.
struct RunFlags {
    RunConfig flags;
    std::string config_path;
    std::string mode = "crash";
    double percentile = 0.0;
    std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> bindings;

    template <typename T>
    void bind(CLI::App& app, const std::string& name, T RunConfig::*field, const std::string& help) {
        auto* opt = app.add_option(name, flags.*field, help);
        bindings.emplace_back(opt, [this, field](RunConfig& c) { c.*field = flags.*field; });
    }

    void attach(CLI::App& app) {
        app.add_option("--config", config_path, "JSON config file; flags override it");
        bind(app, "--corpus", &RunConfig::corpus, "line-delimited JSON news corpus");
        bind(app, "--prices", &RunConfig::prices, "CSV date,ticker,close");
        bind(app, "--ted", &RunConfig::ted, "CSV date,spread");
        bind(app, "--portfolio", &RunConfig::portfolio, "bundled portfolio name or fixture path");
        bind(app, "--backend", &RunConfig::backend, "scripted:<fixture.jsonl> or http(s)://host/path");
        bind(app, "--model", &RunConfig::model, "model name sent to the http backend");
        bind(app, "--token-env", &RunConfig::token_env, "environment variable holding the API token");
        bind(app, "--lambda", &RunConfig::lambda, "memory decay constant (trading days)");
        bind(app, "--q", &RunConfig::q, "entities kept by the attention filter");
        bind(app, "--k", &RunConfig::k, "entities requested per brainstorm expansion");
        bind(app, "--max-iter", &RunConfig::max_iter, "brainstorm iterations");
        bind(app, "--damping", &RunConfig::damping, "PageRank damping factor");
        bind(app, "--repeats", &RunConfig::repeats, "reasoning prompt repetitions");
        bind(app, "--temperature", &RunConfig::temperature, "sampling temperature");
        bind(app, "--ablate", &RunConfig::ablate, "full | no_temporal | no_decay");
        bind(app, "--baseline", &RunConfig::baseline, "io | cot (headline-only baselines)");
        bind(app, "--out", &RunConfig::out, "output root directory");
        bind(app, "--run-id", &RunConfig::run_id, "run directory name (default: UTC timestamp)");
        bind(app, "--crash-threshold", &RunConfig::crash_threshold, "portfolio return at or below which a day is a crash");
        bind(app, "--crisis-threshold", &RunConfig::crisis_threshold, "TED spread above which a day is a crisis");
        bind(app, "--workers", &RunConfig::workers, "concurrent backend calls");
        bind(app, "--memory-cap", &RunConfig::memory_cap, "chains kept per entity");
        bind(app, "--age-unit", &RunConfig::age_unit, "trading | calendar");
        auto* m = app.add_option("--mode", mode, "crash | macro")->check(CLI::IsMember({"crash", "macro"}));
        bindings.emplace_back(m, [this](RunConfig& c) { c.mode = mode == "macro" ? TaskMode::macro : TaskMode::crash; });
        auto* p = app.add_option("--percentile", percentile, "derive the crash threshold from this return percentile");
        bindings.emplace_back(p, [this](RunConfig& c) { c.percentile = percentile; });
    }

    RunConfig resolve(std::optional<TaskMode> forced = std::nullopt) const {
        RunConfig cfg;
        if (forced) cfg.mode = *forced;
        if (!config_path.empty()) apply_config_file(cfg, config_path);
        for (const auto& [opt, copy] : bindings)
            if (opt->count() > 0) copy(cfg);
        if (forced) cfg.mode = *forced;
        if (cfg.mode == TaskMode::macro && cfg.portfolio.empty()) cfg.portfolio = "economies";
        if (cfg.run_id.empty()) cfg.run_id = default_run_id();
        return cfg;
    }
};

void print_summary(const RunSummary& s, const std::filesystem::path& dir) {
    std::cout << "variant " << s.variant << ": ";
    if (s.mean)
        std::cout << "AUROC " << format_double(*s.mean) << " +/- " << format_double(*s.stddev);
    else
        std::cout << "AUROC undefined (single-class labels)";
    std::cout << " over " << s.days_scored << " scored days, " << s.days_aborted << " aborted\n";
    std::cout << "artifacts: " << dir.string() << "\n";
}

int cmd_run(const RunConfig& cfg, bool macro_outputs) {
    auto inputs = load_inputs(cfg);
    auto pipeline = cfg.pipeline();
    HttpOptions http;
    http.max_in_flight = static_cast<int>(cfg.workers);
    auto backend = make_backend(parse_backend_spec(cfg.backend, cfg.model, cfg.token_env), http);

    MemoryBank bank(cfg.memory_cap);
    auto days = predict_window(inputs.corpus, inputs.portfolio, pipeline, *backend,
                               inputs.ted ? &*inputs.ted : nullptr, nullptr, &bank);
    auto result = score_window(std::move(days), inputs.labels, pipeline);

    const auto dir = std::filesystem::path(cfg.out) / cfg.run_id;
    write_run_artifacts(dir, result);
    bank.snapshot(dir / "memory.json");
    if (macro_outputs) {
        write_text(dir / "indicator.csv", indicator_csv(result));
        write_text(dir / "indicator.svg", indicator_svg(result));
    }
    print_summary(result.summary, dir);
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& param, const std::vector<double>& values) {
    auto inputs = load_inputs(cfg);
    HttpOptions http;
    http.max_in_flight = static_cast<int>(cfg.workers);
    auto backend = make_backend(parse_backend_spec(cfg.backend, cfg.model, cfg.token_env), http);
    const auto p = param == "lambda" ? SweepParam::lambda : SweepParam::q;
    auto rows = sweep(p, values, inputs, cfg.pipeline(), *backend);
    const auto dir = std::filesystem::path(cfg.out) / cfg.run_id;
    write_text(dir / "sweep.csv", sweep_csv(p, rows));
    for (const auto& row : rows)
        write_text(dir / (param + "_" + format_double(row.value)) / "summary.json", summary_json_text(row.summary));
    std::cout << sweep_csv(p, rows);
    std::cout << "artifacts: " << dir.string() << "\n";
    return 0;
}

int cmd_export_graph(const std::string& archive, const std::string& day, const std::string& format,
                     const std::string& which, std::size_t labels, const std::string& corpus_path,
                     const std::string& out_path) {
    std::filesystem::path path = archive;
    if (std::filesystem::is_directory(path)) {
        if (day.empty()) throw InputError("--day is required when --archive is a run directory");
        path = path / "graphs" / (day + ".json");
    }
    if (!std::filesystem::exists(path)) throw FormatError("no graph archive at " + path.string());
    const auto graph = load_graph_file(path, which);

    std::string text;
    if (format == "json") {
        text = graph_to_json(graph).dump(1) + "\n";
    } else {
        ArticleLabels headlines;
        if (!corpus_path.empty())
            for (const auto& [_, articles] : load_corpus(corpus_path))
                for (const auto& a : articles) headlines[a.id] = a.headline;
        DotOptions opts;
        opts.labeled_vertices = labels;
        opts.article_labels = corpus_path.empty() ? nullptr : &headlines;
        text = to_dot(graph, opts);
    }
    if (out_path.empty())
        std::cout << text;
    else
        write_text(out_path, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temporal-relational impact graphs over news for portfolio crash and crisis detection"};
    app.require_subcommand(1);

    RunFlags run_flags, macro_flags, sweep_flags;
    auto* run = app.add_subcommand("run", "run the pipeline, an ablation, or a baseline over one window");
    run_flags.attach(*run);
    auto* macro = app.add_subcommand("macro", "crisis-probability indicator over regional economies");
    macro_flags.attach(*macro);

    auto* sweep_cmd = app.add_subcommand("sweep", "one run per value of lambda or q");
    sweep_flags.attach(*sweep_cmd);
    std::string sweep_param;
    std::vector<double> sweep_values;
    sweep_cmd->add_option("--param", sweep_param, "lambda | q")->required()->check(CLI::IsMember({"lambda", "q"}));
    sweep_cmd->add_option("--values", sweep_values, "comma-separated values")->required()->delimiter(',');

    auto* export_cmd = app.add_subcommand("export-graph", "render an archived day graph as DOT or JSON");
    std::string archive, day, format = "dot", which = "trr", corpus_path, out_path;
    std::size_t top_labels = 5;
    export_cmd->add_option("--archive", archive, "run directory or graphs/<day>.json file")->required();
    export_cmd->add_option("--day", day, "YYYY-MM-DD (when --archive is a run directory)");
    export_cmd->add_option("--format", format, "dot | json")->check(CLI::IsMember({"dot", "json"}));
    export_cmd->add_option("--graph", which, "daily | temporal | trr")->check(CLI::IsMember({"daily", "temporal", "trr"}));
    export_cmd->add_option("--top-labels", top_labels, "vertices labelled in DOT output");
    export_cmd->add_option("--corpus", corpus_path, "corpus used to label article vertices with headlines");
    export_cmd->add_option("--output", out_path, "write to file instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(run_flags.resolve(), run_flags.resolve().mode == TaskMode::macro);
        if (*macro) return cmd_run(macro_flags.resolve(TaskMode::macro), true);
        if (*sweep_cmd) return cmd_sweep(sweep_flags.resolve(), sweep_param, sweep_values);
        if (*export_cmd) return cmd_export_graph(archive, day, format, which, top_labels, corpus_path, out_path);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
