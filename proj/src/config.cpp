#include "trr/config.hpp"

#include "trr/errors.hpp"

#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#ifndef TRR_DEFAULT_DATA_DIR
#define TRR_DEFAULT_DATA_DIR "data"
#endif

namespace trr {

void RunConfig::validate() const {
    auto need = [](bool ok, const std::string& field, const std::string& why) {
        if (!ok) throw InputError("config field '" + field + "': " + why);
    };
    need(!corpus.empty(), "corpus", "required");
    need(!portfolio.empty(), "portfolio", "required");
    need(!backend.empty(), "backend", "required");
    if (mode == TaskMode::crash)
        need(!prices.empty(), "prices", "required in crash mode");
    else
        need(!ted.empty(), "ted", "required in macro mode");
    need(lambda > 0.0, "lambda", "must be > 0");
    need(q >= 1, "q", "must be >= 1");
    need(k >= 1, "k", "must be >= 1");
    need(max_iter >= 1, "max-iter", "must be >= 1");
    need(damping > 0.0 && damping < 1.0, "damping", "must lie in (0, 1)");
    need(repeats >= 1, "repeats", "must be >= 1");
    need(temperature >= 0.0 && temperature <= 2.0, "temperature", "must lie in [0, 2]");
    need(ablate == "full" || ablate == "no_temporal" || ablate == "no_decay", "ablate",
         "expected full, no_temporal or no_decay");
    need(baseline.empty() || baseline == "io" || baseline == "cot", "baseline", "expected io or cot");
    need(!percentile || (*percentile > 0.0 && *percentile < 100.0), "percentile", "must lie in (0, 100)");
    need(workers >= 1, "workers", "must be >= 1");
    need(memory_cap >= 1, "memory-cap", "must be >= 1");
    need(age_unit == "trading" || age_unit == "calendar", "age-unit", "expected trading or calendar");
}

PipelineConfig RunConfig::pipeline() const {
    PipelineConfig p;
    p.expansion.k = k;
    p.expansion.max_iterations = max_iter;
    p.expansion.workers = workers;
    p.expansion.model_name = model;
    p.expansion.temperature = temperature;
    p.decay.lambda = lambda;
    p.decay.unit = age_unit == "calendar" ? AgeUnit::calendar_days : AgeUnit::trading_days;
    p.rank.q = q;
    p.rank.damping = damping;
    p.reason.repeats = repeats;
    p.reason.workers = workers;
    p.reason.prompt.model_name = model;
    p.reason.prompt.temperature = temperature;
    p.mode = mode == TaskMode::crash ? PredictionMode::binary : PredictionMode::probability;
    p.ablation = ablation_from_string(ablate);
    if (!baseline.empty()) p.baseline = baseline_from_string(baseline);
    p.memory_cap = memory_cap;
    return p;
}

std::string interpolate_env(const std::string& value) {
    std::string out;
    std::size_t i = 0;
    while (i < value.size()) {
        if (value.compare(i, 2, "${") == 0) {
            const auto close = value.find('}', i + 2);
            if (close == std::string::npos) throw InputError("unterminated ${ in config value '" + value + "'");
            const std::string name = value.substr(i + 2, close - i - 2);
            const char* v = std::getenv(name.c_str());
            if (!v) throw InputError("config references unset environment variable " + name);
            out += v;
            i = close + 1;
        } else {
            out.push_back(value[i++]);
        }
    }
    return out;
}

void apply_config_json(RunConfig& cfg, const nlohmann::json& doc) {
    if (!doc.is_object()) throw InputError("config document must be a JSON object");
    for (const auto& [raw_key, value] : doc.items()) {
        std::string key = raw_key;
        for (auto& c : key)
            if (c == '-') c = '_';
        auto str = [&] {
            if (!value.is_string()) throw InputError("config field '" + raw_key + "' must be a string");
            return interpolate_env(value.get<std::string>());
        };
        auto num = [&] {
            if (!value.is_number()) throw InputError("config field '" + raw_key + "' must be a number");
            return value.get<double>();
        };
        auto count = [&] {
            if (!value.is_number_integer() || value.get<long long>() < 0) throw InputError("config field '" + raw_key + "' must be a non-negative integer");
            return value.get<std::size_t>();
        };
        if (key == "corpus") cfg.corpus = str();
        else if (key == "prices") cfg.prices = str();
        else if (key == "ted") cfg.ted = str();
        else if (key == "portfolio") cfg.portfolio = str();
        else if (key == "backend") cfg.backend = str();
        else if (key == "model") cfg.model = str();
        else if (key == "token_env") cfg.token_env = str();
        else if (key == "lambda") cfg.lambda = num();
        else if (key == "q") cfg.q = count();
        else if (key == "k") cfg.k = count();
        else if (key == "max_iter") cfg.max_iter = count();
        else if (key == "damping") cfg.damping = num();
        else if (key == "repeats") cfg.repeats = count();
        else if (key == "temperature") cfg.temperature = num();
        else if (key == "mode") {
            const auto m = str();
            if (m != "crash" && m != "macro") throw InputError("config field 'mode': expected crash or macro");
            cfg.mode = m == "crash" ? TaskMode::crash : TaskMode::macro;
        }
        else if (key == "ablate") cfg.ablate = str();
        else if (key == "baseline") cfg.baseline = str();
        else if (key == "out") cfg.out = str();
        else if (key == "run_id") cfg.run_id = str();
        else if (key == "percentile") cfg.percentile = num();
        else if (key == "crash_threshold") cfg.crash_threshold = num();
        else if (key == "crisis_threshold") cfg.crisis_threshold = num();
        else if (key == "workers") cfg.workers = count();
        else if (key == "memory_cap") cfg.memory_cap = count();
        else if (key == "age_unit") cfg.age_unit = str();
        else throw InputError("unknown config field '" + raw_key + "'");
    }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("config file not found: " + path.string());
    try {
        apply_config_json(cfg, nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

std::filesystem::path data_dir() {
    if (const char* env = std::getenv("TRR_DATA_DIR")) return env;
    return TRR_DEFAULT_DATA_DIR;
}

Portfolio portfolio_from_json(const nlohmann::json& j) {
    try {
        Portfolio p;
        p.name = j.at("name").get<std::string>();
        const auto mode = j.value("mode", std::string("stock"));
        if (mode != "stock" && mode != "economy") throw InputError("portfolio mode must be stock or economy");
        p.mode = mode == "stock" ? PortfolioMode::stock : PortfolioMode::economy;
        for (const auto& m : j.at("members")) {
            Stock s;
            s.ticker = m.at("ticker").get<std::string>();
            s.name = m.value("name", std::string());
            s.category = m.value("category", std::string());
            if (m.contains("aliases")) s.aliases = m.at("aliases").get<std::vector<std::string>>();
            p.members.push_back(std::move(s));
        }
        p.validate();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("portfolio fixture: ") + e.what());
    }
}

Portfolio load_portfolio(const std::string& name_or_path) {
    std::filesystem::path path = name_or_path;
    if (!std::filesystem::exists(path)) path = data_dir() / "portfolios" / (name_or_path + ".json");
    std::ifstream in(path);
    if (!in) throw InputError("config field 'portfolio': no fixture named or at '" + name_or_path + "'");
    try {
        return portfolio_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

LabelSeries portfolio_crash_labels(const std::map<std::string, PriceSeries>& prices, const Portfolio& portfolio,
                                   double threshold, std::optional<double> percentile) {
    std::map<std::string, ValueSeries> returns;
    for (const auto& m : portfolio.members) {
        auto it = prices.find(m.ticker);
        if (it == prices.end() || it->second.rows.size() < 2) continue;
        returns[m.ticker] = daily_returns(it->second);
    }
    if (returns.empty()) throw InputError("config field 'prices': no price rows for any portfolio ticker");
    const auto series = portfolio_returns(returns);
    const double t = percentile ? percentile_threshold(series, *percentile) : threshold;
    return crash_labels(series, t);
}

ExperimentInputs load_inputs(const RunConfig& cfg) {
    cfg.validate();
    ExperimentInputs in;
    if (!std::filesystem::exists(cfg.corpus)) throw InputError("config field 'corpus': file not found: " + cfg.corpus);
    in.corpus = load_corpus(cfg.corpus);
    in.portfolio = load_portfolio(cfg.portfolio);
    if (cfg.mode == TaskMode::crash) {
        if (!std::filesystem::exists(cfg.prices))
            throw InputError("config field 'prices': file not found: " + cfg.prices);
        in.labels = portfolio_crash_labels(load_prices(cfg.prices), in.portfolio, cfg.crash_threshold, cfg.percentile);
    } else {
        if (!std::filesystem::exists(cfg.ted)) throw InputError("config field 'ted': file not found: " + cfg.ted);
        in.ted = load_ted(cfg.ted);
        in.labels = crisis_labels(*in.ted, cfg.crisis_threshold);
    }
    return in;
}

}  // namespace trr
