// Regenerates the scripted-backend fixture for the bundled synthetic data set.
//
// A rule table stands in for the chat model: brainstorm replies come from
// headline and entity lookups, predictions from counting alarm terms. Every
// run the CLI can make over the synthetic data (crash variants, baselines,
// sweeps, macro) is executed once against the rules and each (digest, reply)
// pair is recorded.

#include "trr/config.hpp"
#include "trr/errors.hpp"
#include "trr/eval.hpp"
#include "trr/util.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <mutex>

namespace {

using namespace trr;
using nlohmann::json;

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string line_after(const std::string& text, const std::string& marker) {
    const auto at = text.find(marker);
    if (at == std::string::npos) return {};
    const auto start = at + marker.size();
    return text.substr(start, text.find('\n', start) - start);
}

class RuleBackend final : public ChatBackend {
public:
    explicit RuleBackend(json rules) : rules_(std::move(rules)) {}

    std::string complete(const ChatRequest& request) override {
        const std::string& user = request.messages.back().text;
        std::string reply;
        if (user.find("Answer with at most") != std::string::npos)
            reply = brainstorm(user);
        else if (user.find("Impact graph as (date") != std::string::npos)
            reply = predict(user, rules_.at("reason"));
        else if (user.find("Today's news headlines:") != std::string::npos)
            reply = predict(user, rules_.at("baseline"));
        else
            throw Error("rule backend cannot classify prompt:\n" + user);

        std::lock_guard lock(mu_);
        recorded_[request_digest(request)] = reply;
        return reply;
    }

    std::string describe() const override { return "rules"; }

    const std::map<std::string, std::string>& recorded() const { return recorded_; }

private:
    std::string brainstorm(const std::string& user) const {
        const json* items = nullptr;
        std::string subject;
        if (auto headline = line_after(user, "\nHeadline: "); !headline.empty()) {
            subject = headline;
            const auto& table = rules_.at("brainstorm").at("articles");
            if (table.contains(headline)) items = &table.at(headline);
        } else {
            subject = line_after(user, "\nEntity: ");
            const auto& table = rules_.at("brainstorm").at("entities");
            if (table.contains(subject)) items = &table.at(subject);
        }
        if (!items) throw Error("no brainstorm rule for '" + subject + "'");
        std::string out;
        int n = 0;
        for (const auto& item : *items)
            out += std::to_string(++n) + ". " + item.at(0).get<std::string>() + " | " + item.at(1).get<std::string>() + "\n";
        return out;
    }

    static std::string predict(const std::string& user, const json& rule) {
        const std::string text = lower(user);
        std::vector<std::string> hits;
        for (const auto& term : rule.at("alarm_terms"))
            if (text.find(term.get<std::string>()) != std::string::npos) hits.push_back(term.get<std::string>());

        std::string because = hits.empty() ? "no stress signals appear in the input" : "signals present:";
        for (std::size_t i = 0; i < hits.size(); ++i) because += (i ? ", " : " ") + hits[i];

        if (user.find("Probability: <") != std::string::npos) {
            double p = rule.value("probability_base", 0.1) + rule.value("probability_step", 0.1) * static_cast<double>(hits.size());
            const auto ted = line_after(user, "TED spread over the past ");
            if (const auto colon = ted.rfind(", "); !ted.empty()) {
                const auto last = colon == std::string::npos ? ted.substr(ted.find(": ") + 2) : ted.substr(colon + 2);
                if (std::stod(last) > rule.value("ted_alarm", 0.5)) p += rule.value("ted_step", 0.1);
            }
            p = std::min(p, 0.95);
            return "The graph shows " + because + ".\nProbability: " + format_double(std::round(p * 100.0) / 100.0);
        }
        const bool crash = hits.size() >= rule.at("binary_threshold").get<std::size_t>();
        std::string out;
        if (user.find(kStepByStepLine) != std::string::npos)
            out = "Step 1: scan the news for stress. Step 2: weigh how it reaches the holdings. ";
        return out + "Assessment: " + because + ".\nPrediction: " + (crash ? "Yes" : "No");
    }

    json rules_;
    std::mutex mu_;
    std::map<std::string, std::string> recorded_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regenerate scripted fixtures for the synthetic data set"};
    std::string dir = (data_dir() / "synthetic").string();
    std::string out;
    app.add_option("--dir", dir, "synthetic data directory (rules.json, corpus.jsonl, prices.csv, ted.csv)");
    app.add_option("--out", out, "fixture output path (default <dir>/fixtures.jsonl)");
    CLI11_PARSE(app, argc, argv);
    if (out.empty()) out = dir + "/fixtures.jsonl";

    try {
        std::ifstream rules_in(dir + "/rules.json");
        if (!rules_in) throw InputError("missing " + dir + "/rules.json");
        RuleBackend backend(json::parse(rules_in));

        RunConfig crash;
        crash.corpus = dir + "/corpus.jsonl";
        crash.prices = dir + "/prices.csv";
        crash.portfolio = "country_neutral";
        crash.backend = "scripted:unused";
        const auto crash_inputs = load_inputs(crash);
        const auto base = crash.pipeline();

        for (auto variant : {Ablation::full, Ablation::no_temporal, Ablation::no_decay})
            run_ablation(variant, crash_inputs, base, backend);
        for (auto variant : {BaselineVariant::io, BaselineVariant::cot}) run_baseline(variant, crash_inputs, base, backend);
        sweep(SweepParam::lambda, {0.1, 0.5, 1, 2, 10}, crash_inputs, base, backend);
        sweep(SweepParam::q, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}, crash_inputs, base, backend);

        RunConfig macro = crash;
        macro.mode = TaskMode::macro;
        macro.ted = dir + "/ted.csv";
        macro.portfolio = "economies";
        const auto macro_inputs = load_inputs(macro);
        run_experiment(macro_inputs, macro.pipeline(), backend);

        std::string text;
        for (const auto& [digest, reply] : backend.recorded()) text += ScriptedBackend::fixture_line(digest, reply) + "\n";
        std::ofstream os(out, std::ios::binary);
        os << text;
        if (!os) throw InputError("cannot write " + out);
        std::cout << backend.recorded().size() << " fixtures written to " << out << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
