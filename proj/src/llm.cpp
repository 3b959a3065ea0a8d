#include "trr/llm.hpp"

#include "trr/errors.hpp"
#include "trr/util.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

namespace trr {

std::string_view to_string(Role role) { return role == Role::system ? "system" : "user"; }

std::string_view to_string(PredictionMode mode) {
    return mode == PredictionMode::binary ? "binary" : "probability";
}

std::string_view to_string(BaselineVariant v) { return v == BaselineVariant::io ? "io" : "cot"; }

void ChatRequest::validate() const {
    if (messages.empty()) throw PreconditionError("chat request has no messages");
    if (!(temperature >= 0.0 && temperature <= 2.0))
        throw PreconditionError("temperature must lie in [0, 2]");
}

std::string request_digest(const ChatRequest& request) {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    for (const auto& m : request.messages) {
        EVP_DigestUpdate(ctx, m.text.data(), m.text.size());
        const char sep = '\0';
        EVP_DigestUpdate(ctx, &sep, 1);
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

std::string render_messages(const ChatRequest& request) {
    std::string out;
    for (const auto& m : request.messages) {
        out += "[";
        out += to_string(m.role);
        out += "]\n";
        out += m.text;
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scripted backend

ScriptedBackend::ScriptedBackend(std::map<std::string, std::string> responses)
    : responses_(std::move(responses)) {}

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("scripted fixture not found: " + path.string());
    std::map<std::string, std::string> responses;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            responses[j.at("digest").get<std::string>()] = j.at("response_text").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    ScriptedBackend backend(std::move(responses));
    backend.origin_ = path.string();
    return backend;
}

std::string ScriptedBackend::complete(const ChatRequest& request) {
    const auto digest = request_digest(request);
    auto it = responses_.find(digest);
    if (it == responses_.end()) throw FixtureMissError(digest);
    return it->second;
}

std::string ScriptedBackend::describe() const { return "scripted:" + origin_; }

std::string ScriptedBackend::fixture_line(const std::string& digest, const std::string& response_text) {
    nlohmann::json j;
    j["digest"] = digest;
    j["response_text"] = response_text;
    return j.dump();
}

BackendKind parse_backend_spec(const std::string& spec, const std::string& model_name,
                               const std::string& token_env) {
    if (spec.rfind("scripted:", 0) == 0) {
        auto path = spec.substr(9);
        if (path.empty()) throw InputError("backend: scripted fixture path is empty");
        return ScriptedFixtureSpec{path};
    }
    std::string url = spec;
    if (spec.rfind("http:", 0) == 0 && spec.rfind("http://", 0) != 0) url = spec.substr(5);
    if (url.rfind("http://", 0) != 0 && url.rfind("https://", 0) != 0)
        throw InputError("backend: expected scripted:<path> or an http(s) URL, got '" + spec + "'");
    return HttpEndpointSpec{url, model_name, token_env};
}

// ---------------------------------------------------------------------------
// Prompts

namespace {

constexpr std::string_view kBrainstormSystem =
    "You trace how financial news propagates through industries, markets, institutions "
    "and companies. Answer only in the requested line format.";

constexpr std::string_view kReasonSystem =
    "You are a portfolio risk analyst. You reason strictly over the impact tuples you are given.";

void render_portfolio(std::ostringstream& os, const Portfolio& portfolio) {
    os << (portfolio.mode == PortfolioMode::economy ? "Target economies:\n" : "Portfolio members:\n");
    for (const auto& m : portfolio.members) {
        os << "- " << (m.name.empty() ? m.ticker : m.name);
        if (portfolio.mode == PortfolioMode::stock) {
            os << " [" << m.ticker << "]";
            if (!m.category.empty()) os << " (" << m.category << ")";
        }
        os << "\n";
    }
}

void render_format_instruction(std::ostringstream& os, std::size_t k) {
    os << "Answer with at most " << k << " numbered lines in the format:\n"
       << "1. <Entity> | <Explanation>\n";
}

std::string vertex_label(const Vertex& v, const Portfolio& portfolio, const ArticleLabels* labels) {
    if (v.kind == VertexKind::article && labels) {
        if (auto it = labels->find(v.key); it != labels->end()) return it->second;
    }
    if (v.kind == VertexKind::stock) {
        if (const Stock* s = portfolio.find_ticker(v.key); s && !s->name.empty()) return s->name;
    }
    return v.key;
}

void render_prediction_instruction(std::ostringstream& os, const Portfolio& portfolio,
                                   PredictionMode mode) {
    if (mode == PredictionMode::binary) {
        os << "Explain whether the " << (portfolio.mode == PortfolioMode::economy ? "economies" : "portfolio")
           << " will crash on the next trading day, then end with a final line of the form "
              "\"Prediction: Yes\" or \"Prediction: No\".\n";
    } else {
        os << "Explain how likely a global crisis is on the next trading day, then end with a final "
              "line of the form \"Probability: <number between 0 and 1>\".\n";
    }
}

}  // namespace

ChatRequest build_brainstorm_prompt(const BrainstormSource& source, const Portfolio& portfolio,
                                    std::size_t k, const PromptOptions& options) {
    if (k < 1) throw PreconditionError("brainstorm k must be >= 1");
    std::ostringstream os;
    render_portfolio(os, portfolio);
    os << "\n";
    if (source.vertex.kind == VertexKind::article) {
        os << "News article published on " << source.day.iso() << ":\n";
        os << "Headline: " << source.headline << "\n";
        if (!source.body.empty()) {
            std::string body = source.body.substr(0, options.body_char_cap);
            os << "Body: " << body << (body.size() < source.body.size() ? " [...]" : "") << "\n";
        }
        os << "\nWhich entities are directly impacted by this news? An entity can be an industry, "
              "a market, an institution, a region, or one of the listed members. If a listed member is "
              "impacted, name it exactly as listed.\n";
    } else {
        os << "Impact chain so far (" << source.day.iso() << "):\n";
        for (std::size_t i = 0; i < source.provenance.size(); ++i)
            os << (i ? " -> " : "") << source.provenance[i];
        os << "\n\nEntity: " << source.vertex.key << "\n";
        os << "\nWhich entities are impacted in turn by the effects on \"" << source.vertex.key
           << "\"? If a listed member is impacted, name it exactly as listed.\n";
    }
    render_format_instruction(os, k);
    ChatRequest req;
    req.model_name = options.model_name;
    req.temperature = options.temperature;
    req.messages = {{Role::system, std::string(kBrainstormSystem)}, {Role::user, os.str()}};
    return req;
}

BrainstormReply parse_brainstorm(const std::string& raw, std::size_t k) {
    static const std::regex numbered(R"(^\s*\d+\s*[.)]\s*(.*)$)");
    BrainstormReply reply;
    std::istringstream in(raw);
    std::string line;
    std::smatch m;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!std::regex_match(line, m, numbered)) continue;
        const std::string rest = m[1].str();
        const auto bar = rest.find('|');
        const std::string_view entity_raw =
            bar == std::string::npos ? std::string_view(rest) : std::string_view(rest).substr(0, bar);
        const std::string_view expl =
            bar == std::string::npos ? std::string_view{} : std::string_view(rest).substr(bar + 1);
        try {
            reply.items.push_back({normalize_entity(entity_raw), std::string(trim(expl))});
        } catch (const InputError&) {
            continue;
        }
        if (reply.items.size() == k) break;
    }
    if (reply.items.empty()) throw ParseError("no numbered 'Entity | Explanation' lines in reply", raw);
    return reply;
}

std::string render_brainstorm(const BrainstormReply& reply) {
    std::string out;
    for (std::size_t i = 0; i < reply.items.size(); ++i) {
        out += std::to_string(i + 1) + ". " + reply.items[i].entity;
        if (!reply.items[i].explanation.empty()) out += " | " + reply.items[i].explanation;
        out += "\n";
    }
    return out;
}

ChatRequest build_reason_prompt(const Portfolio& portfolio, std::vector<RelationalTuple> tuples,
                                PredictionMode mode, std::span<const double> ted_context,
                                const ArticleLabels* labels, const PromptOptions& options) {
    std::stable_sort(tuples.begin(), tuples.end(), [](const RelationalTuple& a, const RelationalTuple& b) {
        return std::tie(a.level, a.t, a.subject, a.object) < std::tie(b.level, b.t, b.subject, b.object);
    });
    std::ostringstream os;
    render_portfolio(os, portfolio);
    os << "\nImpact graph as (date, subject, impacts, object) tuples, ordered by graph level and then "
          "by date:\n";
    for (const auto& t : tuples) {
        os << "(" << t.t.iso() << ", " << vertex_label(t.subject, portfolio, labels) << ", " << t.relation
           << ", " << vertex_label(t.object, portfolio, labels) << ")\n";
    }
    if (tuples.empty()) os << "(no impacts)\n";
    if (!ted_context.empty()) {
        os << "\nTED spread over the past " << ted_context.size()
           << " trading days (percentage points, oldest first): ";
        for (std::size_t i = 0; i < ted_context.size(); ++i)
            os << (i ? ", " : "") << format_double(ted_context[i]);
        os << "\n";
    }
    os << "\nBase your reasoning only on the tuples above. Do not refer to historical events you may "
          "associate with these dates.\n";
    render_prediction_instruction(os, portfolio, mode);
    ChatRequest req;
    req.model_name = options.model_name;
    req.temperature = options.temperature;
    req.messages = {{Role::system, std::string(kReasonSystem)}, {Role::user, os.str()}};
    return req;
}

PredictionReply parse_prediction(const std::string& raw, PredictionMode mode) {
    PredictionReply reply;
    std::size_t marker_pos = std::string::npos;
    if (mode == PredictionMode::binary) {
        static const std::regex re(R"(prediction\s*:\s*\**\s*(yes|no)\b)", std::regex::icase);
        for (auto it = std::sregex_iterator(raw.begin(), raw.end(), re); it != std::sregex_iterator(); ++it) {
            auto word = (*it)[1].str();
            reply.verdict = (word[0] == 'y' || word[0] == 'Y') ? Verdict::crash : Verdict::no_crash;
            marker_pos = static_cast<std::size_t>(it->position(0));
        }
        if (!reply.verdict) throw ParseError("no 'Prediction: Yes|No' marker in reply", raw);
    } else {
        static const std::regex re(
            R"(probability\s*:\s*\**\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(%?))", std::regex::icase);
        for (auto it = std::sregex_iterator(raw.begin(), raw.end(), re); it != std::sregex_iterator(); ++it) {
            double p = std::stod((*it)[1].str());
            if ((*it)[2].length() > 0) p /= 100.0;
            reply.clamped = p < 0.0 || p > 1.0;
            reply.probability = std::clamp(p, 0.0, 1.0);
            marker_pos = static_cast<std::size_t>(it->position(0));
        }
        if (!reply.probability) throw ParseError("no 'Probability: <x>' marker in reply", raw);
    }
    reply.explanation = std::string(trim(std::string_view(raw).substr(0, marker_pos)));
    return reply;
}

ChatRequest build_baseline_prompt(const std::vector<std::string>& headlines, const Portfolio& portfolio,
                                  BaselineVariant variant, PredictionMode mode,
                                  const PromptOptions& options) {
    if (headlines.empty()) throw PreconditionError("baseline prompt needs at least one headline");
    auto words = [](const std::string& s) {
        std::istringstream in(s);
        std::size_t n = 0;
        std::string w;
        while (in >> w) ++n;
        return n;
    };
    // Keep the newest headlines that fit; always keep at least one.
    std::size_t first = headlines.size() - 1;
    std::size_t used = words(headlines.back());
    while (first > 0) {
        const auto w = words(headlines[first - 1]);
        if (used + w > options.headline_word_budget) break;
        used += w;
        --first;
    }
    std::ostringstream os;
    render_portfolio(os, portfolio);
    os << "\nToday's news headlines:\n";
    for (std::size_t i = first; i < headlines.size(); ++i) os << "- " << headlines[i] << "\n";
    os << "\n";
    render_prediction_instruction(os, portfolio, mode);
    if (variant == BaselineVariant::cot) os << kStepByStepLine << "\n";
    ChatRequest req;
    req.model_name = options.model_name;
    req.temperature = options.temperature;
    req.messages = {{Role::user, os.str()}};
    return req;
}

nlohmann::json TranscriptEntry::to_json() const {
    nlohmann::json j;
    j["day"] = day;
    j["stage"] = stage;
    j["repeat"] = repeat;
    j["prompt_digest"] = prompt_digest;
    j["prompt"] = prompt;
    j["raw_response"] = raw_response;
    if (!error.empty()) j["error"] = error;
    return j;
}

}  // namespace trr
