#pragma once

#include "trr/core.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace trr {

enum class Role { system, user };

std::string_view to_string(Role role);

struct ChatMessage {
    Role role = Role::user;
    std::string text;
};

struct ChatRequest {
    std::string model_name;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;

    // Throws PreconditionError on an empty message list or temperature outside [0, 2].
    void validate() const;
};

// Hex SHA-256 over the message texts. Roles and model are not part of the key,
// so fixtures survive backend reconfiguration but not prompt edits.
std::string request_digest(const ChatRequest& request);

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    // Must be safe to call from several threads at once.
    virtual std::string complete(const ChatRequest& request) = 0;
    virtual std::string describe() const = 0;
};

// Replays responses from a line-delimited JSON fixture of {digest, response_text}.
class ScriptedBackend final : public ChatBackend {
public:
    explicit ScriptedBackend(std::map<std::string, std::string> responses);
    // Throws InputError if the file is missing or a line is malformed.
    static ScriptedBackend from_file(const std::filesystem::path& path);

    // Throws FixtureMissError when the digest is unknown.
    std::string complete(const ChatRequest& request) override;
    std::string describe() const override;

    std::size_t size() const { return responses_.size(); }

    static std::string fixture_line(const std::string& digest, const std::string& response_text);

private:
    std::map<std::string, std::string> responses_;
    std::string origin_ = "inline";
};

struct HttpEndpointSpec {
    std::string url;
    std::string model_name;
    std::string token_env;  // name of the environment variable holding the bearer token
};

struct ScriptedFixtureSpec {
    std::filesystem::path path;
};

using BackendKind = std::variant<HttpEndpointSpec, ScriptedFixtureSpec>;

// "scripted:<path>" or "http:<url>" / a bare http(s) URL.
BackendKind parse_backend_spec(const std::string& spec, const std::string& model_name = "",
                               const std::string& token_env = "");

struct HttpOptions {
    int attempts = 3;
    int initial_backoff_ms = 250;
    int timeout_seconds = 60;
    int max_in_flight = 4;
};

std::unique_ptr<ChatBackend> make_backend(const BackendKind& kind, const HttpOptions& http = {});

inline std::string complete(ChatBackend& backend, const ChatRequest& request) {
    request.validate();
    return backend.complete(request);
}

// ---------------------------------------------------------------------------
// Prompts

struct PromptOptions {
    std::string model_name;
    double temperature = 0.0;
    std::size_t body_char_cap = 2000;
    // Rough word budget for headline-only baseline prompts.
    std::size_t headline_word_budget = 3000;
};

// What a brainstorm prompt is about: an article (headline/body) or an entity
// reached through `provenance` (labels from the article down to the entity).
struct BrainstormSource {
    Vertex vertex;
    Day day;
    std::string headline;
    std::string body;
    std::vector<std::string> provenance;
};

ChatRequest build_brainstorm_prompt(const BrainstormSource& source, const Portfolio& portfolio,
                                    std::size_t k, const PromptOptions& options = {});

struct BrainstormItem {
    std::string entity;  // normalized
    std::string explanation;

    friend bool operator==(const BrainstormItem&, const BrainstormItem&) = default;
};

struct BrainstormReply {
    std::vector<BrainstormItem> items;

    friend bool operator==(const BrainstormReply&, const BrainstormReply&) = default;
};

// Parses numbered "Entity | Explanation" lines, keeps the first k.
// Throws ParseError when no line parses.
BrainstormReply parse_brainstorm(const std::string& raw, std::size_t k);
std::string render_brainstorm(const BrainstormReply& reply);

enum class PredictionMode { binary, probability };

std::string_view to_string(PredictionMode mode);

// Display names used when rendering tuples: article id -> headline.
using ArticleLabels = std::map<std::string, std::string>;

ChatRequest build_reason_prompt(const Portfolio& portfolio, std::vector<RelationalTuple> tuples,
                                PredictionMode mode, std::span<const double> ted_context = {},
                                const ArticleLabels* labels = nullptr,
                                const PromptOptions& options = {});

enum class Verdict { no_crash, crash };

struct PredictionReply {
    std::optional<Verdict> verdict;
    std::optional<double> probability;
    std::string explanation;
    bool clamped = false;
};

// Binary: last "Prediction: Yes|No" wins. Probability: last "Probability: x",
// clamped to [0, 1] (a trailing % divides by 100). Throws ParseError if absent.
PredictionReply parse_prediction(const std::string& raw, PredictionMode mode);

enum class BaselineVariant { io, cot };

std::string_view to_string(BaselineVariant v);

inline constexpr std::string_view kStepByStepLine = "Let's think step-by-step.";

// Headlines are given oldest first; the oldest are dropped to fit the word budget.
ChatRequest build_baseline_prompt(const std::vector<std::string>& headlines, const Portfolio& portfolio,
                                  BaselineVariant variant,
                                  PredictionMode mode = PredictionMode::binary,
                                  const PromptOptions& options = {});

// ---------------------------------------------------------------------------
// Transcript

struct TranscriptEntry {
    std::string day;
    std::string stage;  // brainstorm | reason | baseline
    int repeat = 0;
    std::string prompt_digest;
    std::string prompt;
    std::string raw_response;
    std::string error;

    nlohmann::json to_json() const;
};

std::string render_messages(const ChatRequest& request);

}  // namespace trr
