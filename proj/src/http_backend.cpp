#include "trr/http_backend.hpp"

#include "trr/errors.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace trr {

HttpBackend::Target HttpBackend::split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw InputError("backend url has no scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    Target t;
    t.scheme_host_port = url.substr(0, path_start);
    if (t.scheme_host_port.size() <= scheme_end + 3) throw InputError("backend url has no host: " + url);
    t.path = path_start == std::string::npos ? "/v1/chat/completions" : url.substr(path_start);
    return t;
}

HttpBackend::HttpBackend(HttpEndpointSpec spec, HttpOptions options)
    : spec_(std::move(spec)), options_(options), target_(split_url(spec_.url)) {
    if (options_.attempts < 1) throw InputError("http attempts must be >= 1");
    if (options_.max_in_flight < 1) throw InputError("http max_in_flight must be >= 1");
    if (!spec_.token_env.empty()) {
        const char* tok = std::getenv(spec_.token_env.c_str());
        if (!tok) throw InputError("environment variable " + spec_.token_env + " is not set");
        token_ = tok;
    }
}

std::string HttpBackend::request_body(const ChatRequest& request, const std::string& default_model) {
    nlohmann::json j;
    j["model"] = request.model_name.empty() ? default_model : request.model_name;
    j["temperature"] = request.temperature;
    j["messages"] = nlohmann::json::array();
    for (const auto& m : request.messages)
        j["messages"].push_back({{"role", std::string(to_string(m.role))}, {"content", m.text}});
    return j.dump();
}

std::string HttpBackend::response_text(const std::string& body) {
    try {
        auto j = nlohmann::json::parse(body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("malformed chat-completion response: ") + e.what());
    }
}

void HttpBackend::acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < options_.max_in_flight; });
    ++in_flight_;
}

void HttpBackend::release() {
    {
        std::lock_guard lock(mu_);
        --in_flight_;
    }
    cv_.notify_one();
}

std::string HttpBackend::complete(const ChatRequest& request) {
    request.validate();
    const auto body = request_body(request, spec_.model_name);

    acquire();
    struct Release {
        HttpBackend* self;
        ~Release() { self->release(); }
    } guard{this};

    httplib::Client client(target_.scheme_host_port);
    client.set_connection_timeout(options_.timeout_seconds, 0);
    client.set_read_timeout(options_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);

    std::string last_error;
    int last_status = 0;
    for (int attempt = 0; attempt < options_.attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(options_.initial_backoff_ms << (attempt - 1)));
        }
        auto res = client.Post(target_.path, headers, body, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            last_status = 0;
            continue;
        }
        last_status = res->status;
        if (res->status >= 500) {
            last_error = "server error " + std::to_string(res->status);
            continue;
        }
        if (res->status >= 400) {
            throw TransportError("backend rejected request with status " + std::to_string(res->status) + ": " +
                                     res->body.substr(0, 200),
                                 res->status);
        }
        return response_text(res->body);
    }
    throw TransportError("backend " + spec_.url + " failed after " + std::to_string(options_.attempts) +
                             " attempts: " + last_error,
                         last_status);
}

std::unique_ptr<ChatBackend> make_backend(const BackendKind& kind, const HttpOptions& http) {
    if (const auto* s = std::get_if<ScriptedFixtureSpec>(&kind))
        return std::make_unique<ScriptedBackend>(ScriptedBackend::from_file(s->path));
    return std::make_unique<HttpBackend>(std::get<HttpEndpointSpec>(kind), http);
}

}  // namespace trr
