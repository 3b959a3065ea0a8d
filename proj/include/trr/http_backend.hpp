#pragma once

#include "trr/llm.hpp"

#include <condition_variable>
#include <mutex>
#include <string>

namespace trr {

// JSON-over-HTTP chat-completion client (messages array in, choices array out).
// Retries transport failures and 5xx with exponential backoff; 4xx is fatal.
class HttpBackend final : public ChatBackend {
public:
    HttpBackend(HttpEndpointSpec spec, HttpOptions options);

    std::string complete(const ChatRequest& request) override;
    std::string describe() const override { return "http:" + spec_.url; }

    // Wire format helpers, exposed for tests.
    static std::string request_body(const ChatRequest& request, const std::string& default_model);
    static std::string response_text(const std::string& body);

private:
    struct Target {
        std::string scheme_host_port;
        std::string path;
    };
    static Target split_url(const std::string& url);

    void acquire();
    void release();

    HttpEndpointSpec spec_;
    HttpOptions options_;
    Target target_;
    std::string token_;

    std::mutex mu_;
    std::condition_variable cv_;
    int in_flight_ = 0;
};

}  // namespace trr
