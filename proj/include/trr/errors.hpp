#pragma once

#include <stdexcept>
#include <string>

namespace trr {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or out-of-contract input (empty entity, bad date, bad config field).
class InputError : public Error {
public:
    using Error::Error;
};

// A caller broke an operation's precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// A model reply that could not be parsed. Keeps the raw text for the run log.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::string raw)
        : Error(what), raw_(std::move(raw)) {}

    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

// Backend unreachable or answering with a retryable failure after all attempts,
// or with a fatal 4xx.
class TransportError : public Error {
public:
    TransportError(const std::string& what, int status = 0)
        : Error(what), status_(status) {}

    // HTTP status of the last attempt, 0 when no response was received.
    int status() const noexcept { return status_; }

private:
    int status_;
};

// The scripted backend has no entry for a request digest.
class FixtureMissError : public Error {
public:
    FixtureMissError(const std::string& digest)
        : Error("scripted backend has no response for digest " + digest), digest_(digest) {}

    const std::string& digest() const noexcept { return digest_; }

private:
    std::string digest_;
};

// Persisted state (memory snapshot, graph archive) could not be read back.
class FormatError : public Error {
public:
    using Error::Error;
};

// AUROC requested on single-class labels.
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

// A whole run failed (too many aborted days).
class RunFailedError : public Error {
public:
    using Error::Error;
};

}  // namespace trr
