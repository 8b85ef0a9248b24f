#pragma once

#include <stdexcept>
#include <string>

namespace ctox {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data (bad line, bad timestamp, bad token). Carries
// enough context to point at the offending line.
class ParseError : public Error {
public:
    ParseError(const std::string& file, size_t line, const std::string& reason)
        : Error(file + ":" + std::to_string(line) + ": " + reason),
          file_(file), line_(line), reason_(reason) {}
    explicit ParseError(const std::string& reason)
        : Error(reason), line_(0), reason_(reason) {}

    const std::string& file() const { return file_; }
    size_t line() const { return line_; }
    const std::string& reason() const { return reason_; }

private:
    std::string file_;
    size_t line_ = 0;
    std::string reason_;
};

// Structurally valid input that violates an invariant (dangling reference,
// duplicate id, inconsistent config).
class ValidationError : public Error {
public:
    using Error::Error;
};

// A statistic whose preconditions do not hold (undefined alpha, too few
// bins, zero variance in x).
class StatError : public Error {
public:
    using Error::Error;
};

// Command-line misuse; maps to exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

// Remote source failure. `retryable` distinguishes transient faults from
// permanent ones.
class TransportError : public Error {
public:
    TransportError(const std::string& msg, bool retryable)
        : Error(msg), retryable_(retryable) {}
    bool retryable() const { return retryable_; }

private:
    bool retryable_;
};

// Explicit rate-limit signal from the remote source.
class RateLimitedError : public TransportError {
public:
    explicit RateLimitedError(const std::string& msg)
        : TransportError(msg, true) {}
};

}  // namespace ctox
