#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ambient {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad function argument (negative sigma, hop of zero, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Malformed text input. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Trace is shorter than one classification window.
class TraceTooShortError : public Error {
public:
    TraceTooShortError(std::size_t length, std::size_t window)
        : Error("trace of " + std::to_string(length) + " samples is shorter than window of " +
                std::to_string(window)),
          length_(length), window_(window) {}

    std::size_t length() const noexcept { return length_; }
    std::size_t window() const noexcept { return window_; }

private:
    std::size_t length_;
    std::size_t window_;
};

/// Non-finite or wrongly shaped model input.
class ModelInputError : public Error {
public:
    using Error::Error;
};

/// Model file is unreadable or has the wrong shape/magic.
class ModelFormatError : public Error {
public:
    using Error::Error;
};

/// Rule correction did not settle within the pass budget.
class FixpointError : public Error {
public:
    using Error::Error;
};

/// LLM transport failure (connect, HTTP status, timeout).
class TransportError : public Error {
public:
    using Error::Error;
};

/// LLM response did not follow the three-line contract. Keeps the raw text.
class VerdictParseError : public Error {
public:
    VerdictParseError(const std::string& what, std::string raw)
        : Error(what), raw_(std::move(raw)) {}

    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

/// Malformed wire message.
class ProtocolError : public Error {
public:
    using Error::Error;
};

/// Event store I/O or corruption.
class StoreError : public Error {
public:
    using Error::Error;
};

/// Config file problem (unknown key, bad value).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ambient
