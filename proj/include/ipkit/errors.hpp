#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ipkit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition or structural invariant was violated by the caller's data.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// An iterative numeric routine failed to converge.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Failure while scoring a batch; `offset()` is the index of the first
/// sentence of the failing batch within the caller's input.
class ScorerError : public Error {
public:
    explicit ScorerError(const std::string& what, std::size_t offset = 0)
        : Error(what), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Connection, timeout or server-side failure talking to a remote scorer.
class TransportError : public ScorerError {
public:
    using ScorerError::ScorerError;
};

/// The remote scorer answered, but not in the agreed wire format.
class ProtocolError : public ScorerError {
public:
    using ScorerError::ScorerError;
};

} // namespace ipkit
