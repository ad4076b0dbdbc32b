#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lentag {

/// Base of all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data: a corpus line, an LKB entry, a mapping row.
/// Carries the 1-based line number when one is known (0 otherwise).
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input that violates a semantic precondition
/// (empty selection, untrained KB, metadata mismatch, ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// Filesystem failures.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace lentag
