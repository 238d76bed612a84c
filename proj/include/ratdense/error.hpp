#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ratdense {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed regular expression; `position` is a byte offset into the input.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class UnknownSymbolError : public Error {
public:
    explicit UnknownSymbolError(char symbol)
        : Error(std::string("unknown symbol '") + symbol + "'"), symbol_(symbol) {}
    char symbol() const noexcept { return symbol_; }

private:
    char symbol_;
};

class AlphabetMismatchError : public Error {
public:
    using Error::Error;
};

/// A computation would exceed a configured size or iteration cap.
class CapExceededError : public Error {
public:
    using Error::Error;
};

class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

/// Measure validation failures (sums, negative entries, non-stochastic rows).
class MeasureError : public Error {
public:
    using Error::Error;
};

class EmptyShiftError : public Error {
public:
    using Error::Error;
};

class NotIrreducibleError : public Error {
public:
    using Error::Error;
};

class NoConvergenceError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent job file.
class JobSpecError : public Error {
public:
    using Error::Error;
};

} // namespace ratdense
