#pragma once

#include <stdexcept>
#include <string>

namespace corrcast {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file or reply (carries line/position context in the message).
class ParseError : public Error {
public:
    using Error::Error;
};

// Structurally well-formed input that violates a documented invariant
// (duplicate keys, nonpositive prices, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Too few observations to evaluate the requested quantity.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// Argument outside its documented domain (probability outside [0,1],
// out-of-range class index, negative target volatility, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Series that must share dates have no overlap.
class AlignmentError : public Error {
public:
    using Error::Error;
};

// Covariance matrix singular beyond repair tolerance.
class ConditioningError : public Error {
public:
    using Error::Error;
};

// Requested dates have no value in a required input series.
class GapError : public Error {
public:
    using Error::Error;
};

// Quantity mathematically undefined on this input (zero-variance
// correlation, zero-variance Sharpe denominator).
class UndefinedValueError : public Error {
public:
    using Error::Error;
};

// Degenerate closed-form optimizer inputs (vanishing denominator).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// Network-level failure talking to a remote endpoint.
class TransportError : public Error {
public:
    using Error::Error;
};

// Completion reply that does not match the documented grammar.
class MalformedReplyError : public Error {
public:
    using Error::Error;
};

} // namespace corrcast
