#pragma once

#include <stdexcept>
#include <string>

namespace rtvae {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes disagree; indicates a programming error in graph construction.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A non-finite value was produced or supplied where finiteness is required.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Malformed input document (schema, CSV, config, model or cache file).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Input is well-formed but unusable for the requested operation.
class DataError : public Error {
public:
    using Error::Error;
};

/// AUC requested on a set that lacks one of the two classes.
class UndefinedAucError : public DataError {
public:
    using DataError::DataError;
};

/// Encoded data and model were fitted against different encoder states.
class FingerprintMismatch : public DataError {
public:
    FingerprintMismatch(std::string expected, std::string actual)
        : DataError("encoder fingerprint mismatch: model " + expected + ", data " + actual),
          expected_(std::move(expected)), actual_(std::move(actual)) {}

    const std::string& expected() const noexcept { return expected_; }
    const std::string& actual() const noexcept { return actual_; }

private:
    std::string expected_;
    std::string actual_;
};

} // namespace rtvae
