#pragma once

#include <stdexcept>
#include <string>

namespace prethermal {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad sizes, out-of-domain parameters, malformed patterns.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class SizeError : public Error {
public:
    using Error::Error;
};

class BasisError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& message, int line = 0)
        : Error(format(key, message, line)), key_(std::move(key)), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& key, const std::string& message, int line) {
        std::string s = "config";
        if (line > 0) s += " line " + std::to_string(line);
        if (!key.empty()) s += " key '" + key + "'";
        return s + ": " + message;
    }

    std::string key_;
    int line_;
};

/// Numerical breakdown: instability, resonance, non-convergence.
class NumericError : public Error {
public:
    using Error::Error;
};

class ResonanceError : public NumericError {
public:
    using NumericError::NumericError;
};

class StabilityError : public NumericError {
public:
    using NumericError::NumericError;
};

class SolverError : public NumericError {
public:
    using NumericError::NumericError;
};

class DegeneratePotentialError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class EmptySelectionError : public NumericError {
public:
    EmptySelectionError(const std::string& message, double acceptance)
        : NumericError(message), acceptance_(acceptance) {}
    double acceptance() const noexcept { return acceptance_; }

private:
    double acceptance_;
};

}  // namespace prethermal
