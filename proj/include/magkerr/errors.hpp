#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace magkerr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Input / configuration errors (CLI exit code 1)
// ---------------------------------------------------------------------------

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class UnsupportedOperation : public Error {
public:
    using Error::Error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Config parse / schema / unit-consistency failure. Carries the offending key
/// and the 1-based line number (0 when the problem is not tied to one line).
class ConfigError : public Error {
public:
    ConfigError(const std::string& message, std::string key, int line)
        : Error(format(message, key, line)), key_(std::move(key)), line_(line) {}

    [[nodiscard]] const std::string& key() const noexcept { return key_; }
    [[nodiscard]] int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& message, const std::string& key, int line) {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        if (!key.empty()) out += "'" + key + "': ";
        return out + message;
    }

    std::string key_;
    int line_ = 0;
};

// ---------------------------------------------------------------------------
// Physics / numerical failures (CLI exit code 2)
// ---------------------------------------------------------------------------

class PhysicsError : public Error {
public:
    using Error::Error;
};

class ConvergenceFailure : public PhysicsError {
public:
    ConvergenceFailure(const std::string& message, double best_residual)
        : PhysicsError(message + " (best residual " + std::to_string(best_residual) + ")"),
          best_residual_(best_residual) {}

    [[nodiscard]] double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

class SingularityError : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

class NumericalError : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

/// Raised when an operation requiring a Hurwitz-stable drift matrix gets an unstable one.
class UnstableModel : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

class DivergenceError : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

class MultistableError : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

}  // namespace magkerr
