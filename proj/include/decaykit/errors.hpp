// errors.hpp - exception types shared by all decaykit modules

#pragma once

#include <stdexcept>
#include <string>

namespace decaykit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Violated precondition: bad parameters, wrong density variant, t outside the domain.
class DomainError : public Error {
public:
    using Error::Error;
};

// A numerical procedure failed or could not certify its result.
// `estimate` carries the achieved error / condition number when one exists.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what, double estimate = 0.0)
        : Error(what), estimate_(estimate) {}

    double estimate() const noexcept { return estimate_; }

private:
    double estimate_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

class ModelFileError : public Error {
public:
    explicit ModelFileError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace decaykit
