#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mecsc {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configuration value is missing, unknown or out of range.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// A config file line could not be parsed.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Input outside the domain of a model formula (e.g. non-positive volume).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A decision variable breaks one of the problem constraints.
class ConstraintViolation : public Error {
public:
    using Error::Error;
};

/// The scenario cannot be built (e.g. more users on one SBS than subcarriers).
class ScenarioInfeasible : public Error {
public:
    using Error::Error;
};

class BracketError : public Error {
public:
    using Error::Error;
};

/// Iteration cap reached; carries the best iterate found so far.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, double best)
        : Error(what), best_(best) {}
    double best() const noexcept { return best_; }

private:
    double best_;
};

/// SCA linearization point with a non-positive delay denominator.
class AnchorError : public Error {
public:
    using Error::Error;
};

/// Sum of minimum capacities exceeds the server budget.
class BudgetInfeasible : public Error {
public:
    using Error::Error;
};

/// One user can satisfy its constraints neither locally nor by offloading.
class UserInfeasible : public Error {
public:
    UserInfeasible(std::size_t user, const std::string& what)
        : Error(what), user_(user) {}
    std::size_t user() const noexcept { return user_; }

private:
    std::size_t user_;
};

/// A whole run is infeasible; names every offending user.
class InfeasibleRun : public Error {
public:
    InfeasibleRun(std::vector<std::size_t> users, const std::string& what)
        : Error(what), users_(std::move(users)) {}
    const std::vector<std::size_t>& users() const noexcept { return users_; }

private:
    std::vector<std::size_t> users_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace mecsc
