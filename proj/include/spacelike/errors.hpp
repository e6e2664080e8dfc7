#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace spacelike {

// Argument outside the mathematical domain of an operation (|beta| >= 1,
// spacelike pair handed to a proper-time query, zero rapidity in a 0/0 limit).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Non-finite result, typically a boost with extreme rapidity.
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

// A requested crossing or intersection does not exist.
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// State vector violates its invariants (e.g. not normalized).
class StateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Projection onto an outcome with zero probability.
class ImpossibleOutcome : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TimelineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// No event satisfies the requested constraints (e.g. source derivation).
class InfeasibleError : public GeometryError {
public:
    using GeometryError::GeometryError;
};

// Configuration text could not be parsed (syntax) or validated (semantic).
// `line` is 0 when the problem is not tied to a single line; `key` names the
// offending key for semantic errors when there is one.
class ConfigError : public std::runtime_error {
public:
    enum class Kind { syntax, semantic };

    ConfigError(Kind kind, const std::string& what, int line = 0, std::string key = {})
        : std::runtime_error(format(kind, what, line)), kind_(kind), line_(line), key_(std::move(key)) {}

    Kind kind() const noexcept { return kind_; }
    int line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    static std::string format(Kind kind, const std::string& what, int line) {
        std::string out = kind == Kind::syntax ? "syntax error" : "config error";
        if (line > 0) out += " at line " + std::to_string(line);
        return out + ": " + what;
    }

    Kind kind_;
    int line_;
    std::string key_;
};

}  // namespace spacelike
