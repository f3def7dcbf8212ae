#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace orgsim {

/// Base of every domain error raised by the library. The CLI maps these to
/// exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TimeTravel : public Error {
public:
    using Error::Error;
};

class BadDistributionParams : public Error {
public:
    using Error::Error;
};

class RoutingError : public Error {
public:
    using Error::Error;
};

class InvalidTransition : public Error {
public:
    using Error::Error;
};

class BadStereotype : public Error {
public:
    using Error::Error;
};

class InsufficientSamples : public Error {
public:
    using Error::Error;
};

class MissingMetric : public Error {
public:
    using Error::Error;
};

class BadWeights : public Error {
public:
    using Error::Error;
};

class BadBudget : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// One schema defect: dotted path to the offending field plus the reason.
struct SchemaIssue {
    std::string path;
    std::string reason;
};

/// Raised by configuration parsing. Carries every defect found, not just the
/// first, so `validate` can list them all.
class ConfigError : public Error {
public:
    enum class Kind { FileNotFound, Syntax, Schema };

    ConfigError(Kind kind, std::string message, std::vector<SchemaIssue> issues = {})
        : Error(std::move(message)), kind_(kind), issues_(std::move(issues)) {}

    Kind kind() const noexcept { return kind_; }
    const std::vector<SchemaIssue>& issues() const noexcept { return issues_; }

private:
    Kind kind_;
    std::vector<SchemaIssue> issues_;
};

/// Wraps a failure inside replication `index` so batch callers can tell
/// which run broke.
class ReplicationError : public Error {
public:
    ReplicationError(std::size_t index, const std::string& what)
        : Error("replication " + std::to_string(index) + ": " + what), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

}  // namespace orgsim
