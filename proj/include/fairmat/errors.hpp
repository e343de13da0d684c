#pragma once

#include <stdexcept>
#include <string>

namespace fairmat {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

/// Raised when an operation requires a matroid family and gets a general
/// hereditary one.
class NotAMatroid : public Error {
public:
    explicit NotAMatroid(const std::string& what = "constraint family is not a matroid") : Error(what) {}
};

/// Subset enumeration would exceed the configured ground-set guard.
class GroundSetTooLarge : public Error {
public:
    using Error::Error;
};

/// Enumerating deterministic assignments (or partitions) would exceed the
/// configured guard.
class EnumerationTooLarge : public Error {
public:
    using Error::Error;
};

class WrongAgentCount : public Error {
public:
    using Error::Error;
};

class PreferencesNotIdentical : public Error {
public:
    explicit PreferencesNotIdentical(const std::string& what = "preferences are not identical") : Error(what) {}
};

class ConstraintsNotIdentical : public Error {
public:
    explicit ConstraintsNotIdentical(const std::string& what = "constraint families are not identical") : Error(what) {}
};

class NotIdenticalAgents : public Error {
public:
    explicit NotIdenticalAgents(const std::string& what = "agents do not share preference and constraints") : Error(what) {}
};

class UnknownId : public Error {
public:
    using Error::Error;
};

class BadN : public Error {
public:
    using Error::Error;
};

class InfeasiblePoint : public Error {
public:
    using Error::Error;
};

class MaxIterations : public Error {
public:
    using Error::Error;
};

class InvalidInstance : public Error {
public:
    using Error::Error;
};

}  // namespace fairmat
