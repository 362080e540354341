#pragma once

#include <stdexcept>
#include <string>

namespace bordercurve {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidPsi : public Error {
public:
    using Error::Error;
};

class InvalidScore : public Error {
public:
    using Error::Error;
};

class InternalInconsistency : public Error {
public:
    using Error::Error;
};

class NotFeasible : public Error {
public:
    using Error::Error;
};

class NotExtremal : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class RegularityViolation : public Error {
public:
    using Error::Error;
};

class TooLarge : public Error {
public:
    using Error::Error;
};

/// Malformed tables, JSON specs and similar user input.
class InputError : public Error {
public:
    using Error::Error;
};

}  // namespace bordercurve
