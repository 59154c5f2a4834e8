#pragma once

#include <stdexcept>
#include <string>

namespace specsense {

// Base class for all library errors so callers can catch one type.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InsufficientSamples : public Error {
public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

class NotSymmetric : public Error {
public:
    using Error::Error;
};

class NotConverged : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class SingularCovariance : public Error {
public:
    using Error::Error;
};

class TooFewSubSegments : public Error {
public:
    using Error::Error;
};

class TooFewSegments : public Error {
public:
    using Error::Error;
};

class TooFewTrials : public Error {
public:
    using Error::Error;
};

class NotBracketed : public Error {
public:
    using Error::Error;
};

class FileNotFound : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// A Monte Carlo cell whose failed-trial count exceeded the failure budget.
class CellFailed : public Error {
public:
    using Error::Error;
};

} // namespace specsense
