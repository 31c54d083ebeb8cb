#pragma once

#include <stdexcept>
#include <string>

namespace lorentree {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class DegenerateForm : public Error {
public:
    using Error::Error;
};

class DepthExceeded : public Error {
public:
    using Error::Error;
};

class NotOrthogonal : public Error {
public:
    NotOrthogonal(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

class DataInconsistency : public Error {
public:
    using Error::Error;
};

class PreconditionFailed : public Error {
public:
    using Error::Error;
};

} // namespace lorentree
