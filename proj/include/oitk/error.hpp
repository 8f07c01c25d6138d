#pragma once

#include <stdexcept>
#include <string>

namespace oitk {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad parameters or preconditions supplied by the caller.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Malformed or unusable input data (files, densities).
class InputError : public Error {
public:
    using Error::Error;
};

// A solver could not continue: folded warp, step guard tripped, energy increase.
class SolverError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace oitk
