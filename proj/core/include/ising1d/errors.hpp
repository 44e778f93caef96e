#pragma once

#include <stdexcept>
#include <string>

namespace ising1d {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed call: length mismatch, site out of range, i == j, ...
class UsageError : public Error {
public:
    using Error::Error;
};

// Input well-formed but outside an operation's domain (e.g. negative coupling
// passed to a ferromagnetic-only bound).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Request exceeds a fixed size limit (enumeration caps).
class CapacityError : public Error {
public:
    using Error::Error;
};

// Serialized input could not be decoded.
class ParseError : public Error {
public:
    using Error::Error;
};

// Monte-Carlo normalizer not separated from zero; the ratio estimate is
// meaningless at the requested sample count.
class InconclusiveError : public Error {
public:
    using Error::Error;
};

}  // namespace ising1d
