#ifndef SGUR_ERROR_HPP
#define SGUR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sgur {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller passed a parameter outside its documented domain (bad k, bad lambda,
// bad ratios). The CLI maps this to exit code 2.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Input file or stream could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

// Input file exists but its contents are malformed.
class ParseError : public Error {
public:
    using Error::Error;
};

// Inputs parse individually but are mutually inconsistent (shape mismatches,
// unknown ids, non-finite values, empty corpus).
class DataError : public Error {
public:
    using Error::Error;
};

}

#endif
