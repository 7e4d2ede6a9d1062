#pragma once

#include <stdexcept>
#include <string>

namespace langdrift {

// Base of every error thrown by the core library. The C API maps each
// subclass onto an ld_status code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Input text could not be parsed (numbers, script names).
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::string offending)
        : Error(msg + ": '" + offending + "'"), offending_(std::move(offending)) {}

    const std::string& offending() const noexcept { return offending_; }

private:
    std::string offending_;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Structurally wrong input file (e.g. mostly malformed lines).
class FormatError : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace langdrift
