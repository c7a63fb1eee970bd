#pragma once

#include <stdexcept>
#include <string>

namespace pcqa {

// Base of every error thrown by the library. The CLI maps the concrete type
// to an exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid user input: bad tokens, out-of-range codec parameters, rejected rows,
// malformed files, missing data groups.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A codec parameter outside its domain. Carries the offending field name.
class ParameterDomainError : public ValidationError {
public:
    ParameterDomainError(std::string field, const std::string& what)
        : ValidationError(what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Text or binary input that does not follow its format. Message carries the
// line number or byte offset.
class ParseError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// A numeric result that would be undefined (constant correlation input,
// non-positive sub-score under a power scheme, empty reductions).
class NumericDomainError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace pcqa
