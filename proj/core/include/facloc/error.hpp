#pragma once

#include <stdexcept>
#include <string>

namespace facloc {

/// An input file or stream is syntactically malformed.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structurally valid input violates a documented invariant.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace facloc
