#pragma once

#include <stdexcept>
#include <string>

namespace ivbench {

// Input violates a documented precondition (bad file, bad shape, bad label).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical routine could not produce a meaningful result.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ivbench
