#pragma once

#include <stdexcept>
#include <string>

namespace harmonic {

// Input or hypothesis violation detected before any numerical work.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed (factorization, non-convergence, step underflow).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace harmonic
