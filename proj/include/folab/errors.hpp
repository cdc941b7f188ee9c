#pragma once

#include <stdexcept>
#include <string>

namespace folab {

// Operands live in different representations or on incompatible grids.
class RepresentationMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A flow was evaluated outside the set where it is defined.
class OutOfDomain : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Grid too coarse or too small for the requested operation.
class ResolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A symbol vanishes somewhere on its loop, so no index exists.
class NotFredholm : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input to an integral transform does not decay inside its window.
class NotDecaying : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace folab
