#pragma once

#include <stdexcept>
#include <string>

namespace segquery {

/// Bad input data: malformed files, violated invariants, conflicting flags.
/// Maps to CLI exit code 1.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Endpoint unreachable or protocol broken on the wire. Maps to CLI exit code 2.
struct TransportError : std::runtime_error {
    explicit TransportError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace segquery
