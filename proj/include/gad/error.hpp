#pragma once

#include <stdexcept>
#include <string>

namespace gad {

// Invalid inputs, broken invariants, bad configuration.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem and parsing failures; messages carry file name and line number
// where applicable.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace gad
