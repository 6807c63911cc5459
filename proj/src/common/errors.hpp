#pragma once

#include <stdexcept>
#include <string>

namespace cddp {

// Bad or inconsistent input data (instance fields, configs, shapes).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed file or JSON document.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cddp
