#pragma once

#include <stdexcept>
#include <string>

namespace gkpsim {

// Numeric failure at run time: overflow, non-convergent quadrature, singular
// conditioning. CLI maps these to exit code 3.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// A state or axis does not cover the domain an operation needs.
struct support_error : numeric_error {
    explicit support_error(const std::string& what) : numeric_error(what) {}
};

// Bad arguments / config / schema. CLI maps std::invalid_argument (and this)
// to exit code 2.
struct usage_error : std::invalid_argument {
    explicit usage_error(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace gkpsim
