#pragma once

#include <stdexcept>
#include <string>

namespace qdho {

/// Input outside the domain where the requested quantity exists.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A result (not an intermediate) left the floating range.
class OverflowError : public std::overflow_error {
public:
    explicit OverflowError(const std::string& what) : std::overflow_error(what) {}
};

/// An iterative solver ran out of its iteration budget.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qdho
