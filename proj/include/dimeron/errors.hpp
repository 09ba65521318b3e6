#pragma once

#include <stdexcept>
#include <string>

namespace dimeron {

/// A model, grid or run configuration violates one of its stated bounds.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was called outside its mathematical domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative procedure exhausted its budget without meeting tolerance.
class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dimeron
