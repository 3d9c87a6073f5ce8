#pragma once

#include <stdexcept>
#include <string>

namespace timesp {

// Exit-code mapping used by the CLI: domain/usage -> 2, resource -> 3,
// refuted verification -> 1 (reported, never thrown).

class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

class not_invertible_error : public std::domain_error {
public:
    explicit not_invertible_error(const std::string& what) : std::domain_error(what) {}
};

class precondition_error : public std::domain_error {
public:
    explicit precondition_error(const std::string& what) : std::domain_error(what) {}
};

// Raised when an internally generated object fails its own self-check.
// Indicates a bug, never a bad input.
class internal_error : public std::logic_error {
public:
    explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

} // namespace timesp
