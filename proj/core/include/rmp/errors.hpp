#pragma once

#include <stdexcept>
#include <string>

namespace rmp {

// Malformed or invalid distribution document. field() names the offending key.
class SpecError : public std::invalid_argument {
public:
    SpecError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Operation needs a finitely supported law.
class NotDiscreteError : public std::domain_error {
public:
    explicit NotDiscreteError(const std::string& what) : std::domain_error(what) {}
};

// Parameters fall outside the table of known closed forms.
class NoClosedFormError : public std::domain_error {
public:
    explicit NoClosedFormError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace rmp
