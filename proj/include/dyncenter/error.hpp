#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dyncenter {

struct FieldError {
    std::string field;
    std::string message;
};

// Input rejected by a domain invariant. Carries one entry per offending field
// (or table coordinate) so callers can report all of them at once.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<FieldError> errors);
    ValidationError(std::string field, std::string message);

    const std::vector<FieldError>& errors() const noexcept { return errors_; }

private:
    static std::string summarize(const std::vector<FieldError>& errors);

    std::vector<FieldError> errors_;
};

// Numerically impossible request: singular or non-productive system.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StorageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Collects field errors and throws once at the end of a validation pass.
class ErrorCollector {
public:
    void add(std::string field, std::string message) {
        errors_.push_back({std::move(field), std::move(message)});
    }
    bool empty() const noexcept { return errors_.empty(); }
    void throw_if_any() const {
        if (!errors_.empty()) throw ValidationError(errors_);
    }

private:
    std::vector<FieldError> errors_;
};

}  // namespace dyncenter
