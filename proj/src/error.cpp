#include "dyncenter/error.hpp"

namespace dyncenter {

ValidationError::ValidationError(std::vector<FieldError> errors)
    : std::runtime_error(summarize(errors)), errors_(std::move(errors)) {}

ValidationError::ValidationError(std::string field, std::string message)
    : ValidationError(std::vector<FieldError>{{std::move(field), std::move(message)}}) {}

std::string ValidationError::summarize(const std::vector<FieldError>& errors) {
    std::string out = "validation failed";
    for (const auto& e : errors) {
        out += "; ";
        out += e.field;
        out += ": ";
        out += e.message;
    }
    return out;
}

}  // namespace dyncenter
